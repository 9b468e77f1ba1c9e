//! Scalar abstraction for all probability and estimator arithmetic.
//!
//! The policies, environments, and bound formulas are generic over any
//! floating-point scalar; the crate root exposes `f64` instantiations,
//! which is what the harness and CLI run on.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use serde::{de::DeserializeOwned, Serialize};

pub trait Scalar:
    Float
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Lossless-enough conversion from a round/count index.
    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("count representable in scalar")
    }

    fn from_size(n: usize) -> Self {
        Self::from_usize(n).expect("size representable in scalar")
    }
}

impl<T> Scalar for T where
    T: Float
        + NumAssign
        + FromPrimitive
        + ToPrimitive
        + Sum
        + Debug
        + Display
        + Serialize
        + DeserializeOwned
        + Send
        + Sync
        + 'static
{
}

/// Compensated (Kahan) accumulator; keeps long reward sums exact to a few ulps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct KahanSum<F> {
    pub sum: F,
    pub comp: F,
}

impl<F: Scalar> Default for KahanSum<F> {
    fn default() -> Self {
        Self {
            sum: F::zero(),
            comp: F::zero(),
        }
    }
}

impl<F: Scalar> KahanSum<F> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: F) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> F {
        self.sum
    }
}
