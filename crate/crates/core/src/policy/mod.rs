//! Learner policies and the per-round data they exchange with the harness.

pub mod bobw;
pub mod exp3g;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::FeedbackGraph;
use crate::rng::StreamRng;
use crate::scalar::Scalar;

/// Probability vector over K arms for one round, kept together with its
/// exploitation/exploration decomposition and the mixing weight used.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionDistribution<F> {
    pub probs: Vec<F>,
    pub exploit_part: Vec<F>,
    pub explore_part: Vec<F>,
    pub gamma: F,
}

impl<F: Scalar> ActionDistribution<F> {
    /// Verifies probs >= 0 and |sum - 1| <= tol.
    pub fn check_simplex(&self, tol: F) -> Result<()> {
        let mut sum = F::zero();
        for (i, &p) in self.probs.iter().enumerate() {
            if p.is_nan() || p < F::zero() {
                return Err(Error::InternalState(format!(
                    "negative probability {p} on arm {}",
                    i + 1
                )));
            }
            sum += p;
        }
        if (sum - F::one()).abs() > tol {
            return Err(Error::InternalState(format!(
                "probabilities sum to {sum}, not 1"
            )));
        }
        Ok(())
    }

    /// Samples an arm by inverse CDF walk; leftover mass goes to the last arm.
    pub fn sample(&self, rng: &mut StreamRng) -> usize {
        let u = rng.next_f64();
        let mut acc = 0.0f64;
        for (i, &p) in self.probs.iter().enumerate() {
            acc += p.to_f64().expect("probability fits f64");
            if u < acc {
                return i;
            }
        }
        self.probs.len() - 1
    }
}

/// What the learner legally sees in one round: its arm, the reward it was
/// paid, and the (arm, reward) pairs revealed by the feedback graph.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundObservation<F> {
    pub chosen: usize,
    pub chosen_reward: F,
    /// Exactly the out-neighbors of `chosen`, in ascending arm order.
    pub observed: Vec<(usize, F)>,
}

impl<F: Scalar> RoundObservation<F> {
    /// Masks a full reward vector down to what selecting `chosen` reveals.
    pub fn from_rewards(graph: &FeedbackGraph, chosen: usize, rewards: &[F]) -> Result<Self> {
        let observed = graph
            .out_neighbors(chosen)?
            .iter()
            .map(|&j| (j, rewards[j]))
            .collect();
        Ok(Self {
            chosen,
            chosen_reward: rewards[chosen],
            observed,
        })
    }
}

/// Structural events reported by a policy after one update.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundEvents {
    pub eliminated: Vec<usize>,
    pub dom_deleted: Vec<usize>,
    pub tau_prime_set: Vec<usize>,
    pub detected: bool,
}

impl RoundEvents {
    pub fn is_empty(&self) -> bool {
        self.eliminated.is_empty()
            && self.dom_deleted.is_empty()
            && self.tau_prime_set.is_empty()
            && !self.detected
    }
}

/// Interface the harness drives: query a distribution, sample from it, then
/// feed back the observation together with the distribution actually used.
pub trait Policy<F: Scalar> {
    fn arm_count(&self) -> usize;

    fn distribution(&self) -> Result<ActionDistribution<F>>;

    fn update(
        &mut self,
        obs: &RoundObservation<F>,
        dist: &ActionDistribution<F>,
    ) -> Result<RoundEvents>;
}

/// Probability that arm `i`'s reward is observed under `probs`:
/// the total probability on i's in-neighbors.
pub fn observation_prob<F: Scalar>(graph: &FeedbackGraph, probs: &[F], arm: usize) -> Result<F> {
    Ok(graph
        .in_neighbors(arm)?
        .iter()
        .map(|&j| probs[j])
        .fold(F::zero(), |a, b| a + b))
}

/// Plays uniformly at random forever; the no-learning baseline.
#[derive(Debug, Clone)]
pub struct UniformPolicy {
    k: usize,
}

impl UniformPolicy {
    pub fn new(k: usize) -> Self {
        Self { k }
    }
}

impl<F: Scalar> Policy<F> for UniformPolicy {
    fn arm_count(&self) -> usize {
        self.k
    }

    fn distribution(&self) -> Result<ActionDistribution<F>> {
        let p = F::one() / F::from_size(self.k);
        Ok(ActionDistribution {
            probs: vec![p; self.k],
            exploit_part: vec![p; self.k],
            explore_part: vec![F::zero(); self.k],
            gamma: F::zero(),
        })
    }

    fn update(
        &mut self,
        _obs: &RoundObservation<F>,
        _dist: &ActionDistribution<F>,
    ) -> Result<RoundEvents> {
        Ok(RoundEvents::default())
    }
}
