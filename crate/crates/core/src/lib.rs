//! Online learning with general directed graph feedback.
//!
//! The crate provides:
//!
//! * [`graph`] — directed feedback graphs, standard families, observability
//!   checks, and a greedy dominating-set cover;
//! * [`policy::bobw`] — an elimination policy that earns poly-logarithmic
//!   regret when rewards are stochastic and switches itself to Exp3.G when it
//!   detects an adversarial sequence;
//! * [`policy::exp3g`] — exponential weights with dominating-set exploration,
//!   the adversarial-regime baseline;
//! * [`env`] — stochastic and oblivious adversarial reward generators;
//! * [`harness`] — seeded, replicable learner/environment runs with regret
//!   traces, event logs, and concentration-bound oracles.
//!
//! Numeric code is generic over the scalar type ([`scalar::Scalar`], any
//! `num_traits::Float`); the aliases below pin the `f64` instantiations the
//! harness and CLI use.

pub mod env;
pub mod error;
pub mod graph;
pub mod harness;
pub mod policy;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use graph::{greedy_dominating_set, make_graph, DominatingSet, FeedbackGraph, GraphFamily};
pub use rng::StreamRng;
pub use scalar::Scalar;

/// `f64` instantiations used throughout the harness, the CLI, and the file
/// formats. Swap the parameter for `f32` (or any other `Scalar`) to run the
/// same machinery in a different precision.
pub type ActionDistribution = policy::ActionDistribution<f64>;
pub type RoundObservation = policy::RoundObservation<f64>;
pub type BobwParams = policy::bobw::BobwParams<f64>;
pub type BobwPolicy = policy::bobw::BobwPolicy<f64>;
pub type BobwSnapshot = policy::bobw::BobwSnapshot<f64>;
pub type Exp3gPolicy = policy::exp3g::Exp3gPolicy<f64>;
pub type Exp3gState = policy::exp3g::Exp3gState<f64>;
pub type StochasticEnv = env::StochasticEnv<f64>;
pub type AdversarialEnv = env::AdversarialEnv<f64>;
pub type Environment = env::Environment<f64>;
pub type RewardLaw = env::RewardLaw<f64>;
