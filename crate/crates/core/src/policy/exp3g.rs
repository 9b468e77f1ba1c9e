//! Exponential weights with uniform exploration over a dominating set, for
//! weakly observable graphs. Used standalone as the adversarial baseline and
//! as the post-detection phase of the best-of-both-worlds policy.
//!
//! Gains are importance-weighted rewards (same observation probabilities as
//! the elimination phase), so the two phases share their estimator machinery.
//! The parameter schedule targets the (|D| log K)^(1/3) T^(2/3) regime for a
//! known horizon; the constants are this crate's tuning, not quoted from a
//! reference implementation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DominatingSet, FeedbackGraph};
use crate::policy::{observation_prob, ActionDistribution, Policy, RoundEvents, RoundObservation};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exp3gState<F> {
    log_weights: Vec<F>,
    gamma: F,
    eta: F,
    horizon: u64,
    explore_set: Vec<usize>,
    round: u64,
}

impl<F: Scalar> Exp3gState<F> {
    /// Fresh state for `horizon` remaining rounds:
    /// gamma = min(1/2, (K |D| ln K / horizon)^(1/3)),
    /// eta = min(sqrt(gamma ln K / (horizon K |D|)), gamma / |D|).
    /// The eta cap keeps every update eta * ghat <= 1.
    pub fn new(k: usize, dom: &DominatingSet, horizon: u64) -> Result<Self> {
        if horizon < 1 {
            return Err(Error::invalid("horizon", "need at least one round"));
        }
        let kf = F::from_size(k);
        let df = F::from_size(dom.len());
        let hf = F::from_count(horizon);
        let ln_k = kf.ln();
        let third = F::from_f64(1.0 / 3.0).expect("const");
        let half = F::from_f64(0.5).expect("const");
        let gamma = ((kf * df * ln_k) / hf).powf(third).min(half);
        let eta = (gamma * ln_k / (hf * kf * df)).sqrt().min(gamma / df);
        Ok(Self {
            log_weights: vec![F::zero(); k],
            gamma,
            eta,
            horizon,
            explore_set: dom.members().to_vec(),
            round: 0,
        })
    }

    pub fn gamma(&self) -> F {
        self.gamma
    }

    pub fn eta(&self) -> F {
        self.eta
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    /// (1 - gamma) * softmax(log_weights) + gamma * uniform(explore_set).
    pub fn distribution(&self) -> ActionDistribution<F> {
        let k = self.log_weights.len();
        let max_lw = self
            .log_weights
            .iter()
            .copied()
            .fold(F::neg_infinity(), F::max);
        let exps: Vec<F> = self.log_weights.iter().map(|&w| (w - max_lw).exp()).collect();
        let total: F = exps.iter().copied().sum();
        let exploit: Vec<F> = exps.into_iter().map(|e| e / total).collect();

        let mut explore = vec![F::zero(); k];
        let share = F::one() / F::from_size(self.explore_set.len());
        for &j in &self.explore_set {
            explore[j] = share;
        }

        let probs: Vec<F> = (0..k)
            .map(|i| (F::one() - self.gamma) * exploit[i] + self.gamma * explore[i])
            .collect();
        ActionDistribution {
            probs,
            exploit_part: exploit,
            explore_part: explore,
            gamma: self.gamma,
        }
    }

    /// Importance-weighted gain update for every observed arm.
    pub fn update(
        &mut self,
        graph: &FeedbackGraph,
        obs: &RoundObservation<F>,
        dist: &ActionDistribution<F>,
    ) -> Result<()> {
        for &(arm, reward) in &obs.observed {
            let q = observation_prob(graph, &dist.probs, arm)?;
            if q.is_nan() || q <= F::zero() {
                return Err(Error::InternalState(format!(
                    "observation probability of observed arm {} is zero",
                    arm + 1
                )));
            }
            let gain = self.eta * reward / q;
            debug_assert!(
                gain <= F::one() + F::from_f64(1e-9).expect("const"),
                "eta * ghat must stay below 1"
            );
            self.log_weights[arm] += gain;
        }
        self.round += 1;
        Ok(())
    }
}

/// Standalone Exp3.G learner over a fixed graph.
#[derive(Debug, Clone)]
pub struct Exp3gPolicy<F> {
    graph: FeedbackGraph,
    state: Exp3gState<F>,
}

impl<F: Scalar> Exp3gPolicy<F> {
    pub fn new(graph: FeedbackGraph, dom: DominatingSet, horizon: u64) -> Result<Self> {
        let state = Exp3gState::new(graph.arm_count(), &dom, horizon)?;
        Ok(Self { graph, state })
    }

    pub fn state(&self) -> &Exp3gState<F> {
        &self.state
    }
}

impl<F: Scalar> Policy<F> for Exp3gPolicy<F> {
    fn arm_count(&self) -> usize {
        self.graph.arm_count()
    }

    fn distribution(&self) -> Result<ActionDistribution<F>> {
        Ok(self.state.distribution())
    }

    fn update(
        &mut self,
        obs: &RoundObservation<F>,
        dist: &ActionDistribution<F>,
    ) -> Result<RoundEvents> {
        self.state.update(&self.graph, obs, dist)?;
        Ok(RoundEvents::default())
    }
}
