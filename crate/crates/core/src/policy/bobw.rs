//! Best-of-both-worlds elimination policy for general graph feedback.
//!
//! The policy assumes a stochastic environment, explores through a dominating
//! set with a decaying mixture weight, eliminates arms whose
//! importance-weighted mean trails the leader by more than a concentration
//! threshold, keeps re-sampling deleted dominating arms at a decaying rate so
//! eliminated arms stay monitored, and hands off to Exp3.G the moment an
//! eliminated arm climbs back within its detection threshold — the signature
//! of an adversarial reward sequence.
//!
//! Per round t (1-based), with active set A and active dominating set D_A:
//!
//! * exploit part: uniform over A;
//! * explore part: uniform over D_A scaled to the mass not reserved for
//!   re-sampling, plus `u_j * tau^D_j / t` on each deleted dominating arm j,
//!   where u_j is the exploration probability j had when it was deleted;
//! * play probabilities: `(1 - gamma_t) * exploit + gamma_t * explore`.
//!
//! All estimator and probability arithmetic is generic over the scalar; the
//! harness instantiates `f64`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DominatingSet, FeedbackGraph};
use crate::policy::exp3g::Exp3gState;
use crate::policy::{observation_prob, ActionDistribution, Policy, RoundEvents, RoundObservation};
use crate::scalar::{KahanSum, Scalar};

/// Exploration weight `min(1, K^(2/3) |D|^(1/3) t^(-1/3))`.
///
/// The raw schedule exceeds 1 for t < K^2 |D|; clipping keeps it a valid
/// mixture weight while preserving it as an upper bound on exploration and a
/// lower bound on observation probabilities.
pub fn gamma_schedule<F: Scalar>(t: u64, k: usize, dom_size: usize) -> F {
    let kf = F::from_size(k);
    let df = F::from_size(dom_size);
    gamma_from_cubed_const(kf * kf * df, t)
}

/// min(1, (c^3 / t)^(1/3)) computed from the cubed constant, which keeps
/// boundary values like t = K^2 |D| exactly at 1.
fn gamma_from_cubed_const<F: Scalar>(cubed: F, t: u64) -> F {
    let third = F::from_f64(1.0 / 3.0).expect("const");
    (cubed / F::from_count(t)).powf(third).min(F::one())
}

/// Inputs fixed for a whole run.
#[derive(Debug, Clone)]
pub struct BobwParams<F> {
    graph: FeedbackGraph,
    dom: DominatingSet,
    delta: F,
    gamma_const: Option<F>,
}

impl<F: Scalar> BobwParams<F> {
    /// `dom` must be a valid dominating set of `graph`; `delta` in (0, 1).
    pub fn new(graph: FeedbackGraph, dom: DominatingSet, delta: F) -> Result<Self> {
        if !(delta > F::zero() && delta < F::one()) {
            return Err(Error::invalid("delta", format!("{delta} outside (0, 1)")));
        }
        // Re-validate the cover against this particular graph.
        let dom = DominatingSet::new(&graph, dom.members().to_vec())?;
        Ok(Self {
            graph,
            dom,
            delta,
            gamma_const: None,
        })
    }

    /// Replaces the schedule constant `K^(2/3) |D|^(1/3)` with an explicit
    /// value; the `t^(-1/3)` decay and the clip at 1 stay.
    pub fn with_gamma_const(mut self, c: F) -> Self {
        self.gamma_const = Some(c);
        self
    }

    pub fn graph(&self) -> &FeedbackGraph {
        &self.graph
    }

    pub fn dom(&self) -> &DominatingSet {
        &self.dom
    }

    pub fn delta(&self) -> F {
        self.delta
    }

    /// Exploration weight for round t.
    pub fn gamma(&self, t: u64) -> F {
        match self.gamma_const {
            Some(c) => gamma_from_cubed_const(c * c * c, t),
            None => gamma_schedule(t, self.graph.arm_count(), self.dom.len()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    #[serde(rename = "BOBW")]
    Bobw,
    #[serde(rename = "EXP3G")]
    Exp3g,
}

/// Mutable per-run state. Arms are Vec-indexed 0..K.
#[derive(Debug, Clone)]
struct BobwState<F> {
    active: Vec<bool>,
    n_active: usize,
    /// Subset of the dominating set still exploring; false for non-dom arms.
    active_dom: Vec<bool>,
    n_active_dom: usize,
    tau: Vec<Option<u64>>,
    tau_dom: Vec<Option<u64>>,
    tau_prime: Vec<Option<u64>>,
    frozen_u: Vec<Option<F>>,
    est: Vec<KahanSum<F>>,
    inv_gamma: Vec<F>,
    round: u64,
    phase: Phase,
    detect_round: Option<u64>,
}

/// The full policy: parameters, state, and the Exp3.G continuation once the
/// environment is flagged adversarial. Single-run, single-threaded; the value
/// may move between threads between operations.
#[derive(Debug, Clone)]
pub struct BobwPolicy<F> {
    params: BobwParams<F>,
    is_dom: Vec<bool>,
    horizon: u64,
    state: BobwState<F>,
    exp3g: Option<Exp3gState<F>>,
}

impl<F: Scalar> BobwPolicy<F> {
    /// `horizon` is the total number of rounds the harness will play; it is
    /// only used to size the Exp3.G phase after detection (residual horizon,
    /// cold start).
    pub fn new(params: BobwParams<F>, horizon: u64) -> Result<Self> {
        if horizon < 1 {
            return Err(Error::invalid("horizon", "need at least one round"));
        }
        let k = params.graph.arm_count();
        let mut is_dom = vec![false; k];
        for &j in params.dom.members() {
            is_dom[j] = true;
        }
        let state = BobwState {
            active: vec![true; k],
            n_active: k,
            active_dom: is_dom.clone(),
            n_active_dom: params.dom.len(),
            tau: vec![None; k],
            tau_dom: vec![None; k],
            tau_prime: vec![None; k],
            frozen_u: vec![None; k],
            est: vec![KahanSum::new(); k],
            inv_gamma: vec![F::zero(); k],
            round: 0,
            phase: Phase::Bobw,
            detect_round: None,
        };
        Ok(Self {
            params,
            is_dom,
            horizon,
            state,
            exp3g: None,
        })
    }

    pub fn params(&self) -> &BobwParams<F> {
        &self.params
    }

    /// Completed rounds.
    pub fn round(&self) -> u64 {
        self.state.round
    }

    pub fn phase(&self) -> Phase {
        self.state.phase
    }

    pub fn detect_round(&self) -> Option<u64> {
        self.state.detect_round
    }

    pub fn is_active(&self, arm: usize) -> bool {
        self.state.active[arm]
    }

    pub fn active_arms(&self) -> Vec<usize> {
        (0..self.arm_count()).filter(|&i| self.state.active[i]).collect()
    }

    pub fn active_dom_arms(&self) -> Vec<usize> {
        (0..self.arm_count())
            .filter(|&i| self.state.active_dom[i])
            .collect()
    }

    pub fn tau(&self, arm: usize) -> Option<u64> {
        self.state.tau[arm]
    }

    pub fn tau_dom(&self, arm: usize) -> Option<u64> {
        self.state.tau_dom[arm]
    }

    pub fn tau_prime(&self, arm: usize) -> Option<u64> {
        self.state.tau_prime[arm]
    }

    pub fn frozen_u(&self, arm: usize) -> Option<F> {
        self.state.frozen_u[arm]
    }

    fn arm_count(&self) -> usize {
        self.params.graph.arm_count()
    }

    /// Importance-weighted mean reward estimate after the completed rounds.
    pub fn estimate(&self, arm: usize) -> F {
        if self.state.round == 0 {
            return F::zero();
        }
        self.state.est[arm].value() / F::from_count(self.state.round)
    }

    /// Concentration radius of `arm`'s estimate after the completed rounds.
    pub fn radius(&self, arm: usize) -> F {
        self.radius_at(arm, self.state.round.max(1))
    }

    /// Radius at round t:
    ///
    /// sqrt( 4 * ( |D|/t^2 * sum_{s<=min(t, tau')} 1/gamma_s
    ///           + |D| * max(t - tau', 0) / (gamma_t * tau' * t) ) * ln(t/delta)
    ///     + 5 |D|^2 / (gamma_t^2 * min(t^2, tau'^2)) * ln^2(t/delta) )
    ///
    /// with an unset tau' treated as +infinity: the truncated sum runs to t,
    /// the middle term vanishes, and min(t^2, tau'^2) = t^2.
    fn radius_at(&self, arm: usize, t: u64) -> F {
        let d = F::from_size(self.params.dom.len());
        let tf = F::from_count(t);
        let log_term = (tf / self.params.delta).ln();
        let gamma_t = self.params.gamma(t);
        let four = F::from_f64(4.0).expect("const");
        let five = F::from_f64(5.0).expect("const");

        let mut variance = d / (tf * tf) * self.state.inv_gamma[arm];
        let min_sq = match self.state.tau_prime[arm] {
            Some(tp) if tp < t => {
                let tpf = F::from_count(tp);
                variance += d * (tf - tpf) / (gamma_t * tpf * tf);
                tpf * tpf
            }
            _ => tf * tf,
        };
        let bias = five * d * d / (gamma_t * gamma_t * min_sq) * log_term * log_term;
        (four * variance * log_term + bias).sqrt()
    }

    /// Leader j' = argmax over active arms of the estimate, smallest index on
    /// ties. The active set is never empty.
    fn leader(&self, estimates: &[F]) -> usize {
        let mut best = None;
        for i in 0..self.arm_count() {
            if !self.state.active[i] {
                continue;
            }
            match best {
                None => best = Some(i),
                Some(b) if estimates[i] > estimates[b] => best = Some(i),
                _ => {}
            }
        }
        best.expect("active set is never empty")
    }

    fn estimates_at(&self, t: u64) -> Vec<F> {
        let tf = F::from_count(t);
        self.state.est.iter().map(|s| s.value() / tf).collect()
    }

    /// Action distribution for the round about to be played.
    pub fn action_distribution(&self) -> Result<ActionDistribution<F>> {
        match self.state.phase {
            Phase::Exp3g => Ok(self
                .exp3g
                .as_ref()
                .expect("EXP3G phase carries a state")
                .distribution()),
            Phase::Bobw => self.bobw_distribution(),
        }
    }

    fn bobw_distribution(&self) -> Result<ActionDistribution<F>> {
        let k = self.arm_count();
        let st = &self.state;
        if st.n_active == 0 {
            return Err(Error::InternalState("active set is empty".into()));
        }
        let t = st.round + 1;
        let tf = F::from_count(t);
        let gamma = self.params.gamma(t);

        let exploit_share = F::one() / F::from_size(st.n_active);
        let exploit: Vec<F> = (0..k)
            .map(|i| if st.active[i] { exploit_share } else { F::zero() })
            .collect();

        // Re-sampling mass for deleted dominating arms: u_j * tau^D_j / t.
        let mut explore = vec![F::zero(); k];
        let mut resample_sum = F::zero();
        for &j in self.params.dom.members() {
            if st.active_dom[j] {
                continue;
            }
            let u = st.frozen_u[j].ok_or_else(|| {
                Error::InternalState(format!("deleted dominating arm {} has no frozen u", j + 1))
            })?;
            let td = st.tau_dom[j].ok_or_else(|| {
                Error::InternalState(format!("deleted dominating arm {} has no tau^D", j + 1))
            })?;
            explore[j] = u * F::from_count(td) / tf;
            resample_sum += explore[j];
        }
        if st.n_active_dom > 0 {
            // Mass left for the still-active dominating arms, clamped at 0
            // against floating-point undershoot.
            let normalizer = (F::one() - resample_sum).max(F::zero());
            let share = normalizer / F::from_size(st.n_active_dom);
            for &j in self.params.dom.members() {
                if st.active_dom[j] {
                    explore[j] = share;
                }
            }
        }
        let explore_sum: F = explore.iter().copied().sum();
        if explore_sum > F::one() {
            // Only reachable through the clamp above.
            for e in explore.iter_mut() {
                *e /= explore_sum;
            }
        }
        let explore_total: F = explore.iter().copied().sum();
        // Once D_A empties, the explore part sums below 1; the leftover
        // exploration mass goes to the exploit part so the re-sampling
        // probabilities of deleted arms stay exactly gamma * u_j * tau^D_j / t.
        let deficit = (F::one() - explore_total).max(F::zero());

        let probs: Vec<F> = (0..k)
            .map(|i| {
                (F::one() - gamma) * exploit[i]
                    + gamma * explore[i]
                    + gamma * deficit * exploit[i]
            })
            .collect();

        let dist = ActionDistribution {
            probs,
            exploit_part: exploit,
            explore_part: explore,
            gamma,
        };
        // 1e-12 at f64; scaled by machine epsilon for other precisions.
        debug_assert!(dist
            .check_simplex(F::epsilon() * F::from_f64(4505.0).expect("const"))
            .is_ok());
        Ok(dist)
    }

    /// Folds one round's observations into the running sums. Does not advance
    /// the round counter; `step` owns the full pipeline.
    fn observe_update(&mut self, obs: &RoundObservation<F>, dist: &ActionDistribution<F>) -> Result<()> {
        let t = self.state.round + 1;
        for &(arm, reward) in &obs.observed {
            let q = observation_prob(&self.params.graph, &dist.probs, arm)?;
            if q.is_nan() || q <= F::zero() {
                return Err(Error::InternalState(format!(
                    "observation probability of observed arm {} is zero",
                    arm + 1
                )));
            }
            #[cfg(debug_assertions)]
            {
                // 1/q <= |D|/gamma_t * max(1, t/tau'), the importance weight bound.
                let d = F::from_size(self.params.dom.len());
                let gamma_t = self.params.gamma(t);
                let stretch = match self.state.tau_prime[arm] {
                    Some(tp) if tp < t => F::from_count(t) / F::from_count(tp),
                    _ => F::one(),
                };
                let bound = d / gamma_t * stretch;
                let slack = F::from_f64(1.0 + 1e-9).expect("const");
                debug_assert!(
                    F::one() / q <= bound * slack,
                    "importance weight {} exceeds bound {}",
                    F::one() / q,
                    bound
                );
            }
            self.state.est[arm].add(reward / q);
        }
        let inv = F::one() / self.params.gamma(t);
        for i in 0..self.arm_count() {
            let accumulating = match self.state.tau_prime[i] {
                None => true,
                Some(tp) => tp >= t,
            };
            if accumulating {
                self.state.inv_gamma[i] += inv;
            }
        }
        Ok(())
    }

    /// Removes every active arm whose estimate trails the leader by more than
    /// `5 * radius(leader) + 3 * radius(arm)`. The leader itself never goes.
    fn elimination_scan(&mut self, t: u64) -> Vec<usize> {
        let estimates = self.estimates_at(t);
        let leader = self.leader(&estimates);
        let r_leader = self.radius_at(leader, t);
        let five = F::from_f64(5.0).expect("const");
        let three = F::from_f64(3.0).expect("const");
        let mut eliminated = Vec::new();
        for i in 0..self.arm_count() {
            if !self.state.active[i] || i == leader {
                continue;
            }
            let threshold = five * r_leader + three * self.radius_at(i, t);
            if estimates[leader] - estimates[i] > threshold {
                self.state.active[i] = false;
                self.state.n_active -= 1;
                self.state.tau[i] = Some(t);
                eliminated.push(i);
            }
        }
        eliminated
    }

    /// Deletes dominating arms with no active out-neighbor left to observe —
    /// all of them once a single candidate remains — freezing the exploration
    /// probability they held this round.
    fn dominating_scan(&mut self, t: u64, dist: &ActionDistribution<F>) -> Vec<usize> {
        let mut deleted = Vec::new();
        for &j in self.params.dom.members() {
            if !self.state.active_dom[j] {
                continue;
            }
            let no_active_target = self
                .params
                .graph
                .out_neighbors(j)
                .expect("dominating arm is in range")
                .iter()
                .all(|&i| !self.state.active[i]);
            if self.state.n_active == 1 || no_active_target {
                self.state.active_dom[j] = false;
                self.state.n_active_dom -= 1;
                self.state.tau_dom[j] = Some(t);
                self.state.frozen_u[j] = Some(dist.explore_part[j]);
                deleted.push(j);
            }
        }
        deleted
    }

    /// Records tau'_i = t for every arm whose dominating in-neighbors have now
    /// all been deleted.
    fn tau_prime_scan(&mut self, t: u64) -> Vec<usize> {
        let mut assigned = Vec::new();
        for i in 0..self.arm_count() {
            if self.state.tau_prime[i].is_some() {
                continue;
            }
            let mut has_dominator = false;
            let mut all_deleted = true;
            for &j in self
                .params
                .graph
                .in_neighbors(i)
                .expect("arm index in range")
            {
                if !self.is_dom[j] {
                    continue;
                }
                has_dominator = true;
                if self.state.tau_dom[j].is_none_or(|td| td > t) {
                    all_deleted = false;
                    break;
                }
            }
            debug_assert!(has_dominator, "cover property: every arm has a dominator");
            if has_dominator && all_deleted {
                self.state.tau_prime[i] = Some(t);
                assigned.push(i);
            }
        }
        assigned
    }

    /// True iff some eliminated arm is back within `3 * radius(leader) +
    /// radius(arm)` of the leader — evidence the environment is not
    /// stochastic.
    fn adversary_check(&self, t: u64) -> bool {
        let estimates = self.estimates_at(t);
        let leader = self.leader(&estimates);
        let r_leader = self.radius_at(leader, t);
        let three = F::from_f64(3.0).expect("const");
        for i in 0..self.arm_count() {
            if self.state.active[i] {
                continue;
            }
            let threshold = three * r_leader + self.radius_at(i, t);
            if estimates[leader] - estimates[i] <= threshold {
                return true;
            }
        }
        false
    }

    /// One full round: estimator update, elimination scan, dominating-set
    /// scan, tau' scan, adversary check — in that order — then the round
    /// counter advances. On detection the policy switches to Exp3.G over the
    /// residual horizon with a cold start.
    pub fn step(
        &mut self,
        obs: &RoundObservation<F>,
        dist: &ActionDistribution<F>,
    ) -> Result<RoundEvents> {
        if self.state.phase != Phase::Bobw {
            return Err(Error::InternalState(
                "step called after the Exp3.G handoff".into(),
            ));
        }
        let t = self.state.round + 1;
        self.observe_update(obs, dist)?;
        let eliminated = self.elimination_scan(t);
        let dom_deleted = self.dominating_scan(t, dist);
        let tau_prime_set = self.tau_prime_scan(t);
        let detected = self.adversary_check(t);
        if detected {
            self.state.phase = Phase::Exp3g;
            self.state.detect_round = Some(t);
            let residual = self.horizon.saturating_sub(t).max(1);
            self.exp3g = Some(Exp3gState::new(
                self.arm_count(),
                &self.params.dom,
                residual,
            )?);
        }
        self.state.round = t;
        Ok(RoundEvents {
            eliminated,
            dom_deleted,
            tau_prime_set,
            detected,
        })
    }

    /// Debug/resume snapshot with 1-indexed arms. Restoring and replaying
    /// with the same random streams reproduces the run exactly.
    pub fn snapshot(&self) -> BobwSnapshot<F> {
        let st = &self.state;
        let to_map = |v: &Vec<Option<u64>>| {
            v.iter()
                .enumerate()
                .filter_map(|(i, t)| t.map(|t| (i + 1, t)))
                .collect::<BTreeMap<usize, u64>>()
        };
        BobwSnapshot {
            round: st.round,
            phase: st.phase,
            active: (0..self.arm_count()).filter(|&i| st.active[i]).map(|i| i + 1).collect(),
            active_dom: (0..self.arm_count())
                .filter(|&i| st.active_dom[i])
                .map(|i| i + 1)
                .collect(),
            tau: to_map(&st.tau),
            tau_dom: to_map(&st.tau_dom),
            tau_prime: to_map(&st.tau_prime),
            frozen_u: st
                .frozen_u
                .iter()
                .enumerate()
                .filter_map(|(i, u)| u.map(|u| (i + 1, u)))
                .collect(),
            est_sum: st.est.iter().map(|s| s.sum).collect(),
            est_comp: st.est.iter().map(|s| s.comp).collect(),
            inv_gamma_sum: st.inv_gamma.clone(),
            detect_round: st.detect_round,
            exp3g: self.exp3g.clone(),
        }
    }

    /// Rebuilds a policy from a snapshot taken with the same parameters and
    /// horizon.
    pub fn restore(params: BobwParams<F>, horizon: u64, snap: &BobwSnapshot<F>) -> Result<Self> {
        let mut policy = Self::new(params, horizon)?;
        let k = policy.arm_count();
        let expect_len = |name: &str, len: usize| {
            if len != k {
                Err(Error::invalid(
                    "snapshot",
                    format!("{name} has {len} entries, expected {k}"),
                ))
            } else {
                Ok(())
            }
        };
        expect_len("est_sum", snap.est_sum.len())?;
        expect_len("est_comp", snap.est_comp.len())?;
        expect_len("inv_gamma_sum", snap.inv_gamma_sum.len())?;
        let st = &mut policy.state;
        st.round = snap.round;
        st.phase = snap.phase;
        st.detect_round = snap.detect_round;
        st.active = vec![false; k];
        for &arm in &snap.active {
            check_external_arm(arm, k)?;
            st.active[arm - 1] = true;
        }
        st.n_active = snap.active.len();
        st.active_dom = vec![false; k];
        for &arm in &snap.active_dom {
            check_external_arm(arm, k)?;
            st.active_dom[arm - 1] = true;
        }
        st.n_active_dom = snap.active_dom.len();
        let from_map = |m: &BTreeMap<usize, u64>| -> Result<Vec<Option<u64>>> {
            let mut v = vec![None; k];
            for (&arm, &t) in m {
                check_external_arm(arm, k)?;
                v[arm - 1] = Some(t);
            }
            Ok(v)
        };
        st.tau = from_map(&snap.tau)?;
        st.tau_dom = from_map(&snap.tau_dom)?;
        st.tau_prime = from_map(&snap.tau_prime)?;
        st.frozen_u = vec![None; k];
        for (&arm, &u) in &snap.frozen_u {
            check_external_arm(arm, k)?;
            st.frozen_u[arm - 1] = Some(u);
        }
        st.est = snap
            .est_sum
            .iter()
            .zip(&snap.est_comp)
            .map(|(&sum, &comp)| KahanSum { sum, comp })
            .collect();
        st.inv_gamma = snap.inv_gamma_sum.clone();
        policy.exp3g = snap.exp3g.clone();
        if st.phase == Phase::Exp3g && policy.exp3g.is_none() {
            return Err(Error::invalid(
                "snapshot",
                "EXP3G phase without an exp3g state",
            ));
        }
        Ok(policy)
    }
}

fn check_external_arm(arm: usize, k: usize) -> Result<()> {
    if arm == 0 || arm > k {
        return Err(Error::ArmOutOfRange { arm, k });
    }
    Ok(())
}

/// Serialized policy state; arms 1-indexed, estimator sums carried with their
/// compensation terms so a resumed run is bit-identical.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BobwSnapshot<F> {
    pub round: u64,
    pub phase: Phase,
    pub active: Vec<usize>,
    pub active_dom: Vec<usize>,
    pub tau: BTreeMap<usize, u64>,
    pub tau_dom: BTreeMap<usize, u64>,
    pub tau_prime: BTreeMap<usize, u64>,
    pub frozen_u: BTreeMap<usize, F>,
    pub est_sum: Vec<F>,
    pub est_comp: Vec<F>,
    pub inv_gamma_sum: Vec<F>,
    pub detect_round: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exp3g: Option<Exp3gState<F>>,
}

impl<F: Scalar> Policy<F> for BobwPolicy<F> {
    fn arm_count(&self) -> usize {
        self.params.graph.arm_count()
    }

    fn distribution(&self) -> Result<ActionDistribution<F>> {
        self.action_distribution()
    }

    fn update(
        &mut self,
        obs: &RoundObservation<F>,
        dist: &ActionDistribution<F>,
    ) -> Result<RoundEvents> {
        match self.state.phase {
            Phase::Bobw => self.step(obs, dist),
            Phase::Exp3g => {
                let graph = &self.params.graph;
                self.exp3g
                    .as_mut()
                    .expect("EXP3G phase carries a state")
                    .update(graph, obs, dist)?;
                self.state.round += 1;
                Ok(RoundEvents::default())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{greedy_dominating_set, make_graph, GraphFamily};
    use crate::rng::StreamRng;

    fn clique_policy(k: usize, delta: f64, horizon: u64) -> BobwPolicy<f64> {
        let graph = make_graph(GraphFamily::CliqueLoops, k, None, None).unwrap();
        let dom = greedy_dominating_set(&graph).unwrap();
        BobwPolicy::new(BobwParams::new(graph, dom, delta).unwrap(), horizon).unwrap()
    }

    /// Plays one round against a fixed reward vector, returning the events.
    fn play_round(policy: &mut BobwPolicy<f64>, rng: &mut StreamRng, rewards: &[f64]) -> RoundEvents {
        let dist = policy.action_distribution().unwrap();
        let chosen = dist.sample(rng);
        let obs = RoundObservation::from_rewards(policy.params().graph(), chosen, rewards).unwrap();
        policy.step(&obs, &dist).unwrap()
    }

    #[test]
    fn gamma_schedule_values() {
        assert!((gamma_schedule::<f64>(512, 8, 1) - 0.5).abs() < 1e-12);
        assert_eq!(gamma_schedule::<f64>(8, 8, 1), 1.0, "raw value 2 clips to 1");
        assert_eq!(gamma_schedule::<f64>(64, 8, 1), 1.0, "boundary hits 1 exactly");
        // Nonincreasing in t.
        let mut prev = f64::INFINITY;
        for t in 1..2000 {
            let g = gamma_schedule::<f64>(t, 5, 3);
            assert!(g <= prev + 1e-15);
            prev = g;
        }
    }

    #[test]
    fn first_round_of_clique_plays_the_dominating_arm() {
        // K=3 clique, D={1}: gamma_1 clips to 1 and all mass sits on arm 1.
        let policy = clique_policy(3, 0.05, 1000);
        let dist = policy.action_distribution().unwrap();
        assert_eq!(dist.probs, vec![1.0, 0.0, 0.0]);
        assert_eq!(dist.gamma, 1.0);
    }

    #[test]
    fn explore_part_resamples_deleted_dominating_arms() {
        // D = {1, 2}, arm 1 deleted at tau^D = 10 with u = 0.5, now t = 20:
        // explore = (0.25, 0.75, 0, ...).
        let graph = FeedbackGraph::new(
            4,
            &[(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (1, 3), (2, 0), (3, 0)],
        )
        .unwrap();
        let dom = DominatingSet::new(&graph, vec![0, 1]).unwrap();
        let params = BobwParams::new(graph, dom, 0.05f64).unwrap();
        let mut policy = BobwPolicy::new(params, 1000).unwrap();
        policy.state.round = 19; // next round is t = 20
        policy.state.active_dom[0] = false;
        policy.state.n_active_dom = 1;
        policy.state.tau_dom[0] = Some(10);
        policy.state.frozen_u[0] = Some(0.5);
        let dist = policy.action_distribution().unwrap();
        assert!((dist.explore_part[0] - 0.25).abs() < 1e-15);
        assert!((dist.explore_part[1] - 0.75).abs() < 1e-15);
        assert_eq!(dist.explore_part[2], 0.0);
        assert_eq!(dist.explore_part[3], 0.0);
        dist.check_simplex(1e-12).unwrap();
    }

    #[test]
    fn untouched_dominating_set_mixes_two_uniforms() {
        let graph = make_graph(GraphFamily::Bar, 4, None, None).unwrap();
        let dom = greedy_dominating_set(&graph).unwrap();
        assert_eq!(dom.len(), 4);
        let params = BobwParams::new(graph, dom, 0.1).unwrap();
        let mut policy = BobwPolicy::new(params, 1000).unwrap();
        policy.state.round = 499;
        let t = 500u64;
        let gamma = policy.params().gamma(t);
        assert!(gamma < 1.0);
        let dist = policy.action_distribution().unwrap();
        let explore_sum: f64 = dist.explore_part.iter().sum();
        assert!((explore_sum - 1.0).abs() < 1e-12);
        for i in 0..4 {
            let expected = (1.0 - gamma) * 0.25 + gamma * 0.25;
            assert!((dist.probs[i] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn observe_update_applies_importance_weights() {
        // K=2 clique: q(i) = 1 under any distribution, increments equal raw
        // rewards.
        let mut policy = clique_policy(2, 0.05, 100);
        let dist = policy.action_distribution().unwrap();
        let obs = RoundObservation::from_rewards(policy.params().graph(), 0, &[0.7, 0.2]).unwrap();
        policy.step(&obs, &dist).unwrap();
        assert!((policy.estimate(0) - 0.7).abs() < 1e-15);
        assert!((policy.estimate(1) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn unobserved_arms_keep_their_sums_and_weights_invert_q() {
        // in(2) = in(3) = {1}; with probs(1) = 0.25 an observed reward r adds
        // exactly r / 0.25 to those sums.
        let graph = FeedbackGraph::new(3, &[(0, 0), (0, 1), (0, 2), (1, 0), (2, 0)]).unwrap();
        let dom = DominatingSet::new(&graph, vec![0]).unwrap();
        let params = BobwParams::new(graph, dom, 0.05).unwrap();
        let mut policy = BobwPolicy::new(params, 10_000).unwrap();
        // Late enough that 1/q = 4 respects the |D|/gamma_t weight cap.
        policy.state.round = 999;
        let dist = ActionDistribution {
            probs: vec![0.25, 0.5, 0.25],
            exploit_part: vec![1.0 / 3.0; 3],
            explore_part: vec![1.0, 0.0, 0.0],
            gamma: 0.25,
        };
        let obs = RoundObservation {
            chosen: 0,
            chosen_reward: 0.0,
            observed: vec![(0, 0.0), (1, 0.5), (2, 1.0)],
        };
        policy.observe_update(&obs, &dist).unwrap();
        assert_eq!(policy.state.est[2].value(), 4.0);
        assert_eq!(policy.state.est[1].value(), 2.0);

        // An arm absent from the observations is untouched.
        let before = policy.state.est[1].value();
        let obs = RoundObservation {
            chosen: 1,
            chosen_reward: 0.9,
            observed: vec![(0, 0.9)],
        };
        let dist2 = policy.action_distribution().unwrap();
        policy.observe_update(&obs, &dist2).unwrap();
        assert_eq!(policy.state.est[1].value(), before);
    }

    #[test]
    fn radius_matches_the_closed_form() {
        // t=4, gamma_s = 1 for all s <= 4 (clipped regime), |D| = 2, delta =
        // 0.05, tau' unset: radius = sqrt(4 * 0.5 * ln 80 + 1.25 * ln^2 80).
        // Arms 1 and 2 jointly cover all four arms.
        let graph = FeedbackGraph::new(4, &[(0, 0), (0, 1), (1, 2), (1, 3)]).unwrap();
        let dom = DominatingSet::new(&graph, vec![0, 1]).unwrap();
        assert_eq!(dom.len(), 2);
        let params = BobwParams::new(graph, dom, 0.05).unwrap();
        // K^2 |D| = 32 >= 4 so gamma is clipped at 1 through t = 4.
        let mut policy = BobwPolicy::new(params, 100).unwrap();
        let mut rng = StreamRng::new(1, "policy", 0);
        for _ in 0..4 {
            play_round(&mut policy, &mut rng, &[0.5, 0.5, 0.5, 0.5]);
        }
        assert_eq!(policy.round(), 4);
        assert_eq!(policy.state.inv_gamma[0], 4.0);
        let ln80 = (4.0f64 / 0.05).ln();
        let expected = (4.0 * (2.0 / 16.0 * 4.0) * ln80 + 5.0 * 4.0 / 16.0 * ln80 * ln80).sqrt();
        let r = policy.radius(0);
        assert!((r - expected).abs() < 1e-12, "radius {r} vs oracle {expected}");
        assert!((r - 5.72).abs() < 0.01);
    }

    #[test]
    fn radius_is_shared_while_tau_prime_is_unset() {
        let mut policy = clique_policy(5, 0.05, 10_000);
        let mut rng = StreamRng::new(2, "policy", 0);
        for t in 0..200 {
            let r = if t % 3 == 0 { 0.9 } else { 0.1 };
            play_round(&mut policy, &mut rng, &[r, 0.2, 0.4, 0.6, 0.8]);
        }
        let r0 = policy.radius(0);
        for i in 1..5 {
            assert_eq!(policy.tau_prime(i), None);
            assert_eq!(policy.radius(i), r0);
        }
    }

    #[test]
    fn radius_limit_behavior() {
        // tau' unset: the radius decays to zero as t grows.
        let mut policy = clique_policy(3, 0.05, 8_000_000);
        let schedule_inv_sum =
            |t: u64| -> f64 { (1..=t).map(|s| 1.0 / gamma_schedule::<f64>(s, 3, 1)).sum() };
        policy.state.round = 10_000;
        policy.state.inv_gamma = vec![schedule_inv_sum(10_000); 3];
        let r_10k = policy.radius(0);
        policy.state.round = 1_000_000;
        policy.state.inv_gamma = vec![schedule_inv_sum(1_000_000); 3];
        let r_1m = policy.radius(0);
        assert!(r_1m < r_10k);
        assert!(r_1m < 0.05, "radius {r_1m} should be near zero at t = 10^6");

        // Fixed finite tau': once every dominator of the arm is deleted, its
        // observation probability decays like gamma_t * tau'/t, so the
        // re-sampling variance term |D| (t - tau') / (gamma_t tau' t) grows
        // like t^(1/3) and the radius widens again. Checked numerically so
        // the formula's regimes stay pinned.
        policy.state.tau_prime = vec![Some(500); 3];
        policy.state.inv_gamma = vec![schedule_inv_sum(500); 3];
        policy.state.round = 1_000_000;
        let r_fixed_1m = policy.radius(0);
        policy.state.round = 8_000_000;
        let r_fixed_8m = policy.radius(0);
        assert!(r_fixed_1m > r_1m);
        assert!(r_fixed_8m > r_fixed_1m);
    }

    #[test]
    fn elimination_condition_follows_the_five_three_rule() {
        let mut policy = clique_policy(2, 0.05, 1_000_000);
        // Rig round and sums directly; the scan is pure arithmetic over them.
        let t = 200_000u64;
        policy.state.round = t;
        policy.state.inv_gamma = vec![0.75 * (t as f64).powf(4.0 / 3.0) / 4f64.powf(1.0 / 3.0); 2];
        let r = policy.radius_at(0, t);
        assert!(r < 0.125, "radius small enough to separate a unit gap");
        // Gap just below the threshold: nothing happens.
        policy.state.est[0] = KahanSum { sum: (t as f64) * 8.0 * r * 0.99, comp: 0.0 };
        policy.state.est[1] = KahanSum { sum: 0.0, comp: 0.0 };
        assert!(policy.elimination_scan(t).is_empty());
        // Gap just above: arm 2 goes, arm 1 (the leader) stays.
        policy.state.est[0] = KahanSum { sum: (t as f64) * 8.0 * r * 1.01, comp: 0.0 };
        let gone = policy.elimination_scan(t);
        assert_eq!(gone, vec![1]);
        assert!(policy.is_active(0));
        assert_eq!(policy.tau(1), Some(t));
    }

    #[test]
    fn equal_estimates_never_eliminate() {
        let mut policy = clique_policy(4, 0.05, 1000);
        let mut rng = StreamRng::new(3, "policy", 0);
        for _ in 0..50 {
            play_round(&mut policy, &mut rng, &[0.5; 4]);
        }
        assert_eq!(policy.active_arms(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn dominating_scan_fires_on_lost_targets_and_lone_active_arm() {
        // D = {1, 2}: out(1) = {2}, out(2) = {1, 2, 3}.
        let graph = FeedbackGraph::new(3, &[(0, 1), (1, 0), (1, 1), (1, 2), (2, 1)]).unwrap();
        let dom = DominatingSet::new(&graph, vec![0, 1]).unwrap();
        let params = BobwParams::new(graph, dom, 0.05).unwrap();
        let mut policy = BobwPolicy::new(params, 1000).unwrap();
        policy.state.round = 6; // scanning round t = 7
        let dist = policy.action_distribution().unwrap();

        // Arm 2 (the only out-neighbor of dominating arm 1) eliminated: arm 1
        // is deleted and freezes this round's exploration probability.
        policy.state.active[1] = false;
        policy.state.n_active = 2;
        let deleted = policy.dominating_scan(7, &dist);
        assert_eq!(deleted, vec![0]);
        assert_eq!(policy.tau_dom(0), Some(7));
        assert_eq!(policy.frozen_u(0), Some(dist.explore_part[0]));
        // Dominating arm 2 still has active out-neighbors and |A| = 2.
        assert!(policy.state.active_dom[1]);

        // Down to one active arm: the scan empties D_A unconditionally.
        policy.state.active[2] = false;
        policy.state.n_active = 1;
        let deleted = policy.dominating_scan(7, &dist);
        assert_eq!(deleted, vec![1]);
        assert_eq!(policy.active_dom_arms(), Vec::<usize>::new());
    }

    #[test]
    fn tau_prime_tracks_the_last_dominator_deletion() {
        // Arm 3 dominated only by arm 1; arm 2 dominated by arms 1 and 2.
        let graph =
            FeedbackGraph::new(3, &[(0, 0), (0, 1), (0, 2), (1, 1), (1, 0), (2, 0)]).unwrap();
        let dom = DominatingSet::new(&graph, vec![0, 1]).unwrap();
        let params = BobwParams::new(graph, dom, 0.05).unwrap();
        let mut policy = BobwPolicy::new(params, 1000).unwrap();

        // Dominator 1 deleted at t = 7: arm 3 (covered only by 1) gets tau' = 7.
        policy.state.active_dom[0] = false;
        policy.state.n_active_dom = 1;
        policy.state.tau_dom[0] = Some(7);
        let set = policy.tau_prime_scan(7);
        assert_eq!(set, vec![2]);
        assert_eq!(policy.tau_prime(2), Some(7));
        // Arm 2 still has dominator 2 active: tau' stays unset.
        assert_eq!(policy.tau_prime(1), None);

        // Second dominator goes at t = 9: every remaining tau' is assigned.
        policy.state.active_dom[1] = false;
        policy.state.n_active_dom = 0;
        policy.state.tau_dom[1] = Some(9);
        let set = policy.tau_prime_scan(9);
        assert_eq!(set, vec![0, 1]);
        assert_eq!(policy.tau_prime(0), Some(9));
        assert_eq!(policy.tau_prime(1), Some(9));
    }

    #[test]
    fn adversary_check_is_vacuous_without_eliminations() {
        let mut policy = clique_policy(3, 0.05, 1000);
        let mut rng = StreamRng::new(4, "policy", 0);
        for _ in 0..100 {
            let ev = play_round(&mut policy, &mut rng, &[0.9, 0.1, 0.5]);
            assert!(!ev.detected);
        }
        assert_eq!(policy.phase(), Phase::Bobw);
    }

    #[test]
    fn adversary_check_thresholds() {
        let mut policy = clique_policy(2, 0.05, 1_000_000);
        let t = 200_000u64;
        policy.state.round = t;
        policy.state.inv_gamma = vec![0.75 * (t as f64).powf(4.0 / 3.0) / 4f64.powf(1.0 / 3.0); 2];
        policy.state.active[1] = false;
        policy.state.n_active = 1;
        policy.state.tau[1] = Some(t - 1000);
        let r = policy.radius_at(0, t);

        // Gap midway between the deletion threshold (8r) and the detection
        // threshold (4r): no detection.
        policy.state.est[0] = KahanSum { sum: (t as f64) * 6.0 * r, comp: 0.0 };
        policy.state.est[1] = KahanSum { sum: 0.0, comp: 0.0 };
        assert!(!policy.adversary_check(t));

        // A deleted arm whose estimate climbed back level with the leader.
        policy.state.est[1] = KahanSum { sum: policy.state.est[0].sum, comp: 0.0 };
        assert!(policy.adversary_check(t));
    }

    #[test]
    fn two_arm_run_eliminates_then_detects_after_a_reward_flip() {
        // Deterministic rewards (1, 0): arm 2 is eliminated once the radii
        // shrink below 1/8. After the flip to (0, 1) its estimate climbs back
        // and the policy must detect and switch to Exp3.G.
        let horizon = 400_000u64;
        let mut policy = clique_policy(2, 0.05, horizon);
        let mut rng = StreamRng::new(5, "policy", 0);
        let mut elim_round = None;
        let mut t = 0u64;
        while elim_round.is_none() {
            t += 1;
            assert!(t < 200_000, "elimination should fire well before t = 200k");
            let ev = play_round(&mut policy, &mut rng, &[1.0, 0.0]);
            if !ev.eliminated.is_empty() {
                assert_eq!(ev.eliminated, vec![1]);
                elim_round = Some(t);
                // Lone active arm: the same round's scan empties D_A and
                // assigns every tau'.
                assert_eq!(ev.dom_deleted, vec![0]);
                assert_eq!(ev.tau_prime_set, vec![0, 1]);
                assert_eq!(policy.tau_prime(0), Some(t));
            }
        }
        let elim = elim_round.unwrap();
        assert_eq!(policy.tau(1), Some(elim));
        assert_eq!(policy.active_arms(), vec![0]);

        // With D_A empty, the deleted dominating arm is re-sampled with mass
        // exactly u * tau^D / t and the leftover exploration goes to the
        // surviving arm; the eliminated arm itself is never played.
        let dist = policy.action_distribution().unwrap();
        let t_next = (policy.round() + 1) as f64;
        let expected =
            policy.frozen_u(0).unwrap() * policy.tau_dom(0).unwrap() as f64 / t_next;
        assert!((dist.explore_part[0] - expected).abs() < 1e-15);
        assert_eq!(dist.probs[1], 0.0);
        dist.check_simplex(1e-12).unwrap();

        // Flip the environment; the eliminated arm's running mean rises while
        // the leader's falls until the detection condition fires.
        let mut detected_at = None;
        while detected_at.is_none() {
            t += 1;
            assert!(t < horizon, "detection should fire before the horizon");
            let ev = play_round(&mut policy, &mut rng, &[0.0, 1.0]);
            if ev.detected {
                detected_at = Some(t);
            }
        }
        assert_eq!(policy.phase(), Phase::Exp3g);
        assert_eq!(policy.detect_round(), detected_at);

        // After the handoff the policy runs Exp3.G and rejects further steps.
        let dist = policy.action_distribution().unwrap();
        dist.check_simplex(1e-12).unwrap();
        let obs = RoundObservation::from_rewards(policy.params().graph(), 0, &[0.0, 1.0]).unwrap();
        assert!(policy.step(&obs, &dist).is_err());
        let ev = policy.update(&obs, &dist).unwrap();
        assert!(ev.is_empty());
    }

    #[test]
    fn monotone_structure_and_argmax_safety_over_noisy_runs() {
        for seed in 0..10 {
            let graph = make_graph(GraphFamily::RandomObservable, 6, Some(0.3), Some(seed)).unwrap();
            let dom = greedy_dominating_set(&graph).unwrap();
            let params = BobwParams::new(graph.clone(), dom, 0.05).unwrap();
            // A generous gamma constant forces early eliminations so the
            // monotonicity claims are exercised, not vacuous.
            let params = params.with_gamma_const(2.0);
            let mut policy = BobwPolicy::new(params, 3_000).unwrap();
            let mut rng = StreamRng::new(seed, "policy", 1);
            let mut rewards_rng = StreamRng::new(seed, "rewards", 1);
            let means = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
            let mut prev_active = policy.active_arms();
            let mut prev_dom = policy.active_dom_arms();
            for _ in 0..3_000 {
                if policy.phase() != Phase::Bobw {
                    break;
                }
                let rewards: Vec<f64> = means
                    .iter()
                    .map(|&m| if rewards_rng.bernoulli(m * 0.9 + 0.05) { 1.0 } else { 0.0 })
                    .collect();
                let dist = policy.action_distribution().unwrap();
                dist.check_simplex(1e-12).unwrap();
                let chosen = dist.sample(&mut rng);
                let obs = RoundObservation::from_rewards(&graph, chosen, &rewards).unwrap();
                let estimates = policy.estimates_at(policy.round().max(1));
                let leader_before = policy.leader(&estimates);
                let ev = policy.step(&obs, &dist).unwrap();
                // The pre-scan leader always survives the scan that used it.
                assert!(!ev.eliminated.contains(&leader_before));
                // Active sets only shrink.
                let active = policy.active_arms();
                assert!(active.iter().all(|a| prev_active.contains(a)));
                assert!(!active.is_empty());
                let dom_now = policy.active_dom_arms();
                assert!(dom_now.iter().all(|a| prev_dom.contains(a)));
                // tau' respects every dominator's deletion time.
                for i in 0..6 {
                    if let Some(tp) = policy.tau_prime(i) {
                        for &j in graph.in_neighbors(i).unwrap() {
                            if policy.params().dom().contains(j) {
                                assert!(policy.tau_dom(j).unwrap() <= tp);
                            }
                        }
                    }
                }
                prev_active = active;
                prev_dom = dom_now;
            }
        }
    }

    #[test]
    fn snapshot_round_trip_reproduces_the_run() {
        let graph = make_graph(GraphFamily::RandomObservable, 5, Some(0.4), Some(9)).unwrap();
        let dom = greedy_dominating_set(&graph).unwrap();
        let params = BobwParams::new(graph.clone(), dom, 0.05).unwrap().with_gamma_const(2.5);
        let mut policy = BobwPolicy::new(params.clone(), 5_000).unwrap();
        let mut rng = StreamRng::new(77, "policy", 0);
        let mut env_rng = StreamRng::new(77, "rewards", 0);
        let play = |p: &mut BobwPolicy<f64>, rng: &mut StreamRng, env: &mut StreamRng| {
            let rewards: Vec<f64> = [0.9, 0.2, 0.2, 0.2, 0.2]
                .iter()
                .map(|&m| if env.bernoulli(m) { 1.0 } else { 0.0 })
                .collect();
            let dist = p.action_distribution().unwrap();
            let chosen = dist.sample(rng);
            let obs = RoundObservation::from_rewards(&graph, chosen, &rewards).unwrap();
            p.update(&obs, &dist).unwrap();
            dist
        };
        for _ in 0..800 {
            play(&mut policy, &mut rng, &mut env_rng);
        }
        let json = serde_json::to_string(&policy.snapshot()).unwrap();
        let snap: BobwSnapshot<f64> = serde_json::from_str(&json).unwrap();
        let mut restored = BobwPolicy::restore(params, 5_000, &snap).unwrap();

        // Identical RNG state from here: the two policies must stay in
        // lockstep, including across any eliminations.
        let mut rng2 = rng;
        let mut env_rng2 = env_rng;
        for _ in 0..800 {
            let d1 = play(&mut policy, &mut rng, &mut env_rng);
            let d2 = play(&mut restored, &mut rng2, &mut env_rng2);
            assert_eq!(d1.probs, d2.probs);
        }
        assert_eq!(policy.active_arms(), restored.active_arms());
        assert_eq!(policy.snapshot().est_sum, restored.snapshot().est_sum);
    }

    #[test]
    fn whole_policy_runs_in_single_precision() {
        let graph = make_graph(GraphFamily::CliqueLoops, 3, None, None).unwrap();
        let dom = greedy_dominating_set(&graph).unwrap();
        let params = BobwParams::new(graph.clone(), dom, 0.05f32).unwrap();
        let mut policy: BobwPolicy<f32> = BobwPolicy::new(params, 100).unwrap();
        let mut rng = StreamRng::new(11, "policy", 0);
        for _ in 0..50 {
            let dist = policy.action_distribution().unwrap();
            dist.check_simplex(1e-5).unwrap();
            let chosen = dist.sample(&mut rng);
            let obs =
                RoundObservation::from_rewards(&graph, chosen, &[0.9f32, 0.1, 0.4]).unwrap();
            policy.step(&obs, &dist).unwrap();
        }
        assert_eq!(policy.round(), 50);
        assert!(policy.estimate(0) > policy.estimate(1));
        assert!(policy.radius(0) > 0.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        let graph = make_graph(GraphFamily::Bandit, 3, None, None).unwrap();
        let dom = greedy_dominating_set(&graph).unwrap();
        assert!(BobwParams::new(graph.clone(), dom.clone(), 0.0).is_err());
        assert!(BobwParams::new(graph.clone(), dom.clone(), 1.0).is_err());
        // A dominating set from a different graph fails cover validation.
        let clique = make_graph(GraphFamily::CliqueLoops, 3, None, None).unwrap();
        let clique_dom = greedy_dominating_set(&clique).unwrap();
        assert!(BobwParams::new(graph, clique_dom, 0.05).is_err());
    }
}
