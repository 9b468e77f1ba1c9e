//! Learner/environment orchestration: seeded runs with correct information
//! masking, pseudo-regret accounting under both definitions, concurrent
//! replication, trace/event persistence, and the concentration-bound oracles
//! used by the statistical test suite.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::env::{read_table_csv, AdversarialEnv, Environment, RewardLaw, StochasticEnv};
use crate::error::{Error, Result};
use crate::graph::{greedy_dominating_set, make_graph, DominatingSet, FeedbackGraph, GraphFamily};
use crate::policy::bobw::{BobwParams, BobwPolicy};
use crate::policy::exp3g::Exp3gPolicy;
use crate::policy::{Policy, RoundObservation, UniformPolicy};
use crate::rng::StreamRng;
use crate::scalar::{KahanSum, Scalar};

/// sqrt(4 V ln(n/delta) + 5 b^2 ln^2(n/delta)): high-probability bound on a
/// martingale sum with conditional variance V and increments bounded by b.
pub fn martingale_bound<F: Scalar>(variance_sum: F, b: F, n: u64, delta: F) -> F {
    let four = F::from_f64(4.0).expect("const");
    let five = F::from_f64(5.0).expect("const");
    let lg = (F::from_count(n) / delta).ln();
    (four * variance_sum * lg + five * b * b * lg * lg).sqrt()
}

/// High-probability ceiling on how often an arm deleted at `tau_i` (and, if
/// dominating, removed from exploration at `tau_i_dom`; 0 otherwise) can be
/// selected over `horizon` rounds:
///
/// tau_i + sum_{s<=tau^D} gamma_s + tau^D * sum_{s=tau^D..T} gamma_s / s
///       + sqrt(4 * (those three) * ln(T/delta) + 5 ln^2(T/delta)).
pub fn pull_count_bound<F: Scalar>(
    tau_i: u64,
    tau_i_dom: u64,
    gamma: impl Fn(u64) -> F,
    horizon: u64,
    delta: F,
) -> F {
    let mut lead = F::from_count(tau_i);
    for s in 1..=tau_i_dom {
        lead += gamma(s);
    }
    if tau_i_dom > 0 {
        let td = F::from_count(tau_i_dom);
        for s in tau_i_dom..=horizon {
            lead += gamma(s) * td / F::from_count(s);
        }
    }
    lead + martingale_bound(lead, F::one(), horizon, delta)
}

/// How a run obtains its graph: a named family, a JSON file, or inline edges.
/// Exactly one of `family`, `file`, `edges` must be present.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<GraphFamily>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_prob: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<[usize; 2]>>,
}

impl GraphSpec {
    pub fn family(family: GraphFamily, k: usize) -> Self {
        Self {
            family: Some(family),
            k: Some(k),
            edge_prob: None,
            seed: None,
            file: None,
            edges: None,
        }
    }

    pub fn inline(k: usize, edges: Vec<[usize; 2]>) -> Self {
        Self {
            family: None,
            k: Some(k),
            edge_prob: None,
            seed: None,
            file: None,
            edges: Some(edges),
        }
    }

    /// `run_seed` feeds the graph sub-stream when a random family omits its
    /// own seed.
    pub fn resolve(&self, run_seed: u64) -> Result<FeedbackGraph> {
        match (&self.family, &self.file, &self.edges) {
            (Some(family), None, None) => {
                let k = self
                    .k
                    .ok_or_else(|| Error::invalid("graph", "family graphs need \"k\""))?;
                let seed = match family {
                    GraphFamily::RandomObservable => Some(
                        self.seed
                            .unwrap_or_else(|| StreamRng::new(run_seed, "graph", 0).next_u64()),
                    ),
                    _ => self.seed,
                };
                make_graph(*family, k, self.edge_prob, seed)
            }
            (None, Some(file), None) => FeedbackGraph::from_json_file(file),
            (None, None, Some(edges)) => {
                let k = self
                    .k
                    .ok_or_else(|| Error::invalid("graph", "inline graphs need \"k\""))?;
                let converted: Vec<(usize, usize)> = edges
                    .iter()
                    .map(|&[i, j]| {
                        if i == 0 || j == 0 {
                            Err(Error::invalid(
                                "graph",
                                format!("edge ({i}, {j}): arms are 1-indexed"),
                            ))
                        } else {
                            Ok((i - 1, j - 1))
                        }
                    })
                    .collect::<Result<_>>()?;
                FeedbackGraph::new(k, &converted)
            }
            _ => Err(Error::invalid(
                "graph",
                "specify exactly one of \"family\", \"file\", \"edges\"",
            )),
        }
    }
}

/// Dominating set choice: the greedy cover or an explicit 1-indexed list.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum DomSpec {
    Named(String),
    Explicit(Vec<usize>),
}

impl Default for DomSpec {
    fn default() -> Self {
        DomSpec::Named("greedy".into())
    }
}

impl DomSpec {
    pub fn resolve(&self, graph: &FeedbackGraph) -> Result<DominatingSet> {
        match self {
            DomSpec::Named(name) if name == "greedy" => greedy_dominating_set(graph),
            DomSpec::Named(name) => Err(Error::invalid(
                "dominating_set",
                format!("unknown choice {name:?}, expected \"greedy\" or a 1-indexed arm list"),
            )),
            DomSpec::Explicit(arms) => {
                let members: Vec<usize> = arms
                    .iter()
                    .map(|&a| {
                        if a == 0 || a > graph.arm_count() {
                            Err(Error::ArmOutOfRange {
                                arm: a,
                                k: graph.arm_count(),
                            })
                        } else {
                            Ok(a - 1)
                        }
                    })
                    .collect::<Result<_>>()?;
                DominatingSet::new(graph, members)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    Bobw,
    Exp3g,
    Uniform,
}

/// Reward law spec: `"bernoulli"` or `{"uniform_pm": {"width": w}}`.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum LawSpec {
    #[default]
    Bernoulli,
    UniformPm { width: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Table,
    MeanSwitch,
    Drift,
}

/// Environment spec; `type` is `"stochastic"` or `"adversarial"`, with the
/// remaining fields depending on it.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EnvSpec {
    #[serde(rename = "type")]
    pub env_type: EnvType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub means: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub law: Option<LawSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_means: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub switch_period: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvType {
    Stochastic,
    Adversarial,
}

impl EnvSpec {
    pub fn stochastic(means: Vec<f64>) -> Self {
        Self {
            env_type: EnvType::Stochastic,
            means: Some(means),
            law: None,
            generator: None,
            table: None,
            base_means: None,
            switch_period: None,
            seed: None,
        }
    }

    pub fn mean_switch(base_means: Vec<f64>, switch_period: u64) -> Self {
        Self {
            env_type: EnvType::Adversarial,
            means: None,
            law: None,
            generator: Some(GeneratorKind::MeanSwitch),
            table: None,
            base_means: Some(base_means),
            switch_period: Some(switch_period),
            seed: None,
        }
    }

    /// `run_seed` feeds the env sub-stream when an adversarial generator
    /// omits its own noise seed.
    pub fn resolve(&self, run_seed: u64) -> Result<Environment<f64>> {
        match self.env_type {
            EnvType::Stochastic => {
                let means = self
                    .means
                    .clone()
                    .ok_or_else(|| Error::invalid("environment", "stochastic needs \"means\""))?;
                let law = match self.law.unwrap_or_default() {
                    LawSpec::Bernoulli => RewardLaw::Bernoulli,
                    LawSpec::UniformPm { width } => RewardLaw::UniformPm { width },
                };
                Ok(Environment::Stochastic(StochasticEnv::new(means, law)?))
            }
            EnvType::Adversarial => {
                let generator = self.generator.ok_or_else(|| {
                    Error::invalid("environment", "adversarial needs \"generator\"")
                })?;
                let seed = self
                    .seed
                    .unwrap_or_else(|| StreamRng::new(run_seed, "env", 0).next_u64());
                let env = match generator {
                    GeneratorKind::Table => {
                        let path = self.table.as_ref().ok_or_else(|| {
                            Error::invalid("environment", "table generator needs \"table\"")
                        })?;
                        read_table_csv(path)?
                    }
                    GeneratorKind::MeanSwitch => {
                        let base = self.base_means.clone().ok_or_else(|| {
                            Error::invalid("environment", "mean_switch needs \"base_means\"")
                        })?;
                        let period = self.switch_period.ok_or_else(|| {
                            Error::invalid("environment", "mean_switch needs \"switch_period\"")
                        })?;
                        AdversarialEnv::mean_switch(base, period, seed)?
                    }
                    GeneratorKind::Drift => {
                        let base = self.base_means.clone().ok_or_else(|| {
                            Error::invalid("environment", "drift needs \"base_means\"")
                        })?;
                        AdversarialEnv::drift(base, seed)?
                    }
                };
                Ok(Environment::Adversarial(env))
            }
        }
    }
}

fn default_trace_stride() -> u64 {
    100
}

/// Everything one run needs. Identical configs produce identical records.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub graph: GraphSpec,
    #[serde(default)]
    pub dominating_set: DomSpec,
    pub policy: PolicyKind,
    pub environment: EnvSpec,
    pub horizon: u64,
    pub delta: f64,
    pub seed: u64,
    #[serde(default = "default_trace_stride")]
    pub trace_stride: u64,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.horizon < 1 {
            return Err(Error::invalid("horizon", "need at least one round"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::invalid(
                "delta",
                format!("{} outside (0, 1)", self.delta),
            ));
        }
        if self.trace_stride < 1 {
            return Err(Error::invalid("trace_stride", "must be at least 1"));
        }
        Ok(())
    }

    /// Builds the graph, dominating set, and environment this config names.
    pub fn resolve(&self) -> Result<(FeedbackGraph, DominatingSet, Environment<f64>)> {
        self.validate()?;
        let graph = self.graph.resolve(self.seed)?;
        let dom = self.dominating_set.resolve(&graph)?;
        let env = self.environment.resolve(self.seed)?;
        if env.arm_count() != graph.arm_count() {
            return Err(Error::invalid(
                "environment",
                format!(
                    "environment has {} arms but the graph has {}",
                    env.arm_count(),
                    graph.arm_count()
                ),
            ));
        }
        Ok((graph, dom, env))
    }

    pub fn build_policy(
        &self,
        graph: &FeedbackGraph,
        dom: &DominatingSet,
    ) -> Result<Box<dyn Policy<f64> + Send>> {
        Ok(match self.policy {
            PolicyKind::Bobw => {
                let params = BobwParams::new(graph.clone(), dom.clone(), self.delta)?;
                Box::new(BobwPolicy::new(params, self.horizon)?)
            }
            PolicyKind::Exp3g => {
                Box::new(Exp3gPolicy::new(graph.clone(), dom.clone(), self.horizon)?)
            }
            PolicyKind::Uniform => Box::new(UniformPolicy::new(graph.arm_count())),
        })
    }
}

/// Structural events of one run, with 1-indexed arms.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct EventLog {
    pub tau: BTreeMap<usize, u64>,
    pub tau_dom: BTreeMap<usize, u64>,
    pub tau_prime: BTreeMap<usize, u64>,
    pub detect_round: Option<u64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct TracePoint {
    pub round: u64,
    pub regret: f64,
}

/// Everything recorded about one run. Serialization excludes wall time so
/// repeated runs of one config are byte-identical.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunRecord {
    pub seed: u64,
    pub regret_trace: Vec<TracePoint>,
    pub events: EventLog,
    pub pull_counts: Vec<u64>,
    pub total_regret: f64,
    #[serde(skip)]
    pub wall: Duration,
}

impl RunRecord {
    /// Regret at the first trace point at or after `round`.
    pub fn regret_at(&self, round: u64) -> Option<f64> {
        self.regret_trace
            .iter()
            .find(|p| p.round >= round)
            .map(|p| p.regret)
    }
}

/// Drives one policy/environment pair for `horizon` rounds. The policy sees
/// only `RoundObservation`s built here: its own reward plus the out-neighbor
/// rewards of the arm it picked.
pub fn run_with_policy<P>(
    policy: &mut P,
    graph: &FeedbackGraph,
    env: &Environment<f64>,
    horizon: u64,
    seed: u64,
    trace_stride: u64,
) -> Result<RunRecord>
where
    P: Policy<f64> + ?Sized,
{
    let started = Instant::now();
    let k = graph.arm_count();
    let mut policy_rng = StreamRng::new(seed, "policy", 0);
    let mut reward_rng = StreamRng::new(seed, "rewards", 0);

    let gaps: Option<Vec<f64>> = match env {
        Environment::Stochastic(e) => Some((0..k).map(|i| e.gap(i)).collect()),
        Environment::Adversarial(_) => None,
    };

    let mut pull_counts = vec![0u64; k];
    let mut stochastic_regret = KahanSum::<f64>::new();
    let mut collected = KahanSum::<f64>::new();
    let mut cum_arm = vec![KahanSum::<f64>::new(); k];
    let mut trace = Vec::new();
    let mut events = EventLog::default();

    for t in 1..=horizon {
        let dist = policy.distribution()?;
        let chosen = dist.sample(&mut policy_rng);
        let rewards = env.reward_vector(t, &mut reward_rng)?;
        let obs = RoundObservation::from_rewards(graph, chosen, &rewards)?;
        let ev = policy.update(&obs, &dist)?;

        pull_counts[chosen] += 1;
        match &gaps {
            Some(gaps) => stochastic_regret.add(gaps[chosen]),
            None => {
                collected.add(rewards[chosen]);
                for (c, &r) in cum_arm.iter_mut().zip(&rewards) {
                    c.add(r);
                }
            }
        }

        let eventful = !ev.is_empty();
        if eventful {
            for arm in ev.eliminated {
                events.tau.insert(arm + 1, t);
            }
            for arm in ev.dom_deleted {
                events.tau_dom.insert(arm + 1, t);
            }
            for arm in ev.tau_prime_set {
                events.tau_prime.insert(arm + 1, t);
            }
            if ev.detected {
                events.detect_round = Some(t);
            }
        }

        if t % trace_stride == 0 || t == horizon || eventful {
            let regret = match &gaps {
                Some(_) => stochastic_regret.value(),
                // Prefix form of the realized-best-arm regret.
                None => {
                    let best = cum_arm
                        .iter()
                        .map(KahanSum::value)
                        .fold(f64::NEG_INFINITY, f64::max);
                    best - collected.value()
                }
            };
            trace.push(TracePoint { round: t, regret });
        }
    }

    let total_regret = trace.last().expect("horizon >= 1 records a point").regret;
    if let Some(gaps) = &gaps {
        // Reg(T) = sum_i gap_i * pulls_i, the stochastic regret identity.
        let identity: f64 = gaps
            .iter()
            .zip(&pull_counts)
            .map(|(&g, &n)| g * n as f64)
            .sum();
        debug_assert!(
            (total_regret - identity).abs() <= 1e-9,
            "regret {total_regret} drifted from gap identity {identity}"
        );
    }
    Ok(RunRecord {
        seed,
        regret_trace: trace,
        events,
        pull_counts,
        total_regret,
        wall: started.elapsed(),
    })
}

/// Runs the configured policy once. Deterministic given the config.
pub fn run_once(config: &RunConfig) -> Result<RunRecord> {
    let (graph, dom, env) = config.resolve()?;
    let mut policy = config.build_policy(&graph, &dom)?;
    run_with_policy(
        policy.as_mut(),
        &graph,
        &env,
        config.horizon,
        config.seed,
        config.trace_stride,
    )
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct AggregatePoint {
    pub round: u64,
    pub mean: f64,
    pub std: f64,
    pub q05: f64,
    pub q95: f64,
}

/// Replicated runs plus per-round aggregate statistics on the regular
/// stride grid.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AggregateRecord {
    pub n_seeds: u32,
    pub points: Vec<AggregatePoint>,
    pub mean_total_regret: f64,
    pub std_total_regret: f64,
    pub runs: Vec<RunRecord>,
    #[serde(skip)]
    pub wall: Duration,
}

fn replication_threads(n: usize) -> usize {
    let cap = std::env::var("GBL_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&v| v >= 1);
    let hw = std::thread::available_parallelism()
        .map(std::num::NonZeroUsize::get)
        .unwrap_or(1);
    cap.unwrap_or(hw).min(n).max(1)
}

/// Runs seeds `seed..seed + n_seeds` (possibly concurrently; `GBL_THREADS`
/// caps the parallelism) and aggregates per-round regret. Aggregation is a
/// deterministic reduction in seed order.
pub fn run_replicated(config: &RunConfig, n_seeds: u32) -> Result<AggregateRecord> {
    if n_seeds < 1 {
        return Err(Error::invalid("seeds", "need at least one replication"));
    }
    let started = Instant::now();
    config.resolve()?; // fail fast on config problems before spawning

    let configs: Vec<RunConfig> = (0..n_seeds)
        .map(|i| {
            let mut c = config.clone();
            c.seed = config.seed + u64::from(i);
            c
        })
        .collect();

    let threads = replication_threads(configs.len());
    let mut results: Vec<Option<Result<RunRecord>>> = (0..configs.len()).map(|_| None).collect();
    if threads <= 1 {
        for (slot, cfg) in results.iter_mut().zip(&configs) {
            *slot = Some(run_once(cfg));
        }
    } else {
        let slots: Vec<std::sync::Mutex<Option<Result<RunRecord>>>> =
            (0..configs.len()).map(|_| std::sync::Mutex::new(None)).collect();
        let next = std::sync::atomic::AtomicUsize::new(0);
        std::thread::scope(|scope| {
            for _ in 0..threads {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    if i >= configs.len() {
                        break;
                    }
                    let out = run_once(&configs[i]);
                    *slots[i].lock().expect("no poisoned replication slot") = Some(out);
                });
            }
        });
        for (slot, cell) in results.iter_mut().zip(slots) {
            *slot = cell.into_inner().expect("no poisoned replication slot");
        }
    }

    let mut runs = Vec::with_capacity(configs.len());
    for (cfg, slot) in configs.iter().zip(results) {
        match slot.expect("every replication ran") {
            Ok(record) => runs.push(record),
            Err(e) => {
                return Err(Error::Replication {
                    seed: cfg.seed,
                    source: Box::new(e),
                })
            }
        }
    }

    let points = aggregate_points(&runs, config.horizon, config.trace_stride);
    let finals: Vec<f64> = runs.iter().map(|r| r.total_regret).collect();
    let mean_total_regret = mean(&finals);
    let std_total_regret = sample_std(&finals, mean_total_regret);
    Ok(AggregateRecord {
        n_seeds,
        points,
        mean_total_regret,
        std_total_regret,
        runs,
        wall: started.elapsed(),
    })
}

fn aggregate_points(runs: &[RunRecord], horizon: u64, stride: u64) -> Vec<AggregatePoint> {
    let mut grid: Vec<u64> = (1..=horizon / stride).map(|i| i * stride).collect();
    if grid.last() != Some(&horizon) {
        grid.push(horizon);
    }
    grid.iter()
        .map(|&round| {
            let mut values: Vec<f64> = runs
                .iter()
                .map(|r| {
                    r.regret_trace
                        .iter()
                        .find(|p| p.round == round)
                        .expect("stride rounds are always recorded")
                        .regret
                })
                .collect();
            values.sort_by(|a, b| a.partial_cmp(b).expect("regret values are finite"));
            let m = mean(&values);
            AggregatePoint {
                round,
                mean: m,
                std: sample_std(&values, m),
                q05: quantile(&values, 0.05),
                q95: quantile(&values, 0.95),
            }
        })
        .collect()
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sample_std(xs: &[f64], mean: f64) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Linearly interpolated quantile of sorted values.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = q * (n - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

// ---------------------------------------------------------------------------
// Persistence: trace CSV and events JSON.

/// Single-run trace: `round,regret`.
pub fn trace_csv(record: &RunRecord) -> String {
    let mut out = String::from("round,regret\n");
    for p in &record.regret_trace {
        out.push_str(&format!("{},{}\n", p.round, p.regret));
    }
    out
}

/// Aggregate trace: `round,regret_mean,regret_std,regret_q05,regret_q95`.
pub fn aggregate_csv(agg: &AggregateRecord) -> String {
    let mut out = String::from("round,regret_mean,regret_std,regret_q05,regret_q95\n");
    for p in &agg.points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            p.round, p.mean, p.std, p.q05, p.q95
        ));
    }
    out
}

#[derive(Serialize)]
struct EventsFile<'a> {
    tau: &'a BTreeMap<usize, u64>,
    tau_dom: &'a BTreeMap<usize, u64>,
    tau_prime: &'a BTreeMap<usize, u64>,
    detect_round: Option<u64>,
    pull_counts: &'a [u64],
}

#[derive(Serialize)]
struct SeededEventsFile<'a> {
    seed: u64,
    #[serde(flatten)]
    events: EventsFile<'a>,
}

fn events_file(record: &RunRecord) -> EventsFile<'_> {
    EventsFile {
        tau: &record.events.tau,
        tau_dom: &record.events.tau_dom,
        tau_prime: &record.events.tau_prime,
        detect_round: record.events.detect_round,
        pull_counts: &record.pull_counts,
    }
}

/// Events JSON for a single run:
/// `{"tau": {...}, "tau_dom": {...}, "tau_prime": {...}, "detect_round": int|null, "pull_counts": [...]}`.
pub fn events_json(record: &RunRecord) -> String {
    serde_json::to_string_pretty(&events_file(record)).expect("events serialize")
}

/// Events JSON for replicated runs: an array of per-seed objects in the
/// single-run schema extended with a `seed` field.
pub fn events_json_many(records: &[RunRecord]) -> String {
    let items: Vec<SeededEventsFile<'_>> = records
        .iter()
        .map(|r| SeededEventsFile {
            seed: r.seed,
            events: events_file(r),
        })
        .collect();
    serde_json::to_string_pretty(&items).expect("events serialize")
}

/// Parsed trace CSV, either single-run or aggregate.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceData {
    pub rounds: Vec<u64>,
    pub central: Vec<f64>,
    /// (q05, q95) when the file carries an aggregate band.
    pub band: Option<(Vec<f64>, Vec<f64>)>,
}

/// Reads either trace CSV layout, reporting the offending line on malformed
/// input.
pub fn read_trace_csv(path: impl AsRef<Path>) -> Result<TraceData> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::Csv {
        path: display.clone(),
        line: 1,
        why: "empty file".into(),
    })?;
    let aggregate = match header.trim() {
        "round,regret" => false,
        "round,regret_mean,regret_std,regret_q05,regret_q95" => true,
        other => {
            return Err(Error::Csv {
                path: display,
                line: 1,
                why: format!("unrecognized header {other:?}"),
            })
        }
    };
    let mut rounds = Vec::new();
    let mut central = Vec::new();
    let mut q05 = Vec::new();
    let mut q95 = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let expected = if aggregate { 5 } else { 2 };
        if fields.len() != expected {
            return Err(Error::Csv {
                path: display,
                line: idx + 1,
                why: format!("expected {expected} fields, found {}", fields.len()),
            });
        }
        let parse_f = |s: &str, line: usize| -> Result<f64> {
            s.trim().parse().map_err(|_| Error::Csv {
                path: display.clone(),
                line,
                why: format!("cannot parse {:?} as a number", s.trim()),
            })
        };
        let round: u64 = fields[0].trim().parse().map_err(|_| Error::Csv {
            path: display.clone(),
            line: idx + 1,
            why: format!("cannot parse {:?} as a round", fields[0].trim()),
        })?;
        rounds.push(round);
        central.push(parse_f(fields[1], idx + 1)?);
        if aggregate {
            q05.push(parse_f(fields[3], idx + 1)?);
            q95.push(parse_f(fields[4], idx + 1)?);
        }
    }
    if rounds.is_empty() {
        return Err(Error::Csv {
            path: display,
            line: 1,
            why: "no data rows".into(),
        });
    }
    Ok(TraceData {
        rounds,
        central,
        band: if aggregate { Some((q05, q95)) } else { None },
    })
}
