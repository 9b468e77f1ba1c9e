//! Directed feedback graphs over K arms.
//!
//! An edge (i, j) means "selecting arm i reveals arm j's reward". Arms are
//! 0-indexed in the API; every external format (graph files, events, CLI
//! output) uses 1-indexed arms.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::StreamRng;

/// Immutable directed feedback graph. Neighborhood lists are sorted, so
/// iteration order is deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeedbackGraph {
    k: usize,
    out: Vec<Vec<usize>>,
    inn: Vec<Vec<usize>>,
    edge_count: usize,
}

impl FeedbackGraph {
    /// Builds a graph from an edge list. Endpoints must lie in 0..k and
    /// duplicate edges are rejected.
    pub fn new(k: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if k < 2 {
            return Err(Error::invalid("arm count", format!("K={k}, need K >= 2")));
        }
        let mut seen = BTreeSet::new();
        let mut out = vec![Vec::new(); k];
        let mut inn = vec![Vec::new(); k];
        for &(i, j) in edges {
            if i >= k {
                return Err(Error::ArmOutOfRange { arm: i + 1, k });
            }
            if j >= k {
                return Err(Error::ArmOutOfRange { arm: j + 1, k });
            }
            if !seen.insert((i, j)) {
                return Err(Error::DuplicateEdge { i: i + 1, j: j + 1 });
            }
            out[i].push(j);
            inn[j].push(i);
        }
        for list in out.iter_mut().chain(inn.iter_mut()) {
            list.sort_unstable();
        }
        Ok(Self {
            k,
            out,
            inn,
            edge_count: seen.len(),
        })
    }

    pub fn arm_count(&self) -> usize {
        self.k
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Arms revealed when `arm` is selected.
    pub fn out_neighbors(&self, arm: usize) -> Result<&[usize]> {
        self.check_arm(arm)?;
        Ok(&self.out[arm])
    }

    /// Arms whose selection reveals `arm`.
    pub fn in_neighbors(&self, arm: usize) -> Result<&[usize]> {
        self.check_arm(arm)?;
        Ok(&self.inn[arm])
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.k && self.out[i].binary_search(&j).is_ok()
    }

    /// Every arm has at least one in-neighbor, i.e. every reward is revealable.
    pub fn is_observable(&self) -> bool {
        self.inn.iter().all(|l| !l.is_empty())
    }

    /// Arms with no in-neighbors (empty iff observable).
    pub fn unobservable_arms(&self) -> Vec<usize> {
        (0..self.k).filter(|&i| self.inn[i].is_empty()).collect()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(i, js)| js.iter().map(move |&j| (i, j)))
    }

    fn check_arm(&self, arm: usize) -> Result<()> {
        if arm >= self.k {
            return Err(Error::ArmOutOfRange {
                arm: arm + 1,
                k: self.k,
            });
        }
        Ok(())
    }

    /// Loads the JSON file format `{"K": int, "edges": [[i, j], ...]}`
    /// with 1-indexed arms.
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(text)?;
        file.into_graph()
    }

    pub fn to_json(&self) -> String {
        let file = GraphFile {
            k: self.k,
            edges: self.edges().map(|(i, j)| [i + 1, j + 1]).collect(),
        };
        serde_json::to_string_pretty(&file).expect("graph serializes")
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    #[serde(rename = "K")]
    k: usize,
    edges: Vec<[usize; 2]>,
}

impl GraphFile {
    fn into_graph(self) -> Result<FeedbackGraph> {
        let mut edges = Vec::with_capacity(self.edges.len());
        for [i, j] in &self.edges {
            if *i == 0 || *j == 0 {
                return Err(Error::invalid(
                    "edge",
                    format!("({i}, {j}): arms are 1-indexed in graph files"),
                ));
            }
            edges.push((i - 1, j - 1));
        }
        FeedbackGraph::new(self.k, &edges)
    }
}

/// Ordered set of arms whose out-neighborhoods cover every arm.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DominatingSet {
    members: Vec<usize>,
}

impl DominatingSet {
    /// Validates the cover property: the union of members' out-neighborhoods
    /// must equal the whole arm set.
    pub fn new(graph: &FeedbackGraph, members: Vec<usize>) -> Result<Self> {
        let k = graph.arm_count();
        let mut covered = vec![false; k];
        let mut distinct = BTreeSet::new();
        for &j in &members {
            if j >= k {
                return Err(Error::ArmOutOfRange { arm: j + 1, k });
            }
            if !distinct.insert(j) {
                return Err(Error::invalid(
                    "dominating set",
                    format!("arm {} listed twice", j + 1),
                ));
            }
            for &i in graph.out_neighbors(j)? {
                covered[i] = true;
            }
        }
        if let Some(arm) = covered.iter().position(|&c| !c) {
            return Err(Error::invalid(
                "dominating set",
                format!("arm {} is not covered", arm + 1),
            ));
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, arm: usize) -> bool {
        self.members.contains(&arm)
    }
}

/// Greedy set cover over out-neighborhoods: repeatedly pick the arm covering
/// the most uncovered arms, ties broken by smallest index. Deterministic.
pub fn greedy_dominating_set(graph: &FeedbackGraph) -> Result<DominatingSet> {
    if let Some(&arm) = graph.unobservable_arms().first() {
        return Err(Error::NotObservable { arm: arm + 1 });
    }
    let k = graph.arm_count();
    let mut covered = vec![false; k];
    let mut remaining = k;
    let mut members = Vec::new();
    while remaining > 0 {
        let mut best = usize::MAX;
        let mut best_gain = 0usize;
        for cand in 0..k {
            let gain = graph.out[cand].iter().filter(|&&j| !covered[j]).count();
            if gain > best_gain {
                best_gain = gain;
                best = cand;
            }
        }
        debug_assert!(best_gain > 0, "observable graph always makes progress");
        members.push(best);
        for &j in &graph.out[best] {
            if !covered[j] {
                covered[j] = true;
                remaining -= 1;
            }
        }
    }
    DominatingSet::new(graph, members)
}

/// Standard graph families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphFamily {
    /// Self-loops only: selecting an arm reveals exactly itself.
    Bandit,
    /// All ordered pairs including loops: full feedback.
    CliqueLoops,
    /// K/2 disjoint undirected edges, no loops (K must be even).
    Bar,
    /// Single directed cycle, no loops.
    LooplessCycle,
    /// Each ordered non-loop pair present independently with `edge_prob`,
    /// then arms left without in-neighbors get one repair edge.
    RandomObservable,
}

impl GraphFamily {
    pub fn name(self) -> &'static str {
        match self {
            GraphFamily::Bandit => "bandit",
            GraphFamily::CliqueLoops => "clique_loops",
            GraphFamily::Bar => "bar",
            GraphFamily::LooplessCycle => "loopless_cycle",
            GraphFamily::RandomObservable => "random_observable",
        }
    }
}

/// Builds one of the standard families. `edge_prob` and `seed` are required
/// for `RandomObservable` and ignored otherwise.
pub fn make_graph(
    family: GraphFamily,
    k: usize,
    edge_prob: Option<f64>,
    seed: Option<u64>,
) -> Result<FeedbackGraph> {
    if k < 2 {
        return Err(Error::invalid("arm count", format!("K={k}, need K >= 2")));
    }
    let edges: Vec<(usize, usize)> = match family {
        GraphFamily::Bandit => (0..k).map(|i| (i, i)).collect(),
        GraphFamily::CliqueLoops => (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).collect(),
        GraphFamily::Bar => {
            if !k.is_multiple_of(2) {
                return Err(Error::invalid("bar graph", format!("K={k} must be even")));
            }
            (0..k / 2)
                .flat_map(|b| [(2 * b, 2 * b + 1), (2 * b + 1, 2 * b)])
                .collect()
        }
        GraphFamily::LooplessCycle => (0..k).map(|i| (i, (i + 1) % k)).collect(),
        GraphFamily::RandomObservable => {
            let p = edge_prob.ok_or_else(|| {
                Error::invalid("random_observable graph", "edge_prob is required")
            })?;
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::invalid(
                    "random_observable graph",
                    format!("edge_prob={p} outside (0, 1]"),
                ));
            }
            let seed = seed
                .ok_or_else(|| Error::invalid("random_observable graph", "seed is required"))?;
            let mut rng = StreamRng::new(seed, "graph", 0);
            let mut edges = Vec::new();
            let mut has_in = vec![false; k];
            for i in 0..k {
                for (j, has) in has_in.iter_mut().enumerate() {
                    if i != j && rng.bernoulli(p) {
                        edges.push((i, j));
                        *has = true;
                    }
                }
            }
            // Repair unobservable arms with one incoming edge each.
            for (j, &has) in has_in.iter().enumerate() {
                if !has {
                    let mut src = rng.index(k - 1);
                    if src >= j {
                        src += 1;
                    }
                    edges.push((src, j));
                }
            }
            edges
        }
    };
    FeedbackGraph::new(k, &edges)
}
