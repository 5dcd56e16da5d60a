//! Exact maximum matching by branch and bound.
//!
//! At each node the free vertices whose remaining degree (edges lying wholly
//! inside the free set) is zero are discarded. The search then branches on the
//! free vertex of minimum remaining degree, lowest index first: one branch per
//! remaining edge through it in canonical order, and finally the branch that
//! leaves it unmatched. A node is cut when `|M| + floor(free / 3)` cannot beat
//! the incumbent. The order is fixed, so reports are reproducible.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::hypergraph::{Edge, Hypergraph3, Matching};
use crate::vset::VertexSet;

pub const SOLVE_SCHEMA: &str = "hypermatch.solve.v1";
pub const DEFAULT_NODE_LIMIT: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveBudget {
    pub node_limit: u64,
    pub time_limit: Option<Duration>,
    /// Stop as soon as a matching of this size is found.
    pub target: Option<usize>,
}

impl Default for SolveBudget {
    fn default() -> Self {
        SolveBudget {
            node_limit: DEFAULT_NODE_LIMIT,
            time_limit: None,
            target: None,
        }
    }
}

impl SolveBudget {
    pub fn with_target(mut self, target: usize) -> Self {
        self.target = Some(target);
        self
    }

    pub fn with_node_limit(mut self, limit: u64) -> Self {
        self.node_limit = limit.max(1);
        self
    }

    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }
}

/// Result of a solve or verification run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub schema: String,
    pub method: String,
    pub n: usize,
    pub size: usize,
    pub matching: Vec<Edge>,
    /// True when the search space was exhausted or the target was met.
    pub optimal: bool,
    pub nodes: u64,
    pub wall_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub failure: Option<String>,
}

impl SolveReport {
    pub fn new(method: &str, n: usize, matching: Matching) -> Self {
        let edges = matching.into_edges();
        SolveReport {
            schema: SOLVE_SCHEMA.into(),
            method: method.into(),
            n,
            size: edges.len(),
            matching: edges,
            optimal: false,
            nodes: 0,
            wall_ms: 0.0,
            failure: None,
        }
    }

    pub fn matching(&self) -> Matching {
        Matching::from_edges_unchecked(self.matching.clone())
    }
}

struct Search {
    edges: Vec<(Edge, VertexSet)>,
    incident: Vec<Vec<u32>>,
    current: Vec<u32>,
    best: Vec<u32>,
    nodes: u64,
    node_limit: u64,
    deadline: Option<Instant>,
    target: usize,
    aborted: bool,
    done: bool,
}

impl Search {
    fn new(h: &Hypergraph3, within: VertexSet, budget: &SolveBudget) -> Self {
        let edges: Vec<(Edge, VertexSet)> = h
            .edges_within(within)
            .map(|e| (*e, VertexSet::from_edge(e)))
            .collect();
        let mut incident = vec![Vec::new(); h.n()];
        for (i, (e, _)) in edges.iter().enumerate() {
            for &v in e {
                incident[v].push(i as u32);
            }
        }
        Search {
            edges,
            incident,
            current: Vec::new(),
            best: Vec::new(),
            nodes: 0,
            node_limit: budget.node_limit,
            deadline: budget.time_limit.map(|t| Instant::now() + t),
            target: budget.target.unwrap_or(usize::MAX),
            aborted: false,
            done: false,
        }
    }

    fn dfs(&mut self, mut free: VertexSet) {
        if self.current.len() > self.best.len() {
            self.best = self.current.clone();
            if self.best.len() >= self.target {
                self.done = true;
                return;
            }
        }
        self.nodes += 1;
        if self.nodes > self.node_limit {
            self.aborted = true;
            return;
        }
        if self.nodes % 1024 == 0 {
            if let Some(deadline) = self.deadline {
                if Instant::now() >= deadline {
                    self.aborted = true;
                    return;
                }
            }
        }

        let mut pick: Option<(usize, usize)> = None;
        for v in free.iter() {
            let live = self.incident[v]
                .iter()
                .filter(|&&i| self.edges[i as usize].1.is_subset(free))
                .count();
            if live == 0 {
                free.remove(v);
            } else if pick.map_or(true, |(_, d)| live < d) {
                pick = Some((v, live));
            }
        }
        let Some((v, _)) = pick else { return };
        if self.current.len() + free.len() / 3 <= self.best.len() {
            return;
        }

        let branches: Vec<u32> = self.incident[v]
            .iter()
            .copied()
            .filter(|&i| self.edges[i as usize].1.is_subset(free))
            .collect();
        for i in branches {
            self.current.push(i);
            self.dfs(free.difference(self.edges[i as usize].1));
            self.current.pop();
            if self.done || self.aborted {
                return;
            }
        }
        free.remove(v);
        self.dfs(free);
    }
}

fn run(h: &Hypergraph3, within: VertexSet, budget: &SolveBudget, method: &str) -> SolveReport {
    let start = Instant::now();
    let within = within.intersection(h.vertices());
    let mut search = Search::new(h, within, budget);
    if budget.target != Some(0) {
        search.dfs(within);
    }
    let mut edges: Vec<Edge> = search
        .best
        .iter()
        .map(|&i| search.edges[i as usize].0)
        .collect();
    edges.sort_unstable();
    let mut report = SolveReport::new(method, h.n(), Matching::from_edges_unchecked(edges));
    report.optimal = !search.aborted || report.size >= search.target;
    report.nodes = search.nodes;
    report.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    if !report.optimal {
        report.failure = Some("budget exhausted".into());
    }
    report
}

/// Maximum matching of `h`; `optimal` is false if the budget ran out first.
pub fn max_matching(h: &Hypergraph3, budget: &SolveBudget) -> SolveReport {
    run(h, h.vertices(), budget, "exact")
}

/// Maximum matching using only edges inside `subset`.
pub fn max_matching_in_subset(h: &Hypergraph3, subset: VertexSet, budget: &SolveBudget) -> SolveReport {
    run(h, subset, budget, "exact")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    Yes(Matching),
    No,
    Unknown,
}

impl Decision {
    pub fn is_yes(&self) -> bool {
        matches!(self, Decision::Yes(_))
    }
}

/// Decides whether `h` has a matching with `d` edges.
pub fn has_d_matching(h: &Hypergraph3, d: usize, budget: &SolveBudget) -> Decision {
    has_d_matching_in_subset(h, h.vertices(), d, budget)
}

pub fn has_d_matching_in_subset(
    h: &Hypergraph3,
    subset: VertexSet,
    d: usize,
    budget: &SolveBudget,
) -> Decision {
    if d == 0 {
        return Decision::Yes(Matching::default());
    }
    if 3 * d > subset.intersection(h.vertices()).len() {
        return Decision::No;
    }
    let report = run(h, subset, &budget.with_target(d), "exact");
    if report.size >= d {
        let mut m = report.matching;
        m.truncate(d);
        Decision::Yes(Matching::from_edges_unchecked(m))
    } else if report.optimal {
        Decision::No
    } else {
        Decision::Unknown
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_and_complete() {
        let r = max_matching(&Hypergraph3::empty(7).unwrap(), &SolveBudget::default());
        assert_eq!((r.size, r.optimal), (0, true));
        let h = Hypergraph3::complete(9).unwrap();
        let r = max_matching(&h, &SolveBudget::default());
        assert_eq!((r.size, r.optimal), (3, true));
        r.matching().validate(&h).unwrap();
    }

    #[test]
    fn greedy_trap() {
        let h = Hypergraph3::new(6, [[0, 1, 2], [0, 3, 4], [1, 2, 5]]).unwrap();
        let r = max_matching(&h, &SolveBudget::default());
        assert_eq!(r.size, 2);
        assert_eq!(r.matching, vec![[0, 3, 4], [1, 2, 5]]);
    }

    #[test]
    fn subset_restriction() {
        let h = Hypergraph3::complete(9).unwrap();
        let s: VertexSet = [2, 5, 7].into_iter().collect();
        let r = max_matching_in_subset(&h, s, &SolveBudget::default());
        assert_eq!(r.matching, vec![[2, 5, 7]]);
        let r = max_matching_in_subset(&h, h.vertices(), &SolveBudget::default());
        assert_eq!(r.size, 3);
    }

    #[test]
    fn decisions() {
        let h = Hypergraph3::complete(8).unwrap();
        assert!(has_d_matching(&h, 0, &SolveBudget::default()).is_yes());
        assert!(has_d_matching(&h, 2, &SolveBudget::default()).is_yes());
        assert_eq!(has_d_matching(&h, 3, &SolveBudget::default()), Decision::No);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let h = Hypergraph3::complete(15).unwrap();
        let e = h.edges()[0];
        // Remove one edge so the trivial upper bound is not hit immediately.
        let h = Hypergraph3::new(15, h.edges().iter().copied().filter(|x| *x != e)).unwrap();
        let r = max_matching(&h, &SolveBudget::default().with_node_limit(3));
        assert!(!r.optimal);
        assert_eq!(r.failure.as_deref(), Some("budget exhausted"));
        r.matching().validate(&h).unwrap();
    }
}
