//! Local search by swap moves: trade `k` matching edges for `k + 1` edges
//! that also use uncovered vertices.
//!
//! A move is found by choosing `k` matching edges `S`, a handful of uncovered
//! vertices `U'`, and asking the exact solver for a `(k + 1)`-matching inside
//! `V(S) ∪ U'`. Candidates are tried in a fixed order (by `k`, then `S`, then
//! `U'`), with random sampling seeded from the config once the candidate
//! counts exceed their caps.

use std::collections::HashSet;
use std::time::Instant;

use rand::seq::{index, SliceRandom};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{has_d_matching_in_subset, Decision, SolveBudget, SolveReport};
use crate::hypergraph::{binom, Edge, Hypergraph3, Matching};
use crate::rng::SplitMix64;
use crate::vset::VertexSet;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AugmentConfig {
    /// Largest number of matching edges removed by one move.
    pub k_max: usize,
    /// Uncovered vertices offered per move; `None` means `k + 3`. Always
    /// clamped to `3..=k + 3`.
    pub s_max: Option<usize>,
    /// Subsets `S` of the matching tried per `k` before sampling kicks in.
    pub subset_cap: usize,
    /// Uncovered subsets `U'` tried per `(k, S)` before sampling kicks in.
    pub uncovered_cap: usize,
    pub seed: u64,
    /// Shuffle the greedy initialiser with this seed; lexicographic if `None`.
    pub greedy_seed: Option<u64>,
    pub max_iterations: usize,
    /// Node limit for each subproblem handed to the exact solver.
    pub sub_node_limit: u64,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        AugmentConfig {
            k_max: 5,
            s_max: None,
            subset_cap: 200,
            uncovered_cap: 200,
            seed: 0,
            greedy_seed: None,
            max_iterations: 10_000,
            sub_node_limit: 200_000,
        }
    }
}

impl AugmentConfig {
    /// No sampling: every `S` and every `U'` is tried.
    pub fn exhaustive(k_max: usize) -> Self {
        AugmentConfig {
            k_max,
            subset_cap: usize::MAX,
            uncovered_cap: usize::MAX,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.k_max == 0 || self.subset_cap == 0 || self.uncovered_cap == 0 {
            return Err(Error::InvalidArgument(
                "k_max and candidate caps must be positive".into(),
            ));
        }
        Ok(())
    }

    fn uncovered_per_move(&self, k: usize) -> usize {
        self.s_max.unwrap_or(k + 3).clamp(3, k + 3)
    }
}

/// One applied swap.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    pub removed: Vec<Edge>,
    pub added: Vec<Edge>,
    /// Previously uncovered vertices covered by the added edges.
    pub consumed: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveTrace {
    pub initial: Vec<Edge>,
    pub moves: Vec<Move>,
}

impl MoveTrace {
    /// Re-applies every move to the initial matching, checking each step.
    pub fn replay(&self, h: &Hypergraph3) -> Result<Matching> {
        let mut m = Matching::new(h, self.initial.clone())?;
        for (step, mv) in self.moves.iter().enumerate() {
            let mut edges = m.into_edges();
            for r in &mv.removed {
                let pos = edges.iter().position(|e| e == r).ok_or_else(|| {
                    Error::InvalidMatching(format!("move {step} removes absent edge {r:?}"))
                })?;
                edges.swap_remove(pos);
            }
            edges.extend(mv.added.iter().copied());
            edges.sort_unstable();
            m = Matching::new(h, edges)?;
        }
        Ok(m)
    }
}

/// Maximal matching by a single greedy pass over the edges.
pub fn greedy_matching(h: &Hypergraph3, seed: Option<u64>) -> Matching {
    let mut order: Vec<&Edge> = h.edges().iter().collect();
    if let Some(seed) = seed {
        order.shuffle(&mut SplitMix64::new(seed));
    }
    let mut used = VertexSet::EMPTY;
    let mut m = Matching::default();
    for e in order {
        let s = VertexSet::from_edge(e);
        if s.is_disjoint(used) {
            used = used.union(s);
            m.push(*e);
        }
    }
    m.sort();
    m
}

/// All `k`-subsets of `0..len` in lexicographic order, or `cap` distinct
/// random ones when there are more than `cap`.
fn choose_indices(len: usize, k: usize, cap: usize, rng: &mut SplitMix64) -> Vec<Vec<usize>> {
    if k > len {
        return Vec::new();
    }
    let total = binom(len as u64, k as u64);
    if total as u128 <= cap as u128 {
        let mut out = Vec::with_capacity(total as usize);
        let mut comb: Vec<usize> = (0..k).collect();
        loop {
            out.push(comb.clone());
            let Some(i) = (0..k).rev().find(|&i| comb[i] < len - k + i) else {
                break;
            };
            comb[i] += 1;
            for j in i + 1..k {
                comb[j] = comb[j - 1] + 1;
            }
        }
        out
    } else {
        let mut seen = HashSet::with_capacity(cap);
        let mut out = Vec::with_capacity(cap);
        while out.len() < cap {
            let mut c = index::sample(rng, len, k).into_vec();
            c.sort_unstable();
            if seen.insert(c.clone()) {
                out.push(c);
            }
        }
        out
    }
}

/// Tries to enlarge `m` by one edge.
///
/// An edge lying entirely in the uncovered set is taken first (a `0 -> 1`
/// move); otherwise `k = 1..=k_max` swaps are searched. Returns the larger
/// matching and the move, or `None` if nothing was found.
pub fn augment_once(
    h: &Hypergraph3,
    m: &Matching,
    cfg: &AugmentConfig,
) -> Result<Option<(Matching, Move)>> {
    m.validate(h)?;
    cfg.validate()?;
    let uncovered = m.uncovered(h.n());

    if let Some(e) = h.edges_within(uncovered).next() {
        let mut edges = m.edges().to_vec();
        edges.push(*e);
        edges.sort_unstable();
        let mv = Move {
            removed: Vec::new(),
            added: vec![*e],
            consumed: e.to_vec(),
        };
        return Ok(Some((Matching::from_edges_unchecked(edges), mv)));
    }
    if uncovered.len() < 3 {
        return Ok(None);
    }

    let mut rng = SplitMix64::new(cfg.seed);
    let budget = SolveBudget::default().with_node_limit(cfg.sub_node_limit);
    let current = m.edges();

    for k in 1..=cfg.k_max.min(current.len()) {
        let s = cfg.uncovered_per_move(k);
        for pick in choose_indices(current.len(), k, cfg.subset_cap, &mut rng) {
            let removed_set = pick
                .iter()
                .fold(VertexSet::EMPTY, |acc, &i| acc.union(VertexSet::from_edge(&current[i])));
            let region = removed_set.union(uncovered);
            // Only uncovered vertices with an edge through the removed edges can help.
            let pool: Vec<usize> = uncovered
                .iter()
                .filter(|&u| {
                    removed_set
                        .iter()
                        .any(|x| !h.pair_link(u, x).intersection(region).is_empty())
                })
                .collect();
            if pool.len() < 3 {
                continue;
            }
            let choices = if pool.len() <= s {
                vec![(0..pool.len()).collect()]
            } else {
                choose_indices(pool.len(), s, cfg.uncovered_cap, &mut rng)
            };
            for choice in choices {
                let offered: VertexSet = choice.iter().map(|&i| pool[i]).collect();
                let sub = removed_set.union(offered);
                if let Decision::Yes(found) = has_d_matching_in_subset(h, sub, k + 1, &budget) {
                    let removed: Vec<Edge> = pick.iter().map(|&i| current[i]).collect();
                    let added = found.into_edges();
                    let consumed = added
                        .iter()
                        .fold(VertexSet::EMPTY, |acc, e| acc.union(VertexSet::from_edge(e)))
                        .intersection(uncovered)
                        .to_vec();
                    let mut edges: Vec<Edge> = current
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| !pick.contains(i))
                        .map(|(_, e)| *e)
                        .chain(added.iter().copied())
                        .collect();
                    edges.sort_unstable();
                    let mv = Move {
                        removed,
                        added,
                        consumed,
                    };
                    return Ok(Some((Matching::from_edges_unchecked(edges), mv)));
                }
            }
        }
    }
    Ok(None)
}

/// Greedy start, then swap moves until the matching has `d` edges or no move
/// is found.
pub fn solve(h: &Hypergraph3, d: usize, cfg: &AugmentConfig) -> Result<(SolveReport, MoveTrace)> {
    solve_from(h, greedy_matching(h, cfg.greedy_seed), d, cfg)
}

/// As [`solve`], starting from a given matching.
pub fn solve_from(
    h: &Hypergraph3,
    start: Matching,
    d: usize,
    cfg: &AugmentConfig,
) -> Result<(SolveReport, MoveTrace)> {
    let clock = Instant::now();
    start.validate(h)?;
    let mut trace = MoveTrace {
        initial: start.edges().to_vec(),
        moves: Vec::new(),
    };
    let mut m = start;
    let mut iterations = 0;
    let mut stalled = false;
    while m.len() < d && 3 * (m.len() + 1) <= h.n() && iterations < cfg.max_iterations {
        iterations += 1;
        // Vary the sampling stream between iterations while staying reproducible.
        let step_cfg = AugmentConfig {
            seed: cfg.seed.wrapping_add(iterations as u64),
            ..cfg.clone()
        };
        match augment_once(h, &m, &step_cfg)? {
            Some((next, mv)) => {
                debug_assert_eq!(next.len(), m.len() + 1);
                m = next;
                trace.moves.push(mv);
            }
            None => {
                stalled = true;
                break;
            }
        }
    }
    let mut report = SolveReport::new("augment", h.n(), m);
    report.optimal = report.size >= d;
    report.nodes = iterations as u64;
    report.wall_ms = clock.elapsed().as_secs_f64() * 1e3;
    if report.size < d {
        report.failure = Some(if stalled {
            format!("stalled at size {}", report.size)
        } else {
            format!("stopped at size {} (iteration or order limit)", report.size)
        });
    }
    Ok((report, trace))
}
