//! Absorbing matchings.
//!
//! An edge `e` absorbs a disjoint triple `T` when the six vertices of `e ∪ T`
//! split into two edges. A matching `M*` whose edges absorb many triples lets
//! a leftover set `V'` be folded in: partition `V'` into triples, give each to
//! a distinct absorbing edge and replace that edge by its two-edge split.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::augment::{self, AugmentConfig};
use crate::error::{Error, Result};
use crate::exact::SolveReport;
use crate::hypergraph::{binom, Edge, Hypergraph3, Matching};
use crate::rng::SplitMix64;
use crate::vset::VertexSet;

pub const ABSORBING_SCHEMA: &str = "hypermatch.absorbing.v1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbsorbConfig {
    pub gamma: f64,
    /// Absorbers required for every checked triple.
    pub t: usize,
    pub seed: u64,
    /// Enforce `|M*| <= gamma^3 n / 3` and cap the leftover at `gamma^6 n`.
    pub contract: bool,
    /// Triples checked exhaustively up to this many, sampled above it.
    pub triple_limit: usize,
    /// Candidate edges scored per greedy step.
    pub candidate_limit: usize,
    /// Node budget for the leftover assignment search.
    pub backtrack_limit: u64,
}

impl Default for AbsorbConfig {
    fn default() -> Self {
        AbsorbConfig {
            gamma: 0.5,
            t: 1,
            seed: 0,
            contract: false,
            triple_limit: 10_000,
            candidate_limit: 400,
            backtrack_limit: 100_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coverage {
    /// Every triple of the residual set was checked, not a sample.
    pub exhaustive: bool,
    pub triples_checked: usize,
    pub min_absorbers: usize,
    pub mean_absorbers: f64,
    /// Checked triples with fewer than `t` absorbers.
    pub under_covered: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeHypothesis {
    pub min_degree: usize,
    /// `(1/2 + 2 gamma) C(n, 2)`
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbsorbingMatching {
    pub schema: String,
    pub n: usize,
    pub gamma: f64,
    pub t: usize,
    pub contract: bool,
    pub matching: Vec<Edge>,
    pub size_cap: usize,
    /// Largest leftover accepted by [`absorb_leftover`].
    pub capacity: usize,
    /// Checked triples of the residual set.
    pub triples: Vec<Edge>,
    /// For each edge of `matching`, the indices into `triples` it absorbs.
    pub absorbs: Vec<Vec<u32>>,
    pub coverage: Coverage,
    pub degree_hypothesis: DegreeHypothesis,
    pub success: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub failure: Option<String>,
}

impl AbsorbingMatching {
    pub fn covered(&self) -> VertexSet {
        self.matching
            .iter()
            .fold(VertexSet::EMPTY, |acc, e| acc.union(VertexSet::from_edge(e)))
    }
}

/// Two edges of `h` covering the six vertices of `six`, if any.
fn split_six(h: &Hypergraph3, six: VertexSet) -> Option<[Edge; 2]> {
    let a = six.first()?;
    let rest = six.difference(VertexSet::singleton(a)).to_vec();
    for i in 0..rest.len() {
        for j in i + 1..rest.len() {
            let (b, c) = (rest[i], rest[j]);
            if !h.contains(a, b, c) {
                continue;
            }
            let other: Vec<usize> = rest.iter().copied().filter(|&x| x != b && x != c).collect();
            if h.contains(other[0], other[1], other[2]) {
                return Some([[a, b, c], [other[0], other[1], other[2]]]);
            }
        }
    }
    None
}

fn check_triple(h: &Hypergraph3, t: &[usize; 3]) -> Result<VertexSet> {
    for &x in t {
        if x >= h.n() {
            return Err(Error::VertexOutOfRange { vertex: x, n: h.n() });
        }
    }
    let s = VertexSet::from_edge(t);
    if s.len() != 3 {
        return Err(Error::RepeatedVertex(*t));
    }
    Ok(s)
}

/// Whether the edge `e` absorbs the triple `t`.
pub fn absorbs(h: &Hypergraph3, e: &Edge, t: &[usize; 3]) -> Result<bool> {
    let es = check_triple(h, e)?;
    let ts = check_triple(h, t)?;
    if !h.contains(e[0], e[1], e[2]) {
        return Err(Error::InvalidArgument(format!("{e:?} is not an edge")));
    }
    if !es.is_disjoint(ts) {
        return Err(Error::OverlappingSets);
    }
    Ok(split_six(h, es.union(ts)).is_some())
}

fn absorbs_unchecked(h: &Hypergraph3, e: &Edge, t: &Edge) -> bool {
    split_six(h, VertexSet::from_edge(e).union(VertexSet::from_edge(t))).is_some()
}

/// Triples inside `set`: all of them if there are at most `limit`, otherwise
/// `limit` distinct ones drawn with `rng`. Sorted either way.
fn triple_pool(set: VertexSet, limit: usize, rng: &mut SplitMix64) -> (Vec<Edge>, bool) {
    let verts = set.to_vec();
    let k = verts.len();
    let total = binom(k as u64, 3);
    if total <= limit as u64 {
        let mut out = Vec::with_capacity(total as usize);
        for a in 0..k {
            for b in a + 1..k {
                for c in b + 1..k {
                    out.push([verts[a], verts[b], verts[c]]);
                }
            }
        }
        return (out, true);
    }
    let mut seen = BTreeSet::new();
    let mut attempts = 0;
    while seen.len() < limit && attempts < 8 * limit {
        attempts += 1;
        let mut t: Vec<usize> = sample(rng, k, 3).into_iter().map(|i| verts[i]).collect();
        t.sort_unstable();
        seen.insert([t[0], t[1], t[2]]);
    }
    (seen.into_iter().collect(), false)
}

fn size_cap(n: usize, cfg: &AbsorbConfig) -> usize {
    if cfg.contract {
        (cfg.gamma.powi(3) * n as f64 / 3.0).floor() as usize
    } else {
        (n / 6).max(1)
    }
}

/// Greedy search for an absorbing matching, followed by a coverage check of
/// the triples left outside it.
pub fn find_absorbing(h: &Hypergraph3, cfg: &AbsorbConfig) -> Result<AbsorbingMatching> {
    if !(cfg.gamma > 0.0 && cfg.gamma <= 1.0) {
        return Err(Error::InvalidArgument(format!("gamma must lie in (0, 1], got {}", cfg.gamma)));
    }
    if cfg.t == 0 || cfg.triple_limit == 0 || cfg.candidate_limit == 0 {
        return Err(Error::InvalidArgument("t and the sampling limits must be positive".into()));
    }
    let n = h.n();
    let mut rng = SplitMix64::new(cfg.seed);
    let cap = size_cap(n, cfg);
    let min_degree = h.min_degree(1).unwrap_or(0);
    let bound = (0.5 + 2.0 * cfg.gamma) * binom(n as u64, 2) as f64;
    let degree_hypothesis = DegreeHypothesis {
        min_degree,
        bound,
        holds: min_degree as f64 >= bound,
    };

    let (pool, _) = triple_pool(h.vertices(), cfg.triple_limit, &mut rng);
    let mut counts = vec![0usize; pool.len()];
    let mut mstar: Vec<Edge> = Vec::new();
    let mut covered = VertexSet::EMPTY;
    while mstar.len() < cap {
        let live: Vec<usize> = (0..pool.len())
            .filter(|&i| counts[i] < cfg.t && VertexSet::from_edge(&pool[i]).is_disjoint(covered))
            .collect();
        if live.is_empty() {
            break;
        }
        let free: Vec<&Edge> = h
            .edges()
            .iter()
            .filter(|e| VertexSet::from_edge(e).is_disjoint(covered))
            .collect();
        let candidates: Vec<&Edge> = if free.len() > cfg.candidate_limit {
            let mut idx = sample(&mut rng, free.len(), cfg.candidate_limit).into_vec();
            idx.sort_unstable();
            idx.into_iter().map(|i| free[i]).collect()
        } else {
            free
        };
        let best = candidates
            .par_iter()
            .enumerate()
            .map(|(ci, e)| {
                let es = VertexSet::from_edge(e);
                let gain = live
                    .iter()
                    .filter(|&&i| {
                        VertexSet::from_edge(&pool[i]).is_disjoint(es) && absorbs_unchecked(h, e, &pool[i])
                    })
                    .count();
                (gain, std::cmp::Reverse(ci))
            })
            .max();
        let Some((gain, std::cmp::Reverse(ci))) = best else { break };
        if gain == 0 {
            break;
        }
        let e = *candidates[ci];
        let es = VertexSet::from_edge(&e);
        for &i in &live {
            if VertexSet::from_edge(&pool[i]).is_disjoint(es) && absorbs_unchecked(h, &e, &pool[i]) {
                counts[i] += 1;
            }
        }
        mstar.push(e);
        covered = covered.union(es);
    }
    mstar.sort_unstable();

    let residual = h.vertices().difference(covered);
    let (triples, exhaustive) = triple_pool(residual, cfg.triple_limit, &mut rng);
    let index: Vec<Vec<u32>> = mstar
        .par_iter()
        .map(|e| {
            (0..triples.len() as u32)
                .filter(|&i| absorbs_unchecked(h, e, &triples[i as usize]))
                .collect()
        })
        .collect();
    let mut per_triple = vec![0usize; triples.len()];
    for list in &index {
        for &i in list {
            per_triple[i as usize] += 1;
        }
    }
    let under_covered = per_triple.iter().filter(|&&c| c < cfg.t).count();
    let coverage = Coverage {
        exhaustive,
        triples_checked: triples.len(),
        min_absorbers: per_triple.iter().copied().min().unwrap_or(mstar.len()),
        mean_absorbers: if triples.is_empty() {
            0.0
        } else {
            per_triple.iter().sum::<usize>() as f64 / triples.len() as f64
        },
        under_covered,
    };

    let mut capacity = 3 * mstar.len();
    if cfg.contract {
        let limit = (cfg.gamma.powi(6) * n as f64).floor() as usize;
        capacity = capacity.min(limit - limit % 3);
    }
    let failure = if cap == 0 {
        Some("size cap gamma^3 n / 3 is below one edge".to_string())
    } else if under_covered > 0 {
        Some(format!(
            "{under_covered} of {} checked triples have fewer than {} absorbers",
            triples.len(),
            cfg.t
        ))
    } else {
        None
    };
    Ok(AbsorbingMatching {
        schema: ABSORBING_SCHEMA.into(),
        n,
        gamma: cfg.gamma,
        t: cfg.t,
        contract: cfg.contract,
        matching: mstar,
        size_cap: cap,
        capacity,
        triples,
        absorbs: index,
        coverage,
        degree_hypothesis,
        success: failure.is_none(),
        failure,
    })
}

struct Assignment<'a> {
    h: &'a Hypergraph3,
    edges: &'a [Edge],
    used: Vec<bool>,
    chosen: Vec<(usize, [Edge; 2])>,
    nodes: u64,
    limit: u64,
}

impl Assignment<'_> {
    fn search(&mut self, left: VertexSet) -> Option<bool> {
        let Some(x) = left.first() else { return Some(true) };
        self.nodes += 1;
        if self.nodes > self.limit {
            return None;
        }
        let rest = left.difference(VertexSet::singleton(x)).to_vec();
        for i in 0..rest.len() {
            for j in i + 1..rest.len() {
                let t = VertexSet::from_edge(&[x, rest[i], rest[j]]);
                for k in 0..self.edges.len() {
                    if self.used[k] {
                        continue;
                    }
                    let Some(split) = split_six(self.h, t.union(VertexSet::from_edge(&self.edges[k]))) else {
                        continue;
                    };
                    self.used[k] = true;
                    self.chosen.push((k, split));
                    match self.search(left.difference(t)) {
                        Some(true) => return Some(true),
                        None => return None,
                        Some(false) => {}
                    }
                    self.chosen.pop();
                    self.used[k] = false;
                }
            }
        }
        Some(false)
    }
}

/// Folds the leftover set `vp` into the absorbing matching.
///
/// The result covers exactly `V(M*) ∪ vp`.
pub fn absorb_leftover(
    h: &Hypergraph3,
    a: &AbsorbingMatching,
    vp: VertexSet,
    backtrack_limit: u64,
) -> Result<Matching> {
    let mstar = Matching::new(h, a.matching.clone())?;
    let base = mstar.covered();
    if !vp.is_disjoint(base) {
        return Err(Error::InvalidArgument("leftover meets the absorbing matching".into()));
    }
    if !vp.is_subset(h.vertices()) {
        return Err(Error::InvalidArgument("leftover contains vertices outside the hypergraph".into()));
    }
    if vp.len() % 3 != 0 {
        return Err(Error::InvalidArgument(format!(
            "leftover size {} is not a multiple of 3",
            vp.len()
        )));
    }
    if vp.is_empty() {
        return Ok(mstar);
    }
    if vp.len() > a.capacity {
        return Err(Error::Absorption(format!(
            "leftover of {} vertices exceeds capacity {}",
            vp.len(),
            a.capacity
        )));
    }
    let mut search = Assignment {
        h,
        edges: &a.matching,
        used: vec![false; a.matching.len()],
        chosen: Vec::new(),
        nodes: 0,
        limit: backtrack_limit,
    };
    match search.search(vp) {
        Some(true) => {}
        Some(false) => {
            return Err(Error::Absorption("no assignment of leftover triples to absorbing edges".into()))
        }
        None => return Err(Error::Absorption("assignment search ran out of budget".into())),
    }
    let mut out: Vec<Edge> = a
        .matching
        .iter()
        .enumerate()
        .filter(|(k, _)| !search.used[*k])
        .map(|(_, e)| *e)
        .collect();
    for (_, split) in &search.chosen {
        out.extend(split.iter().copied());
    }
    out.sort_unstable();
    let m = Matching::new(h, out)?;
    if m.covered() != base.union(vp) {
        return Err(Error::Absorption("result does not cover V(M*) ∪ V' exactly".into()));
    }
    Ok(m)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PerfectConfig {
    pub absorb: AbsorbConfig,
    pub augment: AugmentConfig,
}

/// Absorbing matching, then augmentation outside it, then absorption of the
/// leftover. The report names the failing phase when no perfect matching is
/// produced.
pub fn perfect_via_absorbing(h: &Hypergraph3, cfg: &PerfectConfig) -> Result<(SolveReport, AbsorbingMatching)> {
    let clock = std::time::Instant::now();
    let n = h.n();
    let a = find_absorbing(h, &cfg.absorb)?;
    let finish = |m: Matching, failure: Option<String>, nodes: u64| {
        let mut r = SolveReport::new("absorbing", n, m);
        r.optimal = failure.is_none();
        r.failure = failure;
        r.nodes = nodes;
        r.wall_ms = clock.elapsed().as_secs_f64() * 1e3;
        r
    };
    let mstar = Matching::new(h, a.matching.clone())?;
    if n % 3 != 0 {
        let r = finish(mstar, Some(format!("phase input: n = {n} is not a multiple of 3")), 0);
        return Ok((r, a));
    }
    if let Some(why) = &a.failure {
        let r = finish(mstar, Some(format!("phase absorbing: {why}")), 0);
        return Ok((r, a));
    }

    let covered = a.covered();
    let (rest, map) = h.remove_vertices(covered);
    let (report, _) = augment::solve(&rest, rest.n() / 3, &cfg.augment)?;
    let mut edges: Vec<Edge> = report
        .matching
        .iter()
        .map(|e| {
            let mut f = [map[e[0]], map[e[1]], map[e[2]]];
            f.sort_unstable();
            f
        })
        .collect();
    let outside: VertexSet = edges
        .iter()
        .fold(VertexSet::EMPTY, |acc, e| acc.union(VertexSet::from_edge(e)));
    let leftover = h.vertices().difference(covered).difference(outside);
    if leftover.len() > a.capacity {
        edges.extend(a.matching.iter().copied());
        edges.sort_unstable();
        let why = format!(
            "phase augment: {} vertices left outside M*, capacity {}",
            leftover.len(),
            a.capacity
        );
        return Ok((finish(Matching::from_edges_unchecked(edges), Some(why), report.nodes), a));
    }
    match absorb_leftover(h, &a, leftover, cfg.absorb.backtrack_limit) {
        Ok(folded) => {
            edges.extend(folded.into_edges());
            edges.sort_unstable();
            let m = Matching::new(h, edges)?;
            let failure = (3 * m.len() != n).then(|| "phase absorb: matching is not perfect".to_string());
            Ok((finish(m, failure, report.nodes), a))
        }
        Err(Error::Absorption(why)) => {
            edges.extend(a.matching.iter().copied());
            edges.sort_unstable();
            let r = finish(Matching::from_edges_unchecked(edges), Some(format!("phase absorb: {why}")), report.nodes);
            Ok((r, a))
        }
        Err(e) => Err(e),
    }
}
