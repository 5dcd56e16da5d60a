//! Closeness to `H_{n,d}` and the constructive matchers for hypergraphs that
//! look like it.
//!
//! A vertex is *bad* when it misses more than `alpha * n^2` of the edges it
//! would have in `H_{n,d}(V, W)`. [`good_case_matching`] handles the case where
//! every vertex is good, growing a matching of `VVW` edges by 2-for-3 swaps.
//! [`staged_matching`] first covers the bad vertices in four greedy stages and
//! then hands the rest to the good-case matcher.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{has_d_matching_in_subset, Decision, SolveBudget};
use crate::hypergraph::{binom, Edge, EdgeType, Hypergraph3, Matching, Partition};
use crate::link::{self, BipartitePattern, PatternClass};
use crate::vset::VertexSet;

pub const CLOSENESS_SCHEMA: &str = "hypermatch.closeness.v1";
pub const STAGES_SCHEMA: &str = "hypermatch.stages.v1";

/// Largest number of candidate classes `W` that exhaustive search will visit.
pub const EXHAUSTIVE_CAP: u128 = 1_000_000;

fn type_of(e: &Edge, w: VertexSet) -> EdgeType {
    match VertexSet::from_edge(e).intersection(w).len() {
        0 => EdgeType::VVV,
        1 => EdgeType::VVW,
        2 => EdgeType::VWW,
        _ => EdgeType::WWW,
    }
}

/// Edges of `H_{|active|, |W|}` missing from `H[active]`, total and per vertex.
fn missing_incidences(h: &Hypergraph3, active: VertexSet, w: VertexSet) -> (u64, Vec<u64>) {
    let w = w.intersection(active);
    let v = active.difference(w);
    let (nv, nw) = (v.len() as u64, w.len() as u64);
    let mut present = vec![0u64; h.n()];
    let mut total_present = 0u64;
    for e in h.edges_within(active) {
        if matches!(type_of(e, w), EdgeType::VVW | EdgeType::VWW) {
            total_present += 1;
            for &x in e {
                present[x] += 1;
            }
        }
    }
    let expected_total = binom(nv, 2) * nw + nv * binom(nw, 2);
    let expected_v = nv.saturating_sub(1) * nw + binom(nw, 2);
    let expected_w = binom(nv, 2) + nv * nw.saturating_sub(1);
    let mut badness = vec![0u64; h.n()];
    for x in active.iter() {
        let expected = if w.contains(x) { expected_w } else { expected_v };
        badness[x] = expected - present[x];
    }
    (expected_total - total_present, badness)
}

/// `|E(H_{n,d}(V, W)) \ E(H)|`.
pub fn deficiency(h: &Hypergraph3, p: &Partition) -> Result<u64> {
    check_partition(h, p)?;
    Ok(missing_incidences(h, h.vertices(), p.w()).0)
}

fn check_partition(h: &Hypergraph3, p: &Partition) -> Result<()> {
    if p.n() != h.n() {
        return Err(Error::InvalidArgument(format!(
            "partition covers {} vertices, hypergraph has {}",
            p.n(),
            h.n()
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosenessReport {
    pub schema: String,
    pub n: usize,
    pub d: usize,
    pub partition: Partition,
    pub deficiency: u64,
    /// `deficiency / n^3`.
    pub epsilon: f64,
    pub alpha: f64,
    /// Per-vertex count of missing `H_{n,d}` edges.
    pub badness: Vec<u64>,
    pub v_bad: Vec<usize>,
    pub w_bad: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub search: Option<String>,
}

impl ClosenessReport {
    pub fn all_good(&self) -> bool {
        self.v_bad.is_empty() && self.w_bad.is_empty()
    }

    pub fn is_bad(&self, v: usize) -> bool {
        self.badness[v] as f64 > self.alpha * (self.n * self.n) as f64
    }
}

fn bad_set(badness: &[u64], active: VertexSet, alpha: f64, order: usize) -> VertexSet {
    let limit = alpha * (order * order) as f64;
    active.iter().filter(|&v| badness[v] as f64 > limit).collect()
}

/// Badness of every vertex against `H_{n,|W|}(V, W)` and the `alpha` flags.
pub fn classify_goodness(h: &Hypergraph3, p: &Partition, alpha: f64) -> Result<ClosenessReport> {
    check_partition(h, p)?;
    if !(alpha >= 0.0) {
        return Err(Error::InvalidArgument(format!("alpha must be >= 0, got {alpha}")));
    }
    let (def, badness) = missing_incidences(h, h.vertices(), p.w());
    let bad = bad_set(&badness, h.vertices(), alpha, h.n());
    let n = h.n();
    Ok(ClosenessReport {
        schema: CLOSENESS_SCHEMA.into(),
        n,
        d: p.w_size(),
        partition: *p,
        deficiency: def,
        epsilon: if n == 0 { 0.0 } else { def as f64 / (n as f64).powi(3) },
        alpha,
        badness,
        v_bad: bad.difference(p.w()).to_vec(),
        w_bad: bad.intersection(p.w()).to_vec(),
        search: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Seeding {
    /// The `d` vertices of highest degree, lowest index first on ties.
    Degree,
    /// Bottom vertices read off the `B113` base edges of link graphs between
    /// pairs of edges of a large matching, padded by degree.
    BottomVertices,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FindMode {
    /// Every `W` of size `d`; refused when there are more than [`EXHAUSTIVE_CAP`].
    Exhaustive,
    /// Hill climbing by single swaps between the classes.
    Local(Seeding),
}

fn deficiency_for(h: &Hypergraph3, w: VertexSet) -> u64 {
    missing_incidences(h, h.vertices(), w).0
}

fn degree_seed(h: &Hypergraph3, d: usize) -> VertexSet {
    let mut order: Vec<usize> = (0..h.n()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(h.degree(v).unwrap_or(0)), v));
    order.into_iter().take(d).collect()
}

fn bottom_vertex_seed(h: &Hypergraph3, d: usize) -> VertexSet {
    let start = crate::augment::greedy_matching(h, None);
    let m = crate::augment::solve_from(h, start.clone(), d, &Default::default())
        .map(|(r, _)| r.matching())
        .unwrap_or(start);
    let uncovered = m.uncovered(h.n());
    let edges = m.edges();
    let mut votes = vec![0usize; h.n()];
    for (i, e) in edges.iter().enumerate() {
        for f in &edges[i + 1..] {
            for v in uncovered.iter() {
                let Ok(l) = link::link_bipartite(h, v, e, f) else { continue };
                let Some(p) = l.pattern else { continue };
                if let PatternClass::B113 { base: (x, y) } = link::classify(p) {
                    votes[e[x]] += 1;
                    votes[f[y]] += 1;
                }
            }
        }
    }
    let mut bottoms: Vec<(usize, usize)> = edges
        .iter()
        .filter_map(|e| {
            let best = e.iter().copied().max_by_key(|&x| (votes[x], std::cmp::Reverse(x)))?;
            (votes[best] > 0).then_some((votes[best], best))
        })
        .collect();
    bottoms.sort_by_key(|&(c, v)| (std::cmp::Reverse(c), v));
    let mut w: VertexSet = bottoms.into_iter().take(d).map(|(_, v)| v).collect();
    let mut by_degree: Vec<usize> = (0..h.n()).collect();
    by_degree.sort_by_key(|&v| (std::cmp::Reverse(h.degree(v).unwrap_or(0)), v));
    for v in by_degree {
        if w.len() >= d {
            break;
        }
        w.insert(v);
    }
    w
}

/// Searches for a partition with `|W| = d` minimising the deficiency.
pub fn find_partition(h: &Hypergraph3, d: usize, mode: FindMode, alpha: f64) -> Result<ClosenessReport> {
    let n = h.n();
    if d > n {
        return Err(Error::InvalidArgument(format!("class W of size {d} exceeds n = {n}")));
    }
    let (w, note) = match mode {
        FindMode::Exhaustive => {
            let count = binom(n as u64, d as u64) as u128;
            if count > EXHAUSTIVE_CAP {
                return Err(Error::EnumerationCap {
                    count,
                    cap: EXHAUSTIVE_CAP,
                });
            }
            let mut best: Option<(u64, VertexSet)> = None;
            let mut comb: Vec<usize> = (0..d).collect();
            loop {
                let w: VertexSet = comb.iter().copied().collect();
                let def = deficiency_for(h, w);
                if best.map_or(true, |(b, _)| def < b) {
                    best = Some((def, w));
                }
                let Some(i) = (0..d).rev().find(|&i| comb[i] < n - d + i) else {
                    break;
                };
                comb[i] += 1;
                for j in i + 1..d {
                    comb[j] = comb[j - 1] + 1;
                }
            }
            let w = best.map(|(_, w)| w).unwrap_or_default();
            (w, format!("exhaustive over {count} classes"))
        }
        FindMode::Local(seeding) => {
            let mut w = match seeding {
                Seeding::Degree => degree_seed(h, d),
                Seeding::BottomVertices => bottom_vertex_seed(h, d),
            };
            let mut current = deficiency_for(h, w);
            let mut swaps = 0;
            loop {
                let mut best: Option<(u64, usize, usize)> = None;
                for out in w.iter() {
                    for inn in h.vertices().difference(w).iter() {
                        let mut cand = w;
                        cand.remove(out);
                        cand.insert(inn);
                        let def = deficiency_for(h, cand);
                        if def < current && best.map_or(true, |(b, _, _)| def < b) {
                            best = Some((def, out, inn));
                        }
                    }
                }
                let Some((def, out, inn)) = best else { break };
                w.remove(out);
                w.insert(inn);
                current = def;
                swaps += 1;
            }
            (w, format!("local search ({seeding:?} seed), {swaps} swaps"))
        }
    };
    let mut report = classify_goodness(h, &Partition::new(n, w)?, alpha)?;
    report.search = Some(note);
    Ok(report)
}

/// Result of the all-good matcher.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoodCaseOutcome {
    pub matching: Matching,
    /// Number of 2-for-3 swaps applied.
    pub swaps: usize,
    /// Whether every vertex was `alpha`-good at the start.
    pub all_good: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub stall: Option<String>,
}

impl GoodCaseOutcome {
    pub fn succeeded(&self) -> bool {
        self.stall.is_none()
    }
}

/// Splits `verts` into triples that are all `VVW` edges of `h`.
fn vvw_cover(h: &Hypergraph3, verts: VertexSet, w: VertexSet, acc: &mut Vec<Edge>) -> bool {
    let Some(a) = verts.first() else { return true };
    let rest = verts.difference(VertexSet::singleton(a));
    for b in rest.iter() {
        for c in h.pair_link(a, b).intersection(rest).iter().filter(|&c| c > b) {
            let e = [a, b, c];
            if type_of(&e, w) != EdgeType::VVW {
                continue;
            }
            acc.push(e);
            if vvw_cover(h, rest.difference(VertexSet::from_edge(&e)), w, acc) {
                return true;
            }
            acc.pop();
        }
    }
    false
}

/// `e1 e2` is good for `v1 v2 w` when every `VVW` triple with one vertex in
/// each of `{v1, v2, w}`, `e1` and `e2` is an edge.
fn pair_is_good(h: &Hypergraph3, trio: [usize; 3], e1: &Edge, e2: &Edge, w: VertexSet) -> bool {
    trio.iter().all(|&a| {
        e1.iter().all(|&b| {
            e2.iter().all(|&c| {
                let mut t = [a, b, c];
                t.sort_unstable();
                type_of(&t, w) != EdgeType::VVW || h.contains(a, b, c)
            })
        })
    })
}

/// The all-good matcher on `H[active]` with classes `v`, `w`.
fn good_case_in(
    h: &Hypergraph3,
    active: VertexSet,
    v: VertexSet,
    w: VertexSet,
    d: usize,
) -> (Vec<Edge>, usize, Option<String>) {
    let (v, w) = (v.intersection(active), w.intersection(active));
    let mut m: Vec<Edge> = Vec::new();
    let mut covered = VertexSet::EMPTY;
    for e in h.edges_within(active) {
        if m.len() >= d {
            break;
        }
        let s = VertexSet::from_edge(e);
        if type_of(e, w) == EdgeType::VVW && s.is_disjoint(covered) {
            m.push(*e);
            covered = covered.union(s);
        }
    }

    let mut swaps = 0;
    'grow: while m.len() < d {
        let free_v = v.difference(covered);
        let free_w = w.difference(covered);
        if free_v.len() < 2 || free_w.is_empty() {
            let why = format!(
                "size {}: {} free V and {} free W vertices left",
                m.len(),
                free_v.len(),
                free_w.len()
            );
            return (m, swaps, Some(why));
        }
        let free = free_v.union(free_w);
        if let Some(e) = h
            .edges_within(free)
            .find(|e| type_of(e, w) == EdgeType::VVW)
        {
            m.push(*e);
            covered = covered.union(VertexSet::from_edge(e));
            continue;
        }
        let fv = free_v.to_vec();
        // Strict pass uses the good-pair criterion; the relaxed pass accepts
        // any pair whose nine vertices split into three VVW edges.
        for strict in [true, false] {
            for (i, &v1) in fv.iter().enumerate() {
                for &v2 in &fv[i + 1..] {
                    for x in free_w.iter() {
                        let trio = [v1, v2, x];
                        for a in 0..m.len() {
                            for b in a + 1..m.len() {
                                let (e1, e2) = (m[a], m[b]);
                                if strict && !pair_is_good(h, trio, &e1, &e2, w) {
                                    continue;
                                }
                                let nine = VertexSet::from_edge(&e1)
                                    .union(VertexSet::from_edge(&e2))
                                    .union(trio.into_iter().collect());
                                let mut cover = Vec::with_capacity(3);
                                if vvw_cover(h, nine, w, &mut cover) {
                                    m.remove(b);
                                    m.remove(a);
                                    m.extend(cover);
                                    covered = covered.union(trio.into_iter().collect());
                                    swaps += 1;
                                    continue 'grow;
                                }
                            }
                        }
                    }
                }
            }
        }
        let why = format!("size {}: no pair of matching edges admits a swap", m.len());
        return (m, swaps, Some(why));
    }
    m.sort_unstable();
    (m, swaps, None)
}

/// Builds a `d`-matching of `VVW` edges when every vertex is good.
pub fn good_case_matching(h: &Hypergraph3, p: &Partition, d: usize, alpha: f64) -> Result<GoodCaseOutcome> {
    let report = classify_goodness(h, p, alpha)?;
    let (edges, swaps, stall) = good_case_in(h, h.vertices(), p.v(), p.w(), d);
    let matching = Matching::new(h, edges)?;
    Ok(GoodCaseOutcome {
        matching,
        swaps,
        all_good: report.all_good(),
        stall,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StagedConfig {
    /// Badness threshold as a fraction of `n^2`.
    pub alpha: f64,
    /// A bad vertex is useful with at least `theta * n^2` link pairs in `V2 x W1`.
    pub theta: f64,
    pub node_limit: u64,
}

impl Default for StagedConfig {
    fn default() -> Self {
        StagedConfig {
            alpha: 0.05,
            theta: 0.01,
            node_limit: 1_000_000,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub edges: Vec<Edge>,
    pub types: Vec<EdgeType>,
}

impl Stage {
    fn new(edges: Vec<Edge>, p: &Partition) -> Self {
        let types = edges.iter().map(|e| p.edge_type(e)).collect();
        Stage { edges, types }
    }
}

/// Minimum-degree check on `H[V ∪ W_bad]` that justifies the first stage.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FirstStageDegreeCheck {
    /// `|V ∪ W_bad|`
    pub a: usize,
    pub c: usize,
    pub min_degree: Option<usize>,
    /// `C(a-1, 2) - C(a-c, 2)`
    pub bound: i64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageLog {
    pub schema: String,
    pub d: usize,
    pub v_bad: Vec<usize>,
    pub w_bad: Vec<usize>,
    pub c: usize,
    pub m2: usize,
    pub m3: usize,
    pub stages: [Stage; 5],
    pub degree_check: FirstStageDegreeCheck,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageStall {
    pub stage: u8,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StagedOutcome {
    pub matching: Option<Matching>,
    pub log: StageLog,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub stall: Option<StageStall>,
}

fn union_of(edges: &[Edge]) -> VertexSet {
    edges
        .iter()
        .fold(VertexSet::EMPTY, |acc, e| acc.union(VertexSet::from_edge(e)))
}

/// Staged construction of a `d`-matching for hypergraphs close to `H_{n,d}`.
///
/// 1. `M1`: a `|W_bad|`-matching inside `V ∪ W_bad`, preferring edges with
///    exactly one vertex of `W_bad` so that every bad `W` vertex is covered.
/// 2. `M2`: one `V2 V2 W1` edge per useful bad vertex.
/// 3. `M3`: `VVV` edges inside `V3` covering the remaining bad vertices.
/// 4. `M4`: one `V4 W2 W2` edge per edge of `M3`, restoring the class balance.
/// 5. `M5`: the all-good matcher on what is left.
pub fn staged_matching(h: &Hypergraph3, p: &Partition, d: usize, cfg: &StagedConfig) -> Result<StagedOutcome> {
    check_partition(h, p)?;
    if p.w_size() != d {
        return Err(Error::InvalidArgument(format!(
            "staged matching needs |W| = d, got |W| = {} and d = {d}",
            p.w_size()
        )));
    }
    let n = h.n();
    let (v, w) = (p.v(), p.w());
    let (_, badness) = missing_incidences(h, h.vertices(), w);
    let bad = bad_set(&badness, h.vertices(), cfg.alpha, n);
    let (v_bad, w_bad) = (bad.difference(w), bad.intersection(w));
    let budget = SolveBudget::default().with_node_limit(cfg.node_limit);

    let c = w_bad.len();
    let v1 = v.union(w_bad);
    let a = v1.len();
    let (h_v1, _) = h.induced(v1);
    let min_degree = h_v1.min_degree(1).ok();
    let bound = binom(a.saturating_sub(1) as u64, 2) as i64 - binom((a - c) as u64, 2) as i64;
    let degree_check = FirstStageDegreeCheck {
        a,
        c,
        min_degree,
        bound,
        holds: min_degree.map_or(false, |m| m as i64 > bound),
    };

    let mut log = StageLog {
        schema: STAGES_SCHEMA.into(),
        d,
        v_bad: v_bad.to_vec(),
        w_bad: w_bad.to_vec(),
        c,
        m2: 0,
        m3: 0,
        stages: Default::default(),
        degree_check,
        notes: Vec::new(),
    };
    let stall = |log: StageLog, stage: u8, reason: String| StagedOutcome {
        matching: None,
        log,
        stall: Some(StageStall { stage, reason }),
    };

    // Stage 1.
    let mut m1: Vec<Edge> = Vec::new();
    if c > 0 {
        let covering = Hypergraph3::from_sorted(
            n,
            h.edges_within(v1)
                .filter(|e| VertexSet::from_edge(e).intersection(w_bad).len() == 1)
                .copied()
                .collect(),
        );
        let found = match has_d_matching_in_subset(&covering, v1, c, &budget) {
            Decision::Yes(m) => Some(m),
            _ => {
                log.notes
                    .push("stage 1: no matching covering W_bad; using any matching in V ∪ W_bad".into());
                match has_d_matching_in_subset(h, v1, c, &budget) {
                    Decision::Yes(m) => Some(m),
                    _ => None,
                }
            }
        };
        match found {
            Some(m) => m1 = m.into_edges(),
            None => {
                return Ok(stall(log, 1, format!("no {c}-matching inside V ∪ W_bad")));
            }
        }
    }
    log.stages[0] = Stage::new(m1.clone(), p);

    let active1 = h.vertices().difference(union_of(&m1));
    let v2 = v1.intersection(active1);
    let w1 = w.difference(w_bad);
    let b = d - c;
    let n1 = active1.len();
    let (_, badness1) = missing_incidences(h, active1, w1);
    let bad1 = bad_set(&badness1, active1, cfg.alpha, n1);
    if !bad1.intersection(w1).is_empty() {
        log.notes.push(format!(
            "W vertices {:?} are bad after stage 1",
            bad1.intersection(w1).to_vec()
        ));
    }
    let v2_bad = bad1.intersection(v2);

    // Stage 2: useful bad vertices.
    let useful_limit = cfg.theta * (n1 * n1) as f64;
    let mut m2: Vec<Edge> = Vec::new();
    let mut covered = VertexSet::EMPTY;
    for x in v2_bad.iter() {
        let pairs: usize = w1
            .iter()
            .map(|y| h.pair_link(x, y).intersection(v2).len())
            .sum();
        if (pairs as f64) < useful_limit || covered.contains(x) {
            continue;
        }
        let free_v = v2.difference(covered).difference(VertexSet::singleton(x));
        let free_w = w1.difference(covered);
        let choice = free_w.iter().find_map(|y| {
            let options = h.pair_link(x, y).intersection(free_v);
            let good = options.difference(v2_bad);
            good.first().or(options.first()).map(|z| [x, y, z])
        });
        if let Some(mut e) = choice {
            e.sort_unstable();
            covered = covered.union(VertexSet::from_edge(&e));
            m2.push(e);
        }
    }
    log.m2 = m2.len();
    log.stages[1] = Stage::new(m2.clone(), p);

    let active2 = active1.difference(covered);
    let v3 = v2.intersection(active2);
    let w2 = w1.intersection(active2);

    // Stage 3: cover the remaining bad vertices with VVV edges inside V3.
    let mut m3: Vec<Edge> = Vec::new();
    let mut taken = VertexSet::EMPTY;
    let pending = v2_bad.intersection(v3);
    for x in pending.iter() {
        if taken.contains(x) {
            continue;
        }
        let free = v3.difference(taken).difference(VertexSet::singleton(x));
        let still_bad = pending.difference(taken);
        let mut best: Option<(usize, Edge)> = None;
        for y in free.iter() {
            for z in h.pair_link(x, y).intersection(free).iter().filter(|&z| z > y) {
                let mut e = [x, y, z];
                e.sort_unstable();
                let score = VertexSet::from_edge(&e).intersection(still_bad).len();
                if best.map_or(true, |(s, _)| score > s) {
                    best = Some((score, e));
                }
            }
        }
        match best {
            Some((_, e)) => {
                taken = taken.union(VertexSet::from_edge(&e));
                m3.push(e);
            }
            None => {
                log.m3 = m3.len();
                log.stages[2] = Stage::new(m3, p);
                return Ok(stall(log, 3, format!("bad vertex {x} has no VVV edge inside V3")));
            }
        }
    }
    log.m3 = m3.len();
    log.stages[2] = Stage::new(m3.clone(), p);

    // Stage 4: one V4 W2 W2 edge per M3 edge.
    let active3 = active2.difference(taken);
    let v4 = v3.intersection(active3);
    let mut m4: Vec<Edge> = Vec::new();
    let mut used = VertexSet::EMPTY;
    for _ in 0..m3.len() {
        let free_v = v4.difference(used);
        let free_w = w2.difference(used);
        let pick = free_v
            .difference(v2_bad)
            .iter()
            .chain(free_v.intersection(v2_bad).iter())
            .find_map(|x| {
                free_w.iter().find_map(|y| {
                    h.pair_link(x, y)
                        .intersection(free_w)
                        .iter()
                        .find(|&z| z > y)
                        .map(|z| [x, y, z])
                })
            });
        match pick {
            Some(mut e) => {
                e.sort_unstable();
                used = used.union(VertexSet::from_edge(&e));
                m4.push(e);
            }
            None => {
                log.stages[3] = Stage::new(m4, p);
                return Ok(stall(log, 4, "no V4 W2 W2 edge left to rebalance the classes".into()));
            }
        }
    }
    log.stages[3] = Stage::new(m4.clone(), p);

    // Stage 5.
    let spent_w = m2.len() + 2 * m3.len();
    if spent_w > b {
        return Ok(stall(log, 5, format!("stages 2-4 used {spent_w} W vertices, only {b} available")));
    }
    let active4 = active3.difference(used);
    let target = b - spent_w;
    let (m5, _, why) = good_case_in(h, active4, v4.intersection(active4), w2.intersection(active4), target);
    log.stages[4] = Stage::new(m5.clone(), p);
    if let Some(reason) = why {
        return Ok(stall(log, 5, reason));
    }

    let mut all: Vec<Edge> = m1.into_iter().chain(m2).chain(m3).chain(m4).chain(m5).collect();
    all.sort_unstable();
    let matching = Matching::new(h, all)?;
    debug_assert_eq!(matching.len(), d);
    Ok(StagedOutcome {
        matching: Some(matching),
        log,
        stall: None,
    })
}

/// Link pattern of `v` between two triples, for callers outside this module.
pub fn link_pattern(h: &Hypergraph3, v: usize, e: &Edge, f: &Edge) -> Result<BipartitePattern> {
    link::link_bipartite(h, v, e, f)?
        .pattern
        .ok_or_else(|| Error::InvalidArgument("link between triples has no pattern".into()))
}
