//! Link graphs and the classification of 3x3 bipartite patterns.
//!
//! For a vertex `v`, the link graph joins `a` and `b` whenever `{v, a, b}` is
//! an edge. Restricted to two disjoint triples `E = (x1, x2, x3)` and
//! `F = (y1, y2, y3)` it becomes a labelled bipartite graph on 3 + 3 vertices,
//! encoded as a 9-bit [`BipartitePattern`] with bit `3i + j` for `x_i y_j`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{Edge, Hypergraph3};
use crate::vset::VertexSet;

/// The six permutations of `{0, 1, 2}`.
pub const PERMUTATIONS_3: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Labelled bipartite graph between `X = {x1, x2, x3}` and `Y = {y1, y2, y3}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BipartitePattern(u16);

impl BipartitePattern {
    pub const FULL: BipartitePattern = BipartitePattern(0x1ff);

    pub fn new(mask: u16) -> Result<Self> {
        if mask > 0x1ff {
            return Err(Error::InvalidArgument(format!(
                "pattern mask {mask:#x} uses more than 9 bits"
            )));
        }
        Ok(BipartitePattern(mask))
    }

    /// Pattern from 0-based `(i, j)` pairs meaning `x_i y_j`.
    pub fn from_pairs(pairs: &[(usize, usize)]) -> Result<Self> {
        let mut mask = 0u16;
        for &(i, j) in pairs {
            if i > 2 || j > 2 {
                return Err(Error::InvalidArgument(format!("pair ({i}, {j}) outside 3x3")));
            }
            mask |= 1 << (3 * i + j);
        }
        Ok(BipartitePattern(mask))
    }

    pub fn mask(self) -> u16 {
        self.0
    }

    #[inline]
    pub fn has(self, i: usize, j: usize) -> bool {
        (self.0 >> (3 * i + j)) & 1 == 1
    }

    pub fn edge_count(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn pairs(self) -> Vec<(usize, usize)> {
        (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .filter(|&(i, j)| self.has(i, j))
            .collect()
    }

    pub fn x_degrees(self) -> [usize; 3] {
        std::array::from_fn(|i| (0..3).filter(|&j| self.has(i, j)).count())
    }

    pub fn y_degrees(self) -> [usize; 3] {
        std::array::from_fn(|j| (0..3).filter(|&i| self.has(i, j)).count())
    }

    /// A permutation `sigma` with every `x_i y_sigma(i)` present, if any.
    pub fn perfect_matching(self) -> Option<[usize; 3]> {
        PERMUTATIONS_3
            .iter()
            .copied()
            .find(|s| (0..3).all(|i| self.has(i, s[i])))
    }

    pub fn has_perfect_matching(self) -> bool {
        self.perfect_matching().is_some()
    }

    /// Relabels `x_i -> x_px[i]` and `y_j -> y_py[j]`.
    pub fn relabel(self, px: [usize; 3], py: [usize; 3]) -> Self {
        let mut mask = 0u16;
        for (i, j) in self.pairs() {
            mask |= 1 << (3 * px[i] + py[j]);
        }
        BipartitePattern(mask)
    }

    /// Swaps the roles of `X` and `Y`.
    pub fn transpose(self) -> Self {
        let mut mask = 0u16;
        for (i, j) in self.pairs() {
            mask |= 1 << (3 * j + i);
        }
        BipartitePattern(mask)
    }

    /// Lexicographically smallest mask over the 36 class-preserving relabellings.
    pub fn canonical(self) -> u16 {
        PERMUTATIONS_3
            .iter()
            .flat_map(|&px| PERMUTATIONS_3.iter().map(move |&py| self.relabel(px, py).0))
            .min()
            .unwrap_or(self.0)
    }

    /// Canonical form up to graph isomorphism, i.e. also allowing `X <-> Y`.
    pub fn canonical_unordered(self) -> u16 {
        self.canonical().min(self.transpose().canonical())
    }

    pub fn classify(self) -> PatternClass {
        classify(self)
    }
}

/// Which side of a pattern holds a distinguished vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    X,
    Y,
}

/// The classes of 3x3 bipartite patterns.
///
/// `B033` and `B023` have an isolated vertex; `isolated` records its side. For
/// `B113`, `base` holds the two degree-3 vertices `(x_i, y_j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PatternClass {
    HasPerfectMatching,
    B033 { isolated: Side },
    B023 { isolated: Side },
    B113 { base: (usize, usize) },
    /// No perfect matching and at most four edges.
    Deficient,
    /// No perfect matching but at least five edges and none of the shapes above.
    Unrecognised,
}

impl PatternClass {
    pub fn name(&self) -> &'static str {
        match self {
            PatternClass::HasPerfectMatching => "has_pm",
            PatternClass::B033 { .. } => "B033",
            PatternClass::B023 { .. } => "B023",
            PatternClass::B113 { .. } => "B113",
            PatternClass::Deficient => "deficient",
            PatternClass::Unrecognised => "unrecognised",
        }
    }
}

fn sorted(mut d: [usize; 3]) -> [usize; 3] {
    d.sort_unstable();
    d
}

pub fn classify(p: BipartitePattern) -> PatternClass {
    if p.has_perfect_matching() {
        return PatternClass::HasPerfectMatching;
    }
    let e = p.edge_count();
    if e <= 4 {
        return PatternClass::Deficient;
    }
    let (xd, yd) = (p.x_degrees(), p.y_degrees());
    let (xs, ys) = (sorted(xd), sorted(yd));
    match e {
        6 if xs == [0, 3, 3] && ys == [2, 2, 2] => PatternClass::B033 { isolated: Side::X },
        6 if ys == [0, 3, 3] && xs == [2, 2, 2] => PatternClass::B033 { isolated: Side::Y },
        5 if xs == [0, 2, 3] && ys == [1, 2, 2] => PatternClass::B023 { isolated: Side::X },
        5 if ys == [0, 2, 3] && xs == [1, 2, 2] => PatternClass::B023 { isolated: Side::Y },
        5 if xs == [1, 1, 3] && ys == [1, 1, 3] => {
            let bx = xd.iter().position(|&d| d == 3).unwrap_or(0);
            let by = yd.iter().position(|&d| d == 3).unwrap_or(0);
            if p.has(bx, by) {
                PatternClass::B113 { base: (bx, by) }
            } else {
                PatternClass::Unrecognised
            }
        }
        _ => PatternClass::Unrecognised,
    }
}

/// The base edge `(x_i, y_j)` of a `B113` copy.
pub fn base_edge(p: BipartitePattern) -> Result<(usize, usize)> {
    match classify(p) {
        PatternClass::B113 { base } => Ok(base),
        _ => Err(Error::NotB113 { mask: p.mask() }),
    }
}

/// Outcome of the exhaustive sweep over all 512 labelled patterns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fact1Report {
    pub schema: String,
    pub patterns: usize,
    /// `counts[class][edge_count]`.
    pub counts: BTreeMap<String, BTreeMap<usize, usize>>,
    /// Labelled copies without a perfect matching, by edge count.
    pub pm_free_by_edges: BTreeMap<usize, usize>,
    /// Isomorphism classes (up to swapping sides) of PM-free patterns with
    /// five or six edges, described by their side degree sequences.
    pub iso_classes: Vec<IsoClass>,
    pub b113_labelled_copies: usize,
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoClass {
    pub edges: usize,
    pub canonical_mask: u16,
    /// Sorted degrees of the side carrying the smaller sequence, then the other side.
    pub degree_sequences: [[usize; 3]; 2],
    pub labelled_copies: usize,
    pub name: String,
}

impl Fact1Report {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Enumerates all 512 patterns, checks the classification and derives the
/// PM-free isomorphism classes with five or six edges from scratch.
pub fn verify_fact1() -> Fact1Report {
    let mut counts: BTreeMap<String, BTreeMap<usize, usize>> = BTreeMap::new();
    let mut pm_free_by_edges = BTreeMap::new();
    let mut violations = Vec::new();
    let mut groups: BTreeMap<u16, Vec<BipartitePattern>> = BTreeMap::new();
    let mut b113 = 0;

    for mask in 0u16..512 {
        let p = BipartitePattern(mask);
        let e = p.edge_count();
        let class = classify(p);
        *counts
            .entry(class.name().to_string())
            .or_default()
            .entry(e)
            .or_default() += 1;

        let pm = p.has_perfect_matching();
        if !pm {
            *pm_free_by_edges.entry(e).or_insert(0) += 1;
        }
        if matches!(class, PatternClass::B113 { .. }) {
            b113 += 1;
        }
        match (e, pm, class) {
            (7.., false, _) => violations.push(format!("{mask:#011b}: {e} edges without a perfect matching")),
            (6, false, PatternClass::B033 { .. }) => {}
            (6, false, c) => violations.push(format!("{mask:#011b}: 6 edges, no PM, classified {c:?}")),
            (5, false, PatternClass::B023 { .. } | PatternClass::B113 { .. }) => {}
            (5, false, c) => violations.push(format!("{mask:#011b}: 5 edges, no PM, classified {c:?}")),
            _ => {}
        }
        if !pm && (5..=6).contains(&e) {
            groups.entry(p.canonical_unordered()).or_default().push(p);
        }
    }

    let mut iso_classes = Vec::new();
    for (canon, members) in groups {
        let rep = BipartitePattern(canon);
        let (xs, ys) = (sorted(rep.x_degrees()), sorted(rep.y_degrees()));
        let degree_sequences = if xs <= ys { [xs, ys] } else { [ys, xs] };
        let name = match degree_sequences[0] {
            [0, 3, 3] => "B033",
            [0, 2, 3] => "B023",
            [1, 1, 3] => "B113",
            _ => "unexpected",
        };
        // Every member of an isomorphism class must classify under one name.
        let names: BTreeSet<&str> = members.iter().map(|p| classify(*p).name()).collect();
        if names.len() != 1 || !names.contains(name) {
            violations.push(format!(
                "isomorphism class {canon:#011b} ({name}) classified as {names:?}"
            ));
        }
        iso_classes.push(IsoClass {
            edges: rep.edge_count(),
            canonical_mask: canon,
            degree_sequences,
            labelled_copies: members.len(),
            name: name.to_string(),
        });
    }
    let expected_names: BTreeSet<(usize, &str)> =
        [(6, "B033"), (5, "B023"), (5, "B113")].into_iter().collect();
    let found_names: BTreeSet<(usize, &str)> = iso_classes
        .iter()
        .map(|c| (c.edges, c.name.as_str()))
        .collect();
    if found_names != expected_names || iso_classes.len() != 3 {
        violations.push(format!(
            "PM-free classes with 5-6 edges are {found_names:?}, expected {expected_names:?}"
        ));
    }

    Fact1Report {
        schema: "hypermatch.fact1.v1".into(),
        patterns: 512,
        counts,
        pm_free_by_edges,
        iso_classes,
        b113_labelled_copies: b113,
        violations,
    }
}

/// A link graph of `center`: pairs `{a, b}` with `{center, a, b}` an edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkGraph {
    pub center: usize,
    /// Each pair ordered as (earlier set, later set) for bipartite links and
    /// ascending for within-set links; list sorted.
    pub pairs: Vec<(usize, usize)>,
    /// Set when the link is bipartite between two ordered triples.
    pub pattern: Option<BipartitePattern>,
}

impl LinkGraph {
    pub fn edge_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.pairs.iter().any(|&(x, y)| (x, y) == (a, b) || (x, y) == (b, a))
    }

    /// The hyperedge `center + pair`.
    pub fn edge_of(&self, pair: (usize, usize)) -> Edge {
        let mut e = [self.center, pair.0, pair.1];
        e.sort_unstable();
        e
    }
}

fn as_set(h: &Hypergraph3, vs: &[usize]) -> Result<VertexSet> {
    let mut s = VertexSet::EMPTY;
    for &v in vs {
        if v >= h.n() {
            return Err(Error::VertexOutOfRange { vertex: v, n: h.n() });
        }
        if s.contains(v) {
            return Err(Error::OverlappingSets);
        }
        s.insert(v);
    }
    Ok(s)
}

/// `L_v(A, B)`. When both sides have three vertices the pattern is exposed
/// with `x_i = a[i]` and `y_j = b[j]`.
pub fn link_bipartite(h: &Hypergraph3, v: usize, a: &[usize], b: &[usize]) -> Result<LinkGraph> {
    let (sa, sb) = (as_set(h, a)?, as_set(h, b)?);
    if v >= h.n() {
        return Err(Error::VertexOutOfRange { vertex: v, n: h.n() });
    }
    if !sa.is_disjoint(sb) || sa.contains(v) || sb.contains(v) {
        return Err(Error::OverlappingSets);
    }
    let mut pairs = Vec::new();
    let mut mask = 0u16;
    for (i, &x) in a.iter().enumerate() {
        let hits = h.pair_link(v, x).intersection(sb);
        for (j, &y) in b.iter().enumerate() {
            if hits.contains(y) {
                pairs.push((x, y));
                if i < 3 && j < 3 {
                    mask |= 1 << (3 * i + j);
                }
            }
        }
    }
    pairs.sort_unstable();
    let pattern = (a.len() == 3 && b.len() == 3).then_some(BipartitePattern(mask));
    Ok(LinkGraph {
        center: v,
        pairs,
        pattern,
    })
}

/// `L_v(A)`: pairs inside `A`.
pub fn link_within(h: &Hypergraph3, v: usize, a: &[usize]) -> Result<LinkGraph> {
    let sa = as_set(h, a)?;
    if v >= h.n() {
        return Err(Error::VertexOutOfRange { vertex: v, n: h.n() });
    }
    if sa.contains(v) {
        return Err(Error::OverlappingSets);
    }
    let mut pairs = Vec::new();
    for x in sa.iter() {
        for y in h.pair_link(v, x).intersection(sa).iter().filter(|&y| y > x) {
            pairs.push((x, y));
        }
    }
    Ok(LinkGraph {
        center: v,
        pairs,
        pattern: None,
    })
}

/// `L_v(A_1 A_2 ... A_k)`: union of the bipartite links of consecutive sets.
pub fn link_chain(h: &Hypergraph3, v: usize, sets: &[&[usize]]) -> Result<LinkGraph> {
    if !(2..=5).contains(&sets.len()) {
        return Err(Error::InvalidArgument(format!(
            "link chains take 2 to 5 sets, got {}",
            sets.len()
        )));
    }
    let all: Vec<usize> = sets.iter().flat_map(|s| s.iter().copied()).collect();
    as_set(h, &all)?;
    if sets.len() == 2 {
        return link_bipartite(h, v, sets[0], sets[1]);
    }
    let mut pairs = Vec::new();
    for w in sets.windows(2) {
        pairs.extend(link_bipartite(h, v, w[0], w[1])?.pairs);
    }
    pairs.sort_unstable();
    Ok(LinkGraph {
        center: v,
        pairs,
        pattern: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn claim_pattern() -> BipartitePattern {
        // x1y1, x1y2, x1y3, x2y1, x3y1
        BipartitePattern::from_pairs(&[(0, 0), (0, 1), (0, 2), (1, 0), (2, 0)]).unwrap()
    }

    #[test]
    fn identity_has_pm() {
        let p = BipartitePattern::from_pairs(&[(0, 0), (1, 1), (2, 2)]).unwrap();
        assert_eq!(p.classify(), PatternClass::HasPerfectMatching);
        assert_eq!(p.perfect_matching(), Some([0, 1, 2]));
    }

    #[test]
    fn b113_base_edge() {
        let p = claim_pattern();
        assert_eq!(p.classify(), PatternClass::B113 { base: (0, 0) });
        assert_eq!(base_edge(p).unwrap(), (0, 0));
        // swap x1 <-> x3
        let q = p.relabel([2, 1, 0], [0, 1, 2]);
        assert_eq!(base_edge(q).unwrap(), (2, 0));
    }

    #[test]
    fn base_edge_rejects_other_classes() {
        assert!(matches!(
            base_edge(BipartitePattern::FULL),
            Err(Error::NotB113 { .. })
        ));
        assert!(base_edge(BipartitePattern::new(0).unwrap()).is_err());
    }

    #[test]
    fn seven_edges_always_pm() {
        for mask in 0u16..512 {
            let p = BipartitePattern::new(mask).unwrap();
            if p.edge_count() >= 7 {
                assert_eq!(p.classify(), PatternClass::HasPerfectMatching);
            }
        }
    }

    #[test]
    fn b033_and_b023_orientations() {
        // x1 isolated, x2 and x3 complete
        let p = BipartitePattern::from_pairs(&[(1, 0), (1, 1), (1, 2), (2, 0), (2, 1), (2, 2)])
            .unwrap();
        assert_eq!(p.classify(), PatternClass::B033 { isolated: Side::X });
        assert_eq!(p.transpose().classify(), PatternClass::B033 { isolated: Side::Y });
        let q = BipartitePattern::from_pairs(&[(1, 0), (1, 1), (2, 0), (2, 1), (2, 2)]).unwrap();
        assert_eq!(q.classify(), PatternClass::B023 { isolated: Side::X });
        assert_eq!(q.transpose().classify(), PatternClass::B023 { isolated: Side::Y });
    }

    #[test]
    fn pattern_mask_range() {
        assert!(BipartitePattern::new(512).is_err());
        assert!(BipartitePattern::from_pairs(&[(3, 0)]).is_err());
    }

    #[test]
    fn fact1_sweep_is_clean() {
        let r = verify_fact1();
        assert_eq!(r.patterns, 512);
        assert!(r.ok(), "{:?}", r.violations);
        assert_eq!(r.b113_labelled_copies, 9);
    }

    #[test]
    fn link_errors() {
        let h = Hypergraph3::complete(7).unwrap();
        assert!(matches!(
            link_bipartite(&h, 0, &[1, 2], &[2, 3]),
            Err(Error::OverlappingSets)
        ));
        assert!(matches!(
            link_bipartite(&h, 1, &[1, 2], &[3, 4]),
            Err(Error::OverlappingSets)
        ));
        assert!(link_within(&h, 0, &[0, 1]).is_err());
        assert!(link_chain(&h, 0, &[&[1]]).is_err());
        assert!(link_bipartite(&h, 9, &[1], &[2]).is_err());
    }

    #[test]
    fn ve_reconstruction() {
        let h = Hypergraph3::new(5, [[0, 2, 4]]).unwrap();
        let l = link_bipartite(&h, 2, &[4], &[0]).unwrap();
        assert_eq!(l.pairs, vec![(4, 0)]);
        assert_eq!(l.edge_of(l.pairs[0]), [0, 2, 4]);
    }
}
