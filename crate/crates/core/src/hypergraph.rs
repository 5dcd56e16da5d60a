//! 3-uniform hypergraphs, vertex partitions and matchings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vset::VertexSet;

/// Largest supported order; vertex sets are single 128-bit words.
pub const MAX_VERTICES: usize = 128;

/// A sorted vertex triple.
pub type Edge = [usize; 3];

/// Binomial coefficient for the small arguments used throughout the crate.
pub fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// Minimum-degree threshold `C(n-1, 2) - C(n-d, 2)` for a `d`-matching.
///
/// Requires `1 <= d <= n/3`.
pub fn threshold(n: usize, d: usize) -> Result<u64> {
    if d == 0 || 3 * d > n {
        return Err(Error::InvalidArgument(format!(
            "threshold needs 1 <= d <= n/3, got n={n}, d={d}"
        )));
    }
    Ok(binom(n as u64 - 1, 2) - binom((n - d) as u64, 2))
}

/// Sorts a triple and checks its vertices are distinct and below `n`.
pub fn canonical_edge(t: [usize; 3], n: usize) -> Result<Edge> {
    let mut e = t;
    e.sort_unstable();
    if let Some(&v) = e.iter().find(|&&v| v >= n) {
        return Err(Error::VertexOutOfRange { vertex: v, n });
    }
    if e[0] == e[1] || e[1] == e[2] {
        return Err(Error::RepeatedVertex(t));
    }
    Ok(e)
}

/// A 3-uniform hypergraph on vertices `0..n`.
///
/// Edges are kept sorted and deduplicated. Alongside the edge list every
/// unordered pair `{u, v}` stores the set of third vertices completing an
/// edge, which gives constant-time membership and cheap link extraction.
#[derive(Clone, PartialEq, Eq)]
pub struct Hypergraph3 {
    n: usize,
    edges: Vec<Edge>,
    pair_links: Vec<VertexSet>,
    degrees: Vec<usize>,
}

impl std::fmt::Debug for Hypergraph3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Hypergraph3")
            .field("n", &self.n)
            .field("edges", &self.edges)
            .finish()
    }
}

impl Hypergraph3 {
    pub fn new<I>(n: usize, triples: I) -> Result<Self>
    where
        I: IntoIterator<Item = [usize; 3]>,
    {
        if n > MAX_VERTICES {
            return Err(Error::TooManyVertices(n));
        }
        let mut edges = triples
            .into_iter()
            .map(|t| canonical_edge(t, n))
            .collect::<Result<Vec<_>>>()?;
        edges.sort_unstable();
        edges.dedup();
        Ok(Self::from_sorted(n, edges))
    }

    /// Builds from edges already canonical, sorted and deduplicated.
    pub(crate) fn from_sorted(n: usize, edges: Vec<Edge>) -> Self {
        let mut pair_links = vec![VertexSet::EMPTY; n * n];
        let mut degrees = vec![0; n];
        for &[a, b, c] in &edges {
            pair_links[a * n + b].insert(c);
            pair_links[b * n + a].insert(c);
            pair_links[a * n + c].insert(b);
            pair_links[c * n + a].insert(b);
            pair_links[b * n + c].insert(a);
            pair_links[c * n + b].insert(a);
            degrees[a] += 1;
            degrees[b] += 1;
            degrees[c] += 1;
        }
        Hypergraph3 {
            n,
            edges,
            pair_links,
            degrees,
        }
    }

    /// Builds from distinct in-range triples, sorting and deduplicating.
    pub(crate) fn from_checked(n: usize, mut edges: Vec<Edge>) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(Error::TooManyVertices(n));
        }
        debug_assert!(edges.iter().all(|e| e[0] < e[1] && e[1] < e[2] && e[2] < n));
        edges.sort_unstable();
        edges.dedup();
        Ok(Self::from_sorted(n, edges))
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, std::iter::empty())
    }

    /// The complete hypergraph on `n` vertices.
    pub fn complete(n: usize) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(Error::TooManyVertices(n));
        }
        Ok(Self::from_sorted(n, all_triples(n).collect()))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    /// Whether `{a, b, c}` is an edge. Out-of-range or repeated vertices give `false`.
    #[inline]
    pub fn contains(&self, a: usize, b: usize, c: usize) -> bool {
        a < self.n && b < self.n && a != b && self.pair_links[a * self.n + b].contains(c)
    }

    pub fn contains_edge(&self, e: &Edge) -> bool {
        self.contains(e[0], e[1], e[2])
    }

    /// Vertices `w` such that `{u, v, w}` is an edge.
    #[inline]
    pub fn pair_link(&self, u: usize, v: usize) -> VertexSet {
        self.pair_links[u * self.n + v]
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n })
        } else {
            Ok(())
        }
    }

    pub fn degree(&self, v: usize) -> Result<usize> {
        self.check_vertex(v)?;
        Ok(self.degrees[v])
    }

    pub fn codegree(&self, u: usize, v: usize) -> Result<usize> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(Error::InvalidArgument(format!(
                "codegree needs distinct vertices, got {u} twice"
            )));
        }
        Ok(self.pair_link(u, v).len())
    }

    /// Minimum vertex degree (`ell = 1`) or minimum codegree (`ell = 2`).
    pub fn min_degree(&self, ell: u8) -> Result<usize> {
        match ell {
            1 => self
                .degrees
                .iter()
                .copied()
                .min()
                .ok_or(Error::EmptyVertexSet("minimum vertex degree")),
            2 => {
                if self.n < 2 {
                    return Err(Error::EmptyVertexSet("minimum codegree"));
                }
                let mut best = usize::MAX;
                for u in 0..self.n {
                    for v in u + 1..self.n {
                        best = best.min(self.pair_link(u, v).len());
                    }
                }
                Ok(best)
            }
            _ => Err(Error::InvalidArgument(format!(
                "ell must be 1 or 2 for 3-uniform hypergraphs, got {ell}"
            ))),
        }
    }

    pub fn degree_profile(&self) -> DegreeProfile {
        let codegrees = (0..self.n)
            .map(|u| {
                (0..self.n)
                    .map(|v| if u == v { 0 } else { self.pair_link(u, v).len() })
                    .collect()
            })
            .collect();
        DegreeProfile {
            n: self.n,
            degrees: self.degrees.clone(),
            codegrees,
            delta1: self.min_degree(1).ok(),
            delta2: self.min_degree(2).ok(),
        }
    }

    /// Subhypergraph induced on `keep`, reindexed to `0..|keep|`.
    ///
    /// Returns the new hypergraph and the map from new index to old index.
    pub fn induced(&self, keep: VertexSet) -> (Hypergraph3, Vec<usize>) {
        let keep = keep.intersection(self.vertices());
        let map: Vec<usize> = keep.to_vec();
        let mut new_index = vec![usize::MAX; self.n];
        for (i, &v) in map.iter().enumerate() {
            new_index[v] = i;
        }
        // Relabelling is monotone, so the filtered list stays sorted.
        let edges = self
            .edges
            .iter()
            .filter(|e| VertexSet::from_edge(e).is_subset(keep))
            .map(|e| [new_index[e[0]], new_index[e[1]], new_index[e[2]]])
            .collect();
        (Self::from_sorted(map.len(), edges), map)
    }

    /// `H - S`: drops the vertices of `removed` and every edge meeting them.
    pub fn remove_vertices(&self, removed: VertexSet) -> (Hypergraph3, Vec<usize>) {
        self.induced(self.vertices().difference(removed))
    }

    /// Edges lying entirely inside `within`, in canonical order.
    pub fn edges_within(&self, within: VertexSet) -> impl Iterator<Item = &Edge> + '_ {
        self.edges
            .iter()
            .filter(move |e| VertexSet::from_edge(e).is_subset(within))
    }

    /// Adds edges, returning a new hypergraph.
    pub fn with_edges<I: IntoIterator<Item = [usize; 3]>>(&self, extra: I) -> Result<Self> {
        Self::new(self.n, self.edges.iter().copied().chain(extra))
    }
}

/// Every triple `a < b < c < n` in lexicographic order.
pub fn all_triples(n: usize) -> impl Iterator<Item = Edge> {
    (0..n).flat_map(move |a| {
        (a + 1..n).flat_map(move |b| (b + 1..n).map(move |c| [a, b, c]))
    })
}

/// Vertex degrees, pairwise codegrees and their minima.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeProfile {
    pub n: usize,
    pub degrees: Vec<usize>,
    pub codegrees: Vec<Vec<usize>>,
    pub delta1: Option<usize>,
    pub delta2: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeType {
    VVV,
    VVW,
    VWW,
    WWW,
}

/// A two-class partition `V ∪ W` of `0..n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    n: usize,
    w: VertexSet,
}

impl Partition {
    pub fn new(n: usize, w: VertexSet) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(Error::TooManyVertices(n));
        }
        if let Some(v) = w.difference(VertexSet::full(n)).first() {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        Ok(Partition { n, w })
    }

    /// `W` is the last `w_size` indices.
    pub fn suffix(n: usize, w_size: usize) -> Result<Self> {
        if w_size > n {
            return Err(Error::InvalidArgument(format!(
                "class W of size {w_size} does not fit in {n} vertices"
            )));
        }
        Self::new(n, VertexSet::full(n).difference(VertexSet::full(n - w_size)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn w(&self) -> VertexSet {
        self.w
    }

    pub fn v(&self) -> VertexSet {
        VertexSet::full(self.n).difference(self.w)
    }

    pub fn w_size(&self) -> usize {
        self.w.len()
    }

    pub fn in_w(&self, v: usize) -> bool {
        self.w.contains(v)
    }

    pub fn edge_type(&self, e: &Edge) -> EdgeType {
        match e.iter().filter(|&&v| self.w.contains(v)).count() {
            0 => EdgeType::VVV,
            1 => EdgeType::VVW,
            2 => EdgeType::VWW,
            _ => EdgeType::WWW,
        }
    }

    /// Same classes after relabelling vertex `v` to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        Partition {
            n: self.n,
            w: self.w.iter().map(|v| perm[v]).collect(),
        }
    }
}

/// A set of pairwise vertex-disjoint edges of some host hypergraph.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    edges: Vec<Edge>,
}

impl Matching {
    pub fn new(host: &Hypergraph3, edges: Vec<Edge>) -> Result<Self> {
        let m = Matching { edges };
        m.validate(host)?;
        Ok(m)
    }

    /// Builds without checking against a host; call [`Matching::validate`] later.
    pub fn from_edges_unchecked(edges: Vec<Edge>) -> Self {
        Matching { edges }
    }

    pub fn validate(&self, host: &Hypergraph3) -> Result<()> {
        let mut seen = VertexSet::EMPTY;
        for e in &self.edges {
            if !host.contains_edge(e) {
                return Err(Error::InvalidMatching(format!("{e:?} is not an edge")));
            }
            let s = VertexSet::from_edge(e);
            if !s.is_disjoint(seen) {
                return Err(Error::InvalidMatching(format!(
                    "{e:?} meets another matching edge"
                )));
            }
            seen = seen.union(s);
        }
        Ok(())
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn into_edges(self) -> Vec<Edge> {
        self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// `V_M`, the vertices covered by the matching.
    pub fn covered(&self) -> VertexSet {
        self.edges
            .iter()
            .fold(VertexSet::EMPTY, |acc, e| acc.union(VertexSet::from_edge(e)))
    }

    /// `V_0`, the vertices of `0..n` left uncovered.
    pub fn uncovered(&self, n: usize) -> VertexSet {
        VertexSet::full(n).difference(self.covered())
    }

    pub(crate) fn push(&mut self, e: Edge) {
        self.edges.push(e);
    }

    pub(crate) fn sort(&mut self) {
        self.edges.sort_unstable();
    }
}
