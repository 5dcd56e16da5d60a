//! Generators: the extremal families, seeded random instances, perturbation
//! and the padding reduction from `d`-matchings to near-perfect ones.

use rand::seq::index;

use crate::error::{Error, Result};
use crate::hypergraph::{all_triples, Edge, EdgeType, Hypergraph3, Partition};
use crate::rng::SplitMix64;
use crate::vset::VertexSet;

/// Every triple on `0..n` meeting `w`.
fn edges_meeting(n: usize, w: VertexSet) -> Vec<Edge> {
    all_triples(n)
        .filter(|e| !VertexSet::from_edge(e).is_disjoint(w))
        .collect()
}

/// The space barrier `H*`: classes of sizes `2n/3 + 1` and `n/3 - 1`, every
/// edge meeting the small class. It has no perfect matching.
pub fn extremal_star(n: usize) -> Result<(Hypergraph3, Partition)> {
    if n < 6 || n % 3 != 0 {
        return Err(Error::InvalidArgument(format!(
            "extremal star needs n >= 6 divisible by 3, got {n}"
        )));
    }
    let part = Partition::suffix(n, n / 3 - 1)?;
    let h = Hypergraph3::from_checked(n, edges_meeting(n, part.w()))?;
    Ok((h, part))
}

/// `H_{n,d}(V, W)`: all edges of type `VVW` or `VWW` with `|W| = d`.
///
/// `W` defaults to the last `d` indices.
pub fn h_n_d(n: usize, d: usize, w: Option<VertexSet>) -> Result<(Hypergraph3, Partition)> {
    if 3 * d > n {
        return Err(Error::InvalidArgument(format!(
            "H_(n,d) needs d <= n/3, got n={n}, d={d}"
        )));
    }
    let part = match w {
        Some(w) if w.len() != d => {
            return Err(Error::InvalidArgument(format!(
                "class W has {} vertices, expected {d}",
                w.len()
            )))
        }
        Some(w) => Partition::new(n, w)?,
        None => Partition::suffix(n, d)?,
    };
    let edges = all_triples(n)
        .filter(|e| matches!(part.edge_type(e), EdgeType::VVW | EdgeType::VWW))
        .collect();
    Ok((Hypergraph3::from_checked(n, edges)?, part))
}

/// `H*` with `|W| = d - 1`: minimum degree exactly `threshold(n, d)` and no
/// `d`-matching.
pub fn bde_extremal(n: usize, d: usize) -> Result<(Hypergraph3, Partition)> {
    if d == 0 || 3 * d > n {
        return Err(Error::InvalidArgument(format!(
            "bde_extremal needs 1 <= d <= n/3, got n={n}, d={d}"
        )));
    }
    let part = Partition::suffix(n, d - 1)?;
    let h = Hypergraph3::from_checked(n, edges_meeting(n, part.w()))?;
    Ok((h, part))
}

/// Includes each triple independently with probability `p`.
///
/// Triples are visited in lexicographic order and triple `t` is kept iff the
/// next [`SplitMix64::next_f64`] draw is `< p`.
pub fn random_hypergraph(n: usize, p: f64, seed: u64) -> Result<Hypergraph3> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("probability {p} outside [0, 1]")));
    }
    let mut rng = SplitMix64::new(seed);
    let edges = all_triples(n).filter(|_| rng.next_f64() < p).collect();
    Hypergraph3::from_checked(n, edges)
}

/// Deletes `k` edges chosen uniformly at random.
pub fn perturb_remove(h: &Hypergraph3, k: usize, seed: u64) -> Result<Hypergraph3> {
    let m = h.edge_count();
    if k > m {
        return Err(Error::InvalidArgument(format!(
            "cannot remove {k} edges from a hypergraph with {m}"
        )));
    }
    let mut rng = SplitMix64::new(seed);
    let mut drop = vec![false; m];
    for i in index::sample(&mut rng, m, k) {
        drop[i] = true;
    }
    let edges = h
        .edges()
        .iter()
        .zip(drop)
        .filter(|(_, d)| !d)
        .map(|(e, _)| *e)
        .collect();
    Hypergraph3::from_checked(h.n(), edges)
}

/// Number of vertices [`pad_to_perfect`] adds: `floor((n - 3d) / 2)`.
pub fn padding_size(n: usize, d: usize) -> Result<usize> {
    if 3 * d > n {
        return Err(Error::InvalidArgument(format!(
            "padding needs d <= n/3, got n={n}, d={d}"
        )));
    }
    Ok((n - 3 * d) / 2)
}

/// Adds `floor((n - 3d) / 2)` universal vertices, each forming an edge with
/// every pair of other vertices.
pub fn pad_to_perfect(h: &Hypergraph3, d: usize) -> Result<Hypergraph3> {
    let n = h.n();
    let a = padding_size(n, d)?;
    let total = n + a;
    let fresh = VertexSet::full(total).difference(VertexSet::full(n));
    let extra = all_triples(total).filter(|e| !VertexSet::from_edge(e).is_disjoint(fresh));
    let edges: Vec<Edge> = h.edges().iter().copied().chain(extra).collect();
    Hypergraph3::new(total, edges)
}

/// Applies the vertex permutation `v -> perm[v]`.
pub fn relabel(h: &Hypergraph3, perm: &[usize]) -> Result<Hypergraph3> {
    if perm.len() != h.n() {
        return Err(Error::InvalidArgument(format!(
            "permutation has length {}, expected {}",
            perm.len(),
            h.n()
        )));
    }
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidArgument("not a permutation".into()));
        }
    }
    Hypergraph3::new(
        h.n(),
        h.edges().iter().map(|&[a, b, c]| [perm[a], perm[b], perm[c]]),
    )
}
