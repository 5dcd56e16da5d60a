//! Independent oracles: plain enumeration with no pruning and no shared code
//! beyond the hypergraph type.
#![allow(dead_code)]

use hypermatch::{Edge, Hypergraph3, Matching};

/// Size of a largest matching, by walking every matching of `h`.
pub fn naive_max_matching(h: &Hypergraph3) -> usize {
    fn walk(edges: &[Edge], start: usize, used: u128, size: usize, best: &mut usize) {
        *best = (*best).max(size);
        for i in start..edges.len() {
            let mask = edges[i].iter().fold(0u128, |m, &v| m | 1 << v);
            if mask & used == 0 {
                walk(edges, i + 1, used | mask, size + 1, best);
            }
        }
    }
    let mut best = 0;
    walk(h.edges(), 0, 0, 0, &mut best);
    best
}

/// Degree by scanning every edge.
pub fn naive_degree(h: &Hypergraph3, v: usize) -> usize {
    h.edges().iter().filter(|e| e.contains(&v)).count()
}

pub fn naive_min_degree(h: &Hypergraph3) -> usize {
    (0..h.n()).map(|v| naive_degree(h, v)).min().unwrap()
}

pub fn binom(n: i64, k: i64) -> i64 {
    if k < 0 || n < k {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Whether the pattern (bit `3i + j` for `x_i y_j`) has a perfect matching,
/// via the permanent of its biadjacency matrix.
pub fn permanent_positive(mask: u16) -> bool {
    let a = |i: usize, j: usize| ((mask >> (3 * i + j)) & 1) as i32;
    let perm = a(0, 0) * (a(1, 1) * a(2, 2) + a(1, 2) * a(2, 1))
        + a(0, 1) * (a(1, 0) * a(2, 2) + a(1, 2) * a(2, 0))
        + a(0, 2) * (a(1, 0) * a(2, 1) + a(1, 1) * a(2, 0));
    perm > 0
}

/// Whether `e ∪ t` splits into two edges, by trying all 20 triples.
pub fn naive_absorbs(h: &Hypergraph3, e: &Edge, t: &Edge) -> bool {
    let six: Vec<usize> = e.iter().chain(t.iter()).copied().collect();
    for a in 0..6 {
        for b in a + 1..6 {
            for c in b + 1..6 {
                let rest: Vec<usize> = (0..6).filter(|&i| i != a && i != b && i != c).map(|i| six[i]).collect();
                if h.contains(six[a], six[b], six[c]) && h.contains(rest[0], rest[1], rest[2]) {
                    return true;
                }
            }
        }
    }
    false
}

pub fn is_valid_matching(h: &Hypergraph3, m: &[Edge]) -> bool {
    let mut used = 0u128;
    for e in m {
        if !h.contains(e[0], e[1], e[2]) {
            return false;
        }
        let mask = e.iter().fold(0u128, |m, &v| m | 1 << v);
        if mask & used != 0 {
            return false;
        }
        used |= mask;
    }
    true
}

/// Two matching edges `E`, `F` and three uncovered vertices whose links into
/// `E x F` all contain the same perfect matching.
pub fn two_to_three() -> (Hypergraph3, Matching) {
    let mut edges: Vec<Edge> = vec![[0, 1, 2], [3, 4, 5]];
    for v in 6..9 {
        edges.extend([[0, 3, v], [1, 4, v], [2, 5, v]]);
    }
    let h = Hypergraph3::new(9, edges).unwrap();
    let m = Matching::new(&h, vec![[0, 1, 2], [3, 4, 5]]).unwrap();
    (h, m)
}

/// One matching edge `E` and two uncovered vertices each forming an edge
/// with a different pair through `E`.
pub fn one_to_two() -> (Hypergraph3, Matching) {
    let h = Hypergraph3::new(7, [[0, 1, 2], [0, 3, 5], [1, 4, 6]]).unwrap();
    let m = Matching::new(&h, vec![[0, 1, 2]]).unwrap();
    (h, m)
}

/// Five matching edges `E_j = {3j, 3j+1, 3j+2}` and six uncovered vertices,
/// each joined to two different `E_j`; only the full five-edge swap works.
pub fn five_to_six() -> (Hypergraph3, Matching) {
    let m: Vec<Edge> = (0..5).map(|j| [3 * j, 3 * j + 1, 3 * j + 2]).collect();
    let added = [[15, 0, 3], [16, 1, 4], [17, 5, 6], [18, 7, 9], [19, 10, 12], [20, 11, 13]];
    let h = Hypergraph3::new(21, m.iter().copied().chain(added)).unwrap();
    let m = Matching::new(&h, m).unwrap();
    (h, m)
}
