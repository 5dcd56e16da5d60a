//! Verification suites and sweeps behind the command-line tool.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::augment::{self, AugmentConfig};
use crate::constructions::{extremal_star, random_hypergraph};
use crate::error::{Error, Result};
use crate::exact::{max_matching, SolveBudget};
use crate::hypergraph::{all_triples, binom, threshold, Edge};

pub const TIGHTNESS_SCHEMA: &str = "hypermatch.tightness.v1";
pub const THRESHOLDS_SCHEMA: &str = "hypermatch.thresholds.v1";

/// Column order of the sweep CSV.
pub const SWEEP_COLUMNS: [&str; 9] = [
    "n",
    "d",
    "p",
    "seed",
    "delta1",
    "threshold",
    "oracle_size",
    "augment_size",
    "agree",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TightnessRow {
    pub n: usize,
    pub edges: usize,
    pub delta1: usize,
    pub threshold: u64,
    pub max_matching: usize,
    pub optimal: bool,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TightnessReport {
    pub schema: String,
    pub rows: Vec<TightnessRow>,
    pub ok: bool,
}

/// `H*` on every `n` in `6, 9, .., n_max`: its minimum degree equals the
/// threshold for `d = n/3` and its largest matching misses one edge.
pub fn verify_tightness(n_max: usize, budget: &SolveBudget) -> Result<TightnessReport> {
    let rows = (6..=n_max)
        .step_by(3)
        .map(|n| {
            let (h, _) = extremal_star(n)?;
            let delta1 = h.min_degree(1)?;
            let thr = threshold(n, n / 3)?;
            let r = max_matching(&h, budget);
            Ok(TightnessRow {
                n,
                edges: h.edge_count(),
                delta1,
                threshold: thr,
                max_matching: r.size,
                optimal: r.optimal,
                ok: delta1 as u64 == thr && r.optimal && r.size == n / 3 - 1,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TightnessReport {
        schema: TIGHTNESS_SCHEMA.into(),
        ok: rows.iter().all(|r| r.ok),
        rows,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeBucket {
    pub hypergraphs: u64,
    pub without_matching: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdsReport {
    pub schema: String,
    pub n: usize,
    pub d: usize,
    pub hypergraphs: u64,
    pub with_matching: u64,
    /// Largest minimum degree of a hypergraph with no `d`-matching.
    pub max_delta1_without: Option<usize>,
    /// Smallest minimum degree of a hypergraph with no `d`-matching.
    pub min_delta1_without: Option<usize>,
    /// Smallest `t` such that `delta1 >= t` forces a `d`-matching.
    pub empirical_threshold: usize,
    pub threshold: u64,
    /// Keyed by minimum degree.
    pub histogram: BTreeMap<usize, DegreeBucket>,
}

/// Largest vertex count for the exhaustive scan (`2^20` hypergraphs at 6).
pub const THRESHOLD_SCAN_MAX_N: usize = 6;

fn matchings_as_masks(triples: &[Edge], d: usize) -> Vec<u64> {
    fn go(triples: &[Edge], start: usize, d: usize, used: u128, mask: u64, out: &mut Vec<u64>) {
        if d == 0 {
            out.push(mask);
            return;
        }
        for i in start..triples.len() {
            let s = triples[i].iter().fold(0u128, |a, &v| a | 1 << v);
            if s & used == 0 {
                go(triples, i + 1, d - 1, used | s, mask | 1 << i, out);
            }
        }
    }
    let mut out = Vec::new();
    go(triples, 0, d, 0, 0, &mut out);
    out
}

/// Every hypergraph on `n <= 6` vertices: minimum degree against existence of
/// a `d`-matching.
pub fn verify_thresholds(n: usize, d: usize) -> Result<ThresholdsReport> {
    if n > THRESHOLD_SCAN_MAX_N {
        return Err(Error::InvalidArgument(format!(
            "exhaustive threshold scan supports n <= {THRESHOLD_SCAN_MAX_N}, got {n}"
        )));
    }
    let thr = threshold(n, d)?;
    let triples: Vec<Edge> = all_triples(n).collect();
    let t = triples.len();
    let matchings = matchings_as_masks(&triples, d);
    let incident: Vec<u64> = (0..n)
        .map(|v| {
            triples
                .iter()
                .enumerate()
                .filter(|(_, e)| e.contains(&v))
                .fold(0u64, |a, (i, _)| a | 1 << i)
        })
        .collect();
    let total: u64 = 1 << t;
    let chunk = 1u64 << 12;
    let max_degree = binom(n as u64 - 1, 2) as usize;
    let histogram = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut hist = vec![DegreeBucket::default(); max_degree + 1];
            for mask in c * chunk..((c + 1) * chunk).min(total) {
                let delta = incident
                    .iter()
                    .map(|&m| (mask & m).count_ones() as usize)
                    .min()
                    .unwrap_or(0);
                let has = matchings.iter().any(|&mm| mask & mm == mm);
                hist[delta].hypergraphs += 1;
                if !has {
                    hist[delta].without_matching += 1;
                }
            }
            hist
        })
        .reduce(
            || vec![DegreeBucket::default(); max_degree + 1],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    x.hypergraphs += y.hypergraphs;
                    x.without_matching += y.without_matching;
                }
                a
            },
        );
    let without: Vec<usize> = (0..=max_degree)
        .filter(|&k| histogram[k].without_matching > 0)
        .collect();
    let with_matching = total - histogram.iter().map(|b| b.without_matching).sum::<u64>();
    Ok(ThresholdsReport {
        schema: THRESHOLDS_SCHEMA.into(),
        n,
        d,
        hypergraphs: total,
        with_matching,
        max_delta1_without: without.last().copied(),
        min_delta1_without: without.first().copied(),
        empirical_threshold: without.last().map_or(0, |&k| k + 1),
        threshold: thr,
        histogram: histogram
            .into_iter()
            .enumerate()
            .filter(|(_, b)| b.hypergraphs > 0)
            .collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub d: usize,
    pub p: f64,
    pub seed: u64,
    pub delta1: usize,
    pub threshold: u64,
    pub oracle_size: usize,
    pub augment_size: usize,
    pub agree: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub n: usize,
    pub d: usize,
    pub trials: usize,
    pub p_grid: Vec<f64>,
    pub seed: u64,
    pub budget: SolveBudget,
    pub augment: AugmentConfig,
}

/// Random instances over the `p` grid. The instance seed of trial `i` at grid
/// position `j` is `seed + j * trials + i`. `agree` compares the augmenting
/// solver against the exact maximum.
pub fn sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    let thr = threshold(cfg.n, cfg.d)?;
    let jobs: Vec<(f64, u64)> = cfg
        .p_grid
        .iter()
        .enumerate()
        .flat_map(|(j, &p)| {
            (0..cfg.trials).map(move |i| (p, cfg.seed.wrapping_add((j * cfg.trials + i) as u64)))
        })
        .collect();
    jobs.into_par_iter()
        .map(|(p, seed)| {
            let h = random_hypergraph(cfg.n, p, seed)?;
            let oracle = max_matching(&h, &cfg.budget);
            let (aug, _) = augment::solve(&h, cfg.n / 3, &AugmentConfig { seed, ..cfg.augment.clone() })?;
            Ok(SweepRow {
                n: cfg.n,
                d: cfg.d,
                p,
                seed,
                delta1: h.min_degree(1)?,
                threshold: thr,
                oracle_size: oracle.size,
                augment_size: aug.size,
                agree: oracle.optimal && oracle.size == aug.size,
            })
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(SWEEP_COLUMNS).map_err(csv_err)?;
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Sets the size of the global worker pool from `HYPERMATCH_THREADS`, if set.
pub fn init_thread_pool() -> Result<()> {
    let Ok(raw) = std::env::var("HYPERMATCH_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("HYPERMATCH_THREADS must be a positive integer, got {raw:?}")))?;
    if threads == 0 {
        return Err(Error::InvalidArgument("HYPERMATCH_THREADS must be positive".into()));
    }
    // A pool may already exist when called twice; that is not an error.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}
