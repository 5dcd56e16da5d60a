//! The `.h3` text format and the JSON sidecar written next to it.
//!
//! ```text
//! # optional comments
//! n m
//! a b c
//! ...
//! ```
//!
//! Vertices are 0-based. Writing is canonical: each edge sorted, edges in
//! lexicographic order, single spaces, `\n` line endings, no comments.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{canonical_edge, Hypergraph3, Partition};

pub const INSTANCE_SCHEMA: &str = "hypermatch.instance.v1";
pub const GENERATOR_VERSION: &str = concat!("hypermatch ", env!("CARGO_PKG_VERSION"));

pub fn to_h3_string(h: &Hypergraph3) -> String {
    let mut out = String::with_capacity(16 + 12 * h.edge_count());
    out.push_str(&format!("{} {}\n", h.n(), h.edge_count()));
    for [a, b, c] in h.edges() {
        out.push_str(&format!("{a} {b} {c}\n"));
    }
    out
}

pub fn parse_h3(text: &str) -> Result<Hypergraph3> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "missing header line `n m`".into(),
    })?;
    let nums = parse_numbers(hline, header)?;
    let [n, m] = nums[..] else {
        return Err(Error::Parse {
            line: hline,
            msg: format!("header must hold 2 integers, found {}", nums.len()),
        });
    };

    let mut triples = Vec::with_capacity(m);
    for (line, body) in lines {
        let nums = parse_numbers(line, body)?;
        let [a, b, c] = nums[..] else {
            return Err(Error::Parse {
                line,
                msg: format!("edge line must hold 3 integers, found {}", nums.len()),
            });
        };
        let e = canonical_edge([a, b, c], n).map_err(|e| Error::Parse {
            line,
            msg: e.to_string(),
        })?;
        triples.push(e);
    }
    if triples.len() != m {
        return Err(Error::Parse {
            line: hline,
            msg: format!("header declares {m} edges, found {}", triples.len()),
        });
    }
    Hypergraph3::new(n, triples)
}

fn parse_numbers(line: usize, body: &str) -> Result<Vec<usize>> {
    body.split_whitespace()
        .map(|tok| {
            tok.parse::<usize>().map_err(|e| Error::Parse {
                line,
                msg: format!("`{tok}`: {e}"),
            })
        })
        .collect()
}

pub fn read_h3(path: &Path) -> Result<Hypergraph3> {
    parse_h3(&fs::read_to_string(path)?)
}

pub fn write_h3(path: &Path, h: &Hypergraph3) -> Result<()> {
    fs::write(path, to_h3_string(h))?;
    Ok(())
}

/// Provenance written alongside a generated `.h3` file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub schema: String,
    pub generator: String,
    pub kind: String,
    pub n: usize,
    pub edges: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub removed: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub partition: Option<Partition>,
}

/// `foo.h3` -> `foo.json`.
pub fn sidecar_path(h3: &Path) -> PathBuf {
    h3.with_extension("json")
}

pub fn read_meta(path: &Path) -> Result<InstanceMeta> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}
