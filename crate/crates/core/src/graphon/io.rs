//! Plain-text graph files.
//!
//! ```text
//! <n> <d> <seed>
//! positions
//! <x_0>
//! ...
//! adjacency <edges>
//! <in-neighbours of node 0, space separated>
//! ...
//! kappa
//! <κ_0>
//! ...
//! ```
//!
//! Floats use Rust's shortest round-trip representation, so
//! `write ∘ read` reproduces a file byte for byte.

use std::fmt::Write as _;
use std::path::Path;

use super::sampling::InteractionGraph;
use crate::error::{Error, Result};

pub fn to_text(graph: &InteractionGraph) -> String {
    let n = graph.n();
    let mut s = String::with_capacity(16 * n + 8 * graph.edge_count());
    let _ = writeln!(s, "{n} 1 {}", graph.seed());
    s.push_str("positions\n");
    for x in graph.positions() {
        let _ = writeln!(s, "{x:?}");
    }
    let _ = writeln!(s, "adjacency {}", graph.edge_count());
    for i in 0..n {
        let row = graph.in_neighbors(i);
        for (k, j) in row.iter().enumerate() {
            if k > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{j}");
        }
        s.push('\n');
    }
    s.push_str("kappa\n");
    for k in graph.kappa() {
        let _ = writeln!(s, "{k:?}");
    }
    s
}

fn parse_err(line: usize, detail: impl Into<String>) -> Error {
    Error::Parse {
        what: format!("graph file line {line}"),
        detail: detail.into(),
    }
}

pub fn from_text(text: &str) -> Result<InteractionGraph> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l));
    let mut next = |expect: &str| lines.next().ok_or_else(|| parse_err(0, format!("unexpected end of file, expected {expect}")));

    let (ln, header) = next("header")?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(parse_err(ln, "header must read `n d seed`"));
    }
    let n: usize = fields[0].parse().map_err(|e| parse_err(ln, format!("n: {e}")))?;
    let d: usize = fields[1].parse().map_err(|e| parse_err(ln, format!("d: {e}")))?;
    let seed: u64 = fields[2].parse().map_err(|e| parse_err(ln, format!("seed: {e}")))?;
    if d != 1 {
        return Err(parse_err(ln, format!("only d = 1 is supported, got {d}")));
    }

    let (ln, tag) = next("positions")?;
    if tag != "positions" {
        return Err(parse_err(ln, "expected `positions`"));
    }
    let mut positions = Vec::with_capacity(n);
    for _ in 0..n {
        let (ln, l) = next("a position")?;
        positions.push(l.parse::<f64>().map_err(|e| parse_err(ln, e.to_string()))?);
    }

    let (ln, tag) = next("adjacency")?;
    let edges: usize = tag
        .strip_prefix("adjacency ")
        .ok_or_else(|| parse_err(ln, "expected `adjacency <edges>`"))?
        .parse()
        .map_err(|e| parse_err(ln, format!("edge count: {e}")))?;
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let (ln, l) = next("an adjacency row")?;
        let row = l
            .split(' ')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<u32>().map_err(|e| parse_err(ln, e.to_string())))
            .collect::<Result<Vec<u32>>>()?;
        rows.push(row);
    }
    let counted: usize = rows.iter().map(Vec::len).sum();
    if counted != edges {
        return Err(parse_err(ln, format!("header announces {edges} edges, rows hold {counted}")));
    }

    let (ln, tag) = next("kappa")?;
    if tag != "kappa" {
        return Err(parse_err(ln, "expected `kappa`"));
    }
    let mut kappa = Vec::with_capacity(n);
    for _ in 0..n {
        let (ln, l) = next("a kappa value")?;
        kappa.push(l.parse::<f64>().map_err(|e| parse_err(ln, e.to_string()))?);
    }
    if let Some((ln, _)) = lines.find(|(_, l)| !l.trim().is_empty()) {
        return Err(parse_err(ln, "trailing content"));
    }
    InteractionGraph::from_rows(positions, rows, kappa, seed)
}

pub fn save(graph: &InteractionGraph, path: &Path) -> Result<()> {
    std::fs::write(path, to_text(graph)).map_err(|e| Error::io(path, e))
}

pub fn load(path: &Path) -> Result<InteractionGraph> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_text(&text)
}
