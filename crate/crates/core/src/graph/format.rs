//! Plain-text graph format.
//!
//! ```text
//! # comment
//! n 4
//! 0 1
//! 1 2 0.35
//! ```
//!
//! A header line `n <int>` followed by one edge per line, `i j [w]`,
//! 0-based and whitespace separated. Lines starting with `#` and blank
//! lines are ignored.

use std::fmt::Write as _;
use std::path::Path;

use super::Graph;
use crate::error::{Error, Result};

/// A parsed graph file. `weights[e]` is the optional weight written for
/// `graph.edges()[e]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphFile {
    pub graph: Graph,
    pub weights: Vec<Option<f64>>,
}

impl GraphFile {
    pub fn has_weights(&self) -> bool {
        self.weights.iter().any(Option::is_some)
    }
}

pub fn parse_graph(text: &str) -> Result<GraphFile> {
    let mut n: Option<usize> = None;
    let mut raw: Vec<(usize, usize, Option<f64>)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::Parse { line: line_no, message };
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if n.is_none() {
            match fields.as_slice() {
                ["n", count] => {
                    let v: usize = count.parse().map_err(|_| err(format!("bad vertex count `{count}`")))?;
                    n = Some(v);
                    continue;
                }
                _ => return Err(err("expected header `n <int>`".into())),
            }
        }
        if !(2..=3).contains(&fields.len()) {
            return Err(err(format!("expected `i j [w]`, got `{trimmed}`")));
        }
        let i: usize = fields[0].parse().map_err(|_| err(format!("bad vertex `{}`", fields[0])))?;
        let j: usize = fields[1].parse().map_err(|_| err(format!("bad vertex `{}`", fields[1])))?;
        let w = match fields.get(2) {
            Some(s) => {
                let w: f64 = s.parse().map_err(|_| err(format!("bad weight `{s}`")))?;
                if !w.is_finite() {
                    return Err(err(format!("weight `{s}` is not finite")));
                }
                Some(w)
            }
            None => None,
        };
        raw.push((i, j, w));
    }
    let n = n.ok_or(Error::Parse { line: 0, message: "missing header `n <int>`".into() })?;
    let graph = Graph::new(n, raw.iter().map(|&(i, j, _)| (i, j)))?;
    let mut weights = vec![None; graph.edge_count()];
    for (i, j, w) in raw {
        let idx = graph.edges().binary_search(&(i.min(j), i.max(j))).expect("edge present");
        weights[idx] = w;
    }
    Ok(GraphFile { graph, weights })
}

pub fn write_graph(graph: &Graph, weights: Option<&[f64]>) -> String {
    let mut out = String::new();
    writeln!(out, "n {}", graph.n()).unwrap();
    for (e, &(i, j)) in graph.edges().iter().enumerate() {
        match weights {
            Some(w) => writeln!(out, "{i} {j} {:?}", w[e]).unwrap(),
            None => writeln!(out, "{i} {j}").unwrap(),
        }
    }
    out
}

pub fn read_graph_file(path: &Path) -> Result<GraphFile> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
    parse_graph(&text)
}

pub fn write_graph_file(path: &Path, graph: &Graph, weights: Option<&[f64]>) -> Result<()> {
    std::fs::write(path, write_graph(graph, weights)).map_err(|source| Error::Io { path: path.into(), source })
}
