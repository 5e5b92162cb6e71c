//! Simple undirected graphs, the G(n, k) ensemble, and connectivity.

mod format;
mod gibbs;
mod weights;

use rand::Rng;
use std::collections::HashMap;

use crate::error::{Error, Result};

pub use format::{parse_graph, read_graph_file, write_graph, write_graph_file, GraphFile};
pub use gibbs::gibbs_entropy;
pub use weights::{materialize_adjacency, AdjacencyMatrix, Coefficients, WeightModel};
pub(crate) use weights::check_theta;

/// Number of unordered vertex pairs, `n(n-1)/2`.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// A simple undirected graph on vertices `0..n`.
///
/// Edges are stored as `(i, j)` with `i < j`, sorted lexicographically and
/// without duplicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self { n, edges: Vec::new() }
    }

    /// Build a graph from an edge list. Pairs may be given in either
    /// orientation; self-loops, duplicates and out-of-range endpoints are
    /// rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("vertex count must be positive".into()));
        }
        let mut out: Vec<(usize, usize)> = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) has an endpoint outside 0..{n}"
                )));
            }
            out.push((a.min(b), a.max(b)));
        }
        out.sort_unstable();
        let before = out.len();
        out.dedup();
        if out.len() != before {
            return Err(Error::InvalidGraph("duplicate edge".into()));
        }
        Ok(Self { n, edges: out })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains_edge(&self, i: usize, j: usize) -> bool {
        self.edges.binary_search(&(i.min(j), i.max(j))).is_ok()
    }

    /// Connected components. Each component lists its vertices in ascending
    /// order; components are ordered by their smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut dsu = DisjointSet::new(self.n);
        for &(i, j) in &self.edges {
            dsu.union(i, j);
        }
        let mut slot_of_root: HashMap<usize, usize> = HashMap::new();
        let mut comps: Vec<Vec<usize>> = Vec::new();
        for v in 0..self.n {
            let root = dsu.find(v);
            let slot = *slot_of_root.entry(root).or_insert_with(|| {
                comps.push(Vec::new());
                comps.len() - 1
            });
            comps[slot].push(v);
        }
        comps
    }
}

/// Size of the largest connected component. Isolated vertices are
/// components of size one.
pub fn largest_component_size(g: &Graph) -> usize {
    let mut dsu = DisjointSet::new(g.n);
    for &(i, j) in &g.edges {
        dsu.union(i, j);
    }
    (0..g.n)
        .map(|v| {
            let r = dsu.find(v);
            dsu.size[r]
        })
        .max()
        .unwrap_or(0)
}

// Union by size with path halving.
struct DisjointSet {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), size: vec![1; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }
}

/// Map a pair index in `0..n(n-1)/2` to the lexicographically ordered pair
/// `(i, j)`, `i < j`.
fn pair_from_index(n: usize, p: usize) -> (usize, usize) {
    // Row i starts at offset i*n - i(i+1)/2.
    let row_start = |i: usize| i * n - i * (i + 1) / 2;
    let nf = n as f64;
    let disc = (2.0 * nf - 1.0).powi(2) - 8.0 * p as f64;
    let mut i = (((2.0 * nf - 1.0) - disc.max(0.0).sqrt()) / 2.0).floor().max(0.0) as usize;
    i = i.min(n.saturating_sub(2));
    while i > 0 && row_start(i) > p {
        i -= 1;
    }
    while i + 1 < n - 1 && row_start(i + 1) <= p {
        i += 1;
    }
    let j = p - row_start(i) + i + 1;
    (i, j)
}

/// Draw a graph uniformly from G(n, k): all k-edge graphs on n labelled
/// vertices are equally likely.
///
/// Selection is a partial Fisher-Yates shuffle over the virtual array of
/// pair indices, materializing only the displaced slots, so memory is O(k)
/// regardless of density.
pub fn sample_gnk<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidGraph("vertex count must be positive".into()));
    }
    let m = pair_count(n);
    if k > m {
        return Err(Error::EdgeCountOutOfRange { k, max: m });
    }
    let mut displaced: HashMap<usize, usize> = HashMap::with_capacity(2 * k);
    let mut chosen = Vec::with_capacity(k);
    for i in 0..k {
        let j = rng.random_range(i..m);
        let at_j = *displaced.get(&j).unwrap_or(&j);
        let at_i = *displaced.get(&i).unwrap_or(&i);
        displaced.insert(j, at_i);
        chosen.push(at_j);
    }
    let mut edges: Vec<(usize, usize)> = chosen.into_iter().map(|p| pair_from_index(n, p)).collect();
    edges.sort_unstable();
    Ok(Graph { n, edges })
}
