//! Network graphs and their cut/cycle spaces over the two-element field.
//!
//! Vertices are parties and edges are shared pairs. Edge indices follow the
//! input order and every edge bitmask in the crate uses them.

mod cactus;
mod cuts;
mod subset;
mod topology;

pub use cactus::{cactus_decomposition, CactusDecomposition};
pub use cuts::{cut_size_histogram, cut_space, cycle_basis, min_cut_size, CutSpace, Gf2Span};
pub use subset::EdgeSubset;
pub use topology::{compare_topologies, TopologyOrder};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest vertex count representable by the `u64` vertex masks.
pub const MAX_VERTICES: usize = 64;

/// A connected simple undirected graph with stable edge indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Network {
    labels: Vec<String>,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<u64>,
}

/// On-disk form: `{"vertices": [...], "edges": [["A","B"], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: Vec<String>,
    pub edges: Vec<[String; 2]>,
}

impl Network {
    /// Builds a network from vertex labels and index pairs.
    pub fn new(labels: Vec<String>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let n = labels.len();
        if n < 2 {
            return Err(Error::InvalidGraph(
                "a network needs at least two vertices".into(),
            ));
        }
        if n > MAX_VERTICES {
            return Err(Error::InvalidGraph(format!(
                "{n} vertices exceeds the supported maximum of {MAX_VERTICES}"
            )));
        }
        for (i, a) in labels.iter().enumerate() {
            if labels[..i].contains(a) {
                return Err(Error::InvalidGraph(format!("duplicate vertex label {a:?}")));
            }
        }
        let mut adjacency = vec![0u64; n];
        for (idx, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge {idx} references a vertex outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!(
                    "edge {idx} is a self-loop on {:?}",
                    labels[u]
                )));
            }
            if adjacency[u] & (1 << v) != 0 {
                return Err(Error::InvalidGraph(format!(
                    "edge {idx} duplicates ({:?}, {:?})",
                    labels[u], labels[v]
                )));
            }
            adjacency[u] |= 1 << v;
            adjacency[v] |= 1 << u;
        }
        let net = Self {
            labels,
            edges,
            adjacency,
        };
        if !net.is_connected() {
            return Err(Error::NotConnected);
        }
        Ok(net)
    }

    /// Builds a network from labelled endpoints, in the order given.
    pub fn from_labeled(vertices: Vec<String>, edges: &[(String, String)]) -> Result<Self> {
        let index = |label: &str| {
            vertices
                .iter()
                .position(|v| v == label)
                .ok_or_else(|| Error::InvalidGraph(format!("unknown vertex {label:?}")))
        };
        let pairs = edges
            .iter()
            .map(|(a, b)| Ok((index(a)?, index(b)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(vertices, pairs)
    }

    /// Parses either the JSON graph format or a whitespace edge list.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::from_json_str(text)
        } else {
            Self::from_edge_list_str(text)
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let edges: Vec<(String, String)> = file
            .edges
            .into_iter()
            .map(|[a, b]| (a, b))
            .collect();
        Self::from_labeled(file.vertices, &edges)
    }

    /// One `u v` pair per line; `#` starts a comment. Vertices are numbered
    /// in order of first appearance.
    pub fn from_edge_list_str(text: &str) -> Result<Self> {
        let mut vertices: Vec<String> = Vec::new();
        let mut edges = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            let mut tokens = line.split_whitespace();
            let Some(a) = tokens.next() else { continue };
            let b = tokens.next().ok_or_else(|| Error::Parse {
                line: lineno + 1,
                column: raw.find(a).map_or(1, |c| c + a.len() + 1),
                message: "expected two vertex names".into(),
            })?;
            if let Some(extra) = tokens.next() {
                return Err(Error::Parse {
                    line: lineno + 1,
                    column: raw.find(extra).map_or(1, |c| c + 1),
                    message: format!("unexpected token {extra:?}"),
                });
            }
            for name in [a, b] {
                if !vertices.iter().any(|v| v == name) {
                    vertices.push(name.to_string());
                }
            }
            edges.push((a.to_string(), b.to_string()));
        }
        Self::from_labeled(vertices, &edges)
    }

    pub fn to_graph_file(&self) -> GraphFile {
        GraphFile {
            vertices: self.labels.clone(),
            edges: self
                .edges
                .iter()
                .map(|&(u, v)| [self.labels[u].clone(), self.labels[v].clone()])
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_graph_file()).expect("graph serialization")
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, index: usize) -> (usize, usize) {
        self.edges[index]
    }

    /// Neighbour bitmask of `v`.
    pub fn neighbors(&self, v: usize) -> u64 {
        self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].count_ones() as usize
    }

    /// Edges incident with `v`.
    pub fn incident(&self, v: usize) -> EdgeSubset {
        EdgeSubset::from_indices(
            self.edge_count(),
            self.edges
                .iter()
                .enumerate()
                .filter(|(_, &(a, b))| a == v || b == v)
                .map(|(i, _)| i),
        )
    }

    /// Dimension of the cycle space, `N - n + 1`.
    pub fn cyclomatic_number(&self) -> usize {
        self.edge_count() + 1 - self.vertex_count()
    }

    pub fn is_tree(&self) -> bool {
        self.cyclomatic_number() == 0
    }

    /// Edges crossing the bipartition `S | V\S`; `S` is a vertex bitmask.
    pub fn cut_of(&self, s: u64) -> EdgeSubset {
        EdgeSubset::from_indices(
            self.edge_count(),
            self.edges
                .iter()
                .enumerate()
                .filter(|(_, &(u, v))| ((s >> u) & 1) != ((s >> v) & 1))
                .map(|(i, _)| i),
        )
    }

    fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut seen = 1u64;
        let mut frontier = 1u64;
        while frontier != 0 {
            let mut next = 0u64;
            let mut f = frontier;
            while f != 0 {
                let v = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= self.adjacency[v];
            }
            frontier = next & !seen;
            seen |= next;
        }
        seen == all
    }

    /// Breadth-first spanning tree: `(parent, parent_edge)` per vertex, root 0.
    pub(crate) fn spanning_tree(&self) -> (Vec<Option<(usize, usize)>>, Vec<usize>) {
        let n = self.vertex_count();
        let mut parent = vec![None; n];
        let mut order = vec![0usize];
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            head += 1;
            for (idx, &(a, b)) in self.edges.iter().enumerate() {
                let other = if a == u {
                    b
                } else if b == u {
                    a
                } else {
                    continue;
                };
                if !seen[other] {
                    seen[other] = true;
                    parent[other] = Some((u, idx));
                    order.push(other);
                }
            }
        }
        (parent, order)
    }

    /// Builds a network with labels `v0..v{n-1}`.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        Self::new((0..n).map(|i| format!("v{i}")).collect(), pairs.to_vec())
    }

    /// Path on `edges + 1` vertices.
    pub fn path(edges: usize) -> Self {
        let pairs: Vec<_> = (0..edges).map(|i| (i, i + 1)).collect();
        Self::from_pairs(edges + 1, &pairs).expect("path is valid")
    }

    /// Star with a centre and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        let pairs: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Self::from_pairs(leaves + 1, &pairs).expect("star is valid")
    }

    /// Cycle on `n >= 3` vertices.
    pub fn ring(n: usize) -> Self {
        assert!(n >= 3, "a ring needs at least three vertices");
        let pairs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::from_pairs(n, &pairs).expect("ring is valid")
    }

    pub fn complete(n: usize) -> Self {
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                pairs.push((i, j));
            }
        }
        Self::from_pairs(n, &pairs).expect("complete graph is valid")
    }

    /// Circulant graph: vertex `i` is joined to `i ± 1, ..., i ± reach`.
    pub fn circulant(n: usize, reach: usize) -> Result<Self> {
        if reach == 0 || n < 3 || reach > n / 2 {
            return Err(Error::InvalidArgs(format!(
                "circulant reach {reach} invalid for {n} vertices"
            )));
        }
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let gap = (j - i).min(n - (j - i));
                if gap <= reach {
                    pairs.push((i, j));
                }
            }
        }
        Self::from_pairs(n, &pairs)
    }
}
