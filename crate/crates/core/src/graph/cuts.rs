use serde::Serialize;

use super::{EdgeSubset, Network};
use crate::caps::Caps;
use crate::error::Result;

/// A subspace of the edge space kept in reduced echelon form.
#[derive(Clone, Debug)]
pub struct Gf2Span {
    len: usize,
    /// Rows with distinct leading bits, sorted by leading bit descending.
    rows: Vec<EdgeSubset>,
}

impl Gf2Span {
    pub fn new(len: usize) -> Self {
        Self {
            len,
            rows: Vec::new(),
        }
    }

    pub fn from_vectors<'a, I: IntoIterator<Item = &'a EdgeSubset>>(len: usize, vectors: I) -> Self {
        let mut span = Self::new(len);
        for v in vectors {
            span.insert(v);
        }
        span
    }

    pub fn dimension(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the span; the result is empty iff `v` is a member.
    pub fn reduce(&self, v: &EdgeSubset) -> EdgeSubset {
        let mut r = v.clone();
        for row in &self.rows {
            let lead = row.leading().expect("rows are nonzero");
            if r.contains(lead) {
                r ^= row;
            }
        }
        r
    }

    pub fn contains(&self, v: &EdgeSubset) -> bool {
        self.reduce(v).is_empty()
    }

    /// Adds `v`; returns false when it was already in the span.
    pub fn insert(&mut self, v: &EdgeSubset) -> bool {
        assert_eq!(v.universe(), self.len, "edge universes differ");
        let r = self.reduce(v);
        let Some(lead) = r.leading() else {
            return false;
        };
        for row in &mut self.rows {
            if row.contains(lead) {
                *row ^= &r;
            }
        }
        let pos = self
            .rows
            .iter()
            .position(|row| row.leading().unwrap() < lead)
            .unwrap_or(self.rows.len());
        self.rows.insert(pos, r);
        true
    }

    pub fn is_subspace_of(&self, other: &Gf2Span) -> bool {
        self.rows.iter().all(|r| other.contains(r))
    }
}

/// The cut space of a network.
#[derive(Clone, Debug, Serialize)]
pub struct CutSpace {
    /// Fundamental cuts of a breadth-first spanning tree (`n - 1` of them).
    pub basis: Vec<EdgeSubset>,
    /// All `2^(n-1)` cuts including the empty set, when materialized.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub all_cuts: Option<Vec<EdgeSubset>>,
    /// `histogram[k]` = number of nonempty cuts with `k` edges.
    pub histogram: Vec<u64>,
}

impl CutSpace {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn nonempty_count(&self) -> u64 {
        self.histogram.iter().sum()
    }

    pub fn min_cut_size(&self) -> Option<usize> {
        self.histogram.iter().position(|&c| c > 0)
    }

    pub fn span(&self) -> Gf2Span {
        let len = self.basis.first().map_or(0, |b| b.universe());
        Gf2Span::from_vectors(len, &self.basis)
    }

    /// Nonempty cuts, panicking if they were not materialized.
    pub fn nonempty_cuts(&self) -> impl Iterator<Item = &EdgeSubset> {
        self.all_cuts
            .as_ref()
            .expect("cut space was built without materialized cuts")
            .iter()
            .filter(|c| !c.is_empty())
    }
}

/// Vertex order of the reflected Gray code: step `i` flips bit
/// `trailing_zeros(i)` of the subset of vertices `1..n`.
fn gray_flip(step: u64) -> usize {
    step.trailing_zeros() as usize + 1
}

/// Builds the cut space. Enumeration fixes vertex 0 outside the flipped set,
/// so every cut is visited exactly once.
pub fn cut_space(net: &Network, caps: &Caps, materialize: bool) -> Result<CutSpace> {
    let n = net.vertex_count();
    let edges = net.edge_count();
    caps.check_bits("cut enumeration bits (vertices - 1)", n - 1)?;

    let basis = fundamental_cuts(net);
    let histogram;
    let mut all_cuts = None;
    if materialize {
        let incident: Vec<EdgeSubset> = (0..n).map(|v| net.incident(v)).collect();
        let total = 1u64 << (n - 1);
        let mut cuts = Vec::with_capacity(total as usize);
        let mut hist = vec![0u64; edges + 1];
        let mut cut = EdgeSubset::empty(edges);
        cuts.push(cut.clone());
        for step in 1..total {
            cut ^= &incident[gray_flip(step)];
            hist[cut.count()] += 1;
            cuts.push(cut.clone());
        }
        histogram = hist;
        all_cuts = Some(cuts);
    } else {
        histogram = cut_size_histogram(net, caps)?;
    }
    Ok(CutSpace {
        basis,
        all_cuts,
        histogram,
    })
}

/// Streams the sizes of all nonempty cuts without storing them.
///
/// Moving vertex `v` into `S` changes the cut size by
/// `deg(v) - 2 |N(v) ∩ S|`.
pub fn cut_size_histogram(net: &Network, caps: &Caps) -> Result<Vec<u64>> {
    let n = net.vertex_count();
    caps.check_bits("cut enumeration bits (vertices - 1)", n - 1)?;
    let mut hist = vec![0u64; net.edge_count() + 1];
    let degrees: Vec<i64> = (0..n).map(|v| net.degree(v) as i64).collect();
    let mut s = 0u64;
    let mut size: i64 = 0;
    for step in 1..(1u64 << (n - 1)) {
        let v = gray_flip(step);
        let bit = 1u64 << v;
        let inside = i64::from((net.neighbors(v) & s & !bit).count_ones());
        if s & bit == 0 {
            size += degrees[v] - 2 * inside;
        } else {
            size -= degrees[v] - 2 * inside;
        }
        s ^= bit;
        hist[size as usize] += 1;
    }
    hist[0] = 0;
    Ok(hist)
}

pub fn min_cut_size(net: &Network, caps: &Caps) -> Result<usize> {
    let hist = cut_size_histogram(net, caps)?;
    Ok(hist.iter().position(|&c| c > 0).expect("connected graphs with an edge have cuts"))
}

/// Fundamental cuts: for each tree edge, the cut around the subtree it hangs.
pub(crate) fn fundamental_cuts(net: &Network) -> Vec<EdgeSubset> {
    let (parent, order) = net.spanning_tree();
    let n = net.vertex_count();
    let mut subtree = vec![0u64; n];
    for &v in order.iter().rev() {
        subtree[v] |= 1 << v;
        if let Some((p, _)) = parent[v] {
            subtree[p] |= subtree[v];
        }
    }
    order
        .iter()
        .filter(|&&v| parent[v].is_some())
        .map(|&v| net.cut_of(subtree[v]))
        .collect()
}

/// Fundamental cycles of the breadth-first spanning tree, one per non-tree edge.
pub fn cycle_basis(net: &Network) -> Vec<EdgeSubset> {
    let (parent, order) = net.spanning_tree();
    let n = net.vertex_count();
    let mut depth = vec![0usize; n];
    for &v in &order {
        if let Some((p, _)) = parent[v] {
            depth[v] = depth[p] + 1;
        }
    }
    let tree_edges: Vec<usize> = parent.iter().flatten().map(|&(_, e)| e).collect();
    let mut cycles = Vec::new();
    for (idx, &(a, b)) in net.edges().iter().enumerate() {
        if tree_edges.contains(&idx) {
            continue;
        }
        let mut cycle = EdgeSubset::empty(net.edge_count());
        cycle.insert(idx);
        let (mut u, mut v) = (a, b);
        while u != v {
            if depth[u] >= depth[v] {
                let (p, e) = parent[u].expect("non-root has parent");
                cycle.toggle(e);
                u = p;
            } else {
                let (p, e) = parent[v].expect("non-root has parent");
                cycle.toggle(e);
                v = p;
            }
        }
        cycles.push(cycle);
    }
    cycles
}
