use serde::Serialize;

use super::{EdgeSubset, Network};
use crate::error::{Error, Result};

/// Edge classes of a cactus: one per cycle, plus the edges on no cycle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CactusDecomposition {
    pub cycle_classes: Vec<EdgeSubset>,
    pub acyclic_class: EdgeSubset,
    pub cyclomatic_number: usize,
}

impl CactusDecomposition {
    /// All classes with the acyclic one first: `[C_0, C_1, ..., C_nc]`.
    pub fn classes(&self) -> Vec<EdgeSubset> {
        std::iter::once(self.acyclic_class.clone())
            .chain(self.cycle_classes.iter().cloned())
            .collect()
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        self.classes().iter().map(EdgeSubset::count).collect()
    }

    /// Class index (0 = acyclic) of every edge.
    pub fn class_of_edges(&self) -> Vec<usize> {
        let n = self.acyclic_class.universe();
        let mut out = vec![0; n];
        for (c, class) in self.cycle_classes.iter().enumerate() {
            for e in class.indices() {
                out[e] = c + 1;
            }
        }
        out
    }
}

struct Dfs<'a> {
    net: &'a Network,
    disc: Vec<usize>,
    low: Vec<usize>,
    timer: usize,
    stack: Vec<usize>,
    components: Vec<Vec<usize>>,
}

impl Dfs<'_> {
    fn visit(&mut self, u: usize, parent_edge: Option<usize>) {
        self.timer += 1;
        self.disc[u] = self.timer;
        self.low[u] = self.timer;
        for (idx, &(a, b)) in self.net.edges().iter().enumerate() {
            if Some(idx) == parent_edge {
                continue;
            }
            let v = if a == u {
                b
            } else if b == u {
                a
            } else {
                continue;
            };
            if self.disc[v] == 0 {
                self.stack.push(idx);
                self.visit(v, Some(idx));
                self.low[u] = self.low[u].min(self.low[v]);
                if self.low[v] >= self.disc[u] {
                    let mut comp = Vec::new();
                    while let Some(e) = self.stack.pop() {
                        comp.push(e);
                        if e == idx {
                            break;
                        }
                    }
                    self.components.push(comp);
                }
            } else if self.disc[v] < self.disc[u] {
                self.stack.push(idx);
                self.low[u] = self.low[u].min(self.disc[v]);
            }
        }
    }
}

/// Splits the edges into cycle classes via biconnected components; a
/// component is a single cycle iff it has as many edges as vertices.
pub fn cactus_decomposition(net: &Network) -> Result<CactusDecomposition> {
    let n = net.vertex_count();
    let mut dfs = Dfs {
        net,
        disc: vec![0; n],
        low: vec![0; n],
        timer: 0,
        stack: Vec::new(),
        components: Vec::new(),
    };
    dfs.visit(0, None);

    let edges = net.edge_count();
    let mut acyclic = EdgeSubset::empty(edges);
    let mut cycles = Vec::new();
    for comp in dfs.components {
        if comp.len() == 1 {
            acyclic.insert(comp[0]);
            continue;
        }
        let vertices = comp
            .iter()
            .map(|&e| {
                let (a, b) = net.edge(e);
                (1u64 << a) | (1u64 << b)
            })
            .fold(0u64, |acc, m| acc | m)
            .count_ones() as usize;
        if comp.len() != vertices {
            return Err(Error::NotCactus(*comp.iter().min().unwrap()));
        }
        cycles.push(EdgeSubset::from_indices(edges, comp));
    }
    cycles.sort_by_key(|c| c.indices().next());
    Ok(CactusDecomposition {
        cyclomatic_number: cycles.len(),
        cycle_classes: cycles,
        acyclic_class: acyclic,
    })
}
