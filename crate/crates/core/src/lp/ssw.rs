//! Full SSW programs: one `w_T` per edge subset and one block of `q_T(K)`
//! per nonempty cut.

use serde::Serialize;

use super::model::{LinearProgram, LpStatus, Relation};
use super::simplex::solve_lp;
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::graph::{cut_space, EdgeSubset, Network};
use crate::witness::{CutCertificate, Witness};

/// Threshold on the feasibility optimum above which a state counts as
/// detected.
pub const DETECTION_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProgramKind {
    /// Lower bound on the GME negativity.
    Negativity,
    /// Normalized witness search: a positive optimum certifies GME.
    Feasibility,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolverStats {
    pub rows: usize,
    pub columns: usize,
    pub iterations: u64,
    pub max_violation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SswSolution {
    pub kind: ProgramKind,
    /// Optimal value of `-Σ_T w_T p_T`.
    pub bound: f64,
    pub detected: bool,
    pub witness: Witness,
    pub certificates: Vec<CutCertificate>,
    pub stats: SolverStats,
}

#[derive(Clone, Debug)]
pub struct SswProgram {
    pub kind: ProgramKind,
    pub lp: LinearProgram,
    d: u32,
    edges: usize,
    cuts: Vec<EdgeSubset>,
}

impl SswProgram {
    pub fn cuts(&self) -> &[EdgeSubset] {
        &self.cuts
    }

    pub fn solve(&self) -> Result<SswSolution> {
        let sol = solve_lp(&self.lp)?.require_optimal()?;
        let size = 1usize << self.edges;
        let coeffs: Vec<f64> = match self.kind {
            ProgramKind::Negativity => sol.values[..size].to_vec(),
            ProgramKind::Feasibility => (0..size)
                .map(|t| sol.values[t] - sol.values[size + t])
                .collect(),
        };
        let w_width = match self.kind {
            ProgramKind::Negativity => size,
            ProgramKind::Feasibility => 2 * size,
        };
        let certificates = self
            .cuts
            .iter()
            .enumerate()
            .map(|(c, cut)| {
                let start = w_width + c * size;
                CutCertificate {
                    cut: cut.clone(),
                    q: Witness::new(self.d, sol.values[start..start + size].to_vec())
                        .expect("solver values are finite"),
                }
            })
            .collect();
        Ok(SswSolution {
            kind: self.kind,
            bound: sol.objective,
            detected: sol.objective > DETECTION_TOL,
            witness: Witness::new(self.d, coeffs)?,
            certificates,
            stats: SolverStats {
                rows: self.lp.num_constraints(),
                columns: self.lp.num_variables(),
                iterations: sol.iterations,
                max_violation: sol.max_violation,
            },
        })
    }
}

/// `x_T[T'] = (-1)^{|T∩T'|} (d+1)^{|(K∖T)∩T'|} (d-1)^{|(K∖T)∖T'|}` for
/// `T, T' ⊆ K`: the eigenvalue, scaled by `d^{|K|}`, of the partially
/// transposed `P_T` restricted to `K` on the `P⁻`-pattern `T'`.
fn overlap(d: u32, k: usize, t: usize, tp: usize) -> f64 {
    let df = f64::from(d);
    let rest = k & !t;
    let sign = if (t & tp).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
    sign * (df + 1.0).powi((rest & tp).count_ones() as i32)
        * (df - 1.0).powi((rest & !tp).count_ones() as i32)
}

fn submasks(mask: usize) -> impl Iterator<Item = usize> {
    let mut next = Some(mask);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & mask) };
        Some(cur)
    })
}

fn check_inputs(net: &Network, d: u32, p: &[f64], caps: &Caps) -> Result<Vec<EdgeSubset>> {
    let edges = net.edge_count();
    caps.check_bits("witness coefficient bits (edges)", edges)?;
    if d < 2 {
        return Err(Error::InvalidArgs(format!("local dimension {d} < 2")));
    }
    if p.len() != 1 << edges {
        return Err(Error::DimensionMismatch(format!(
            "p-vector has {} entries, network needs {}",
            p.len(),
            1u64 << edges
        )));
    }
    Ok(cut_space(net, caps, true)?.nonempty_cuts().cloned().collect())
}

fn check_size(rows: usize, columns: usize, caps: &Caps) -> Result<()> {
    let cells = (rows as u64 + 2) * (columns as u64 + 1);
    if cells > caps.lp_cells {
        return Err(Error::CapExceeded {
            what: format!("simplex tableau cells ({rows} rows x {columns} columns)"),
            requested: cells,
            limit: caps.lp_cells,
        });
    }
    Ok(())
}

/// Adds the eigenvalue rows of `Q_K` for every cut, lower bound always and
/// upper bound `d^{|K|}` when `upper` is set.
fn add_cut_rows(
    lp: &mut LinearProgram,
    d: u32,
    edges: usize,
    cuts: &[EdgeSubset],
    q_start: usize,
    upper: bool,
) {
    let full = (1usize << edges) - 1;
    let size = 1usize << edges;
    for (c, cut) in cuts.iter().enumerate() {
        let k = cut.mask().expect("edges fit a mask") as usize;
        let base = q_start + c * size;
        let cap = f64::from(d).powi(cut.count() as i32);
        let inner: Vec<usize> = submasks(k).collect();
        for tilde in submasks(full & !k) {
            for &tp in &inner {
                let coeffs: Vec<(usize, f64)> = inner
                    .iter()
                    .map(|&t| (base + (t | tilde), overlap(d, k, t, tp)))
                    .collect();
                if upper {
                    lp.add_constraint(coeffs.clone(), Relation::Le, cap);
                }
                lp.add_constraint(coeffs, Relation::Ge, 0.0);
            }
        }
    }
}

/// Lower bound on the GME negativity of a state with the given `p_T`:
/// maximize `-Σ w_T p_T` over SSWs whose cut certificates satisfy
/// `0 ⪯ Q_K ⪯ I`.
pub fn build_negativity_lp(net: &Network, d: u32, p: &[f64], caps: &Caps) -> Result<SswProgram> {
    let cuts = check_inputs(net, d, p, caps)?;
    let edges = net.edge_count();
    let size = 1usize << edges;
    let columns = size * (1 + cuts.len());
    let rows = 3 * size * cuts.len();
    check_size(rows, columns, caps)?;

    let mut lp = LinearProgram::new();
    for t in 0..size {
        let j = lp.add_variable(format!("w[{t}]"), true);
        lp.set_objective(j, -p[t]);
    }
    for c in 0..cuts.len() {
        for t in 0..size {
            lp.add_variable(format!("q{c}[{t}]"), true);
        }
    }
    add_cut_rows(&mut lp, d, edges, &cuts, size, true);
    for c in 0..cuts.len() {
        for t in 0..size {
            lp.add_constraint(vec![(size + c * size + t, 1.0), (t, -1.0)], Relation::Le, 0.0);
        }
    }
    Ok(SswProgram {
        kind: ProgramKind::Negativity,
        lp,
        d,
        edges,
        cuts,
    })
}

/// Witness search under the gauge `Σ_T |w_T| ≤ 1`, with `w = w⁺ - w⁻`.
pub fn build_feasibility_lp(net: &Network, d: u32, p: &[f64], caps: &Caps) -> Result<SswProgram> {
    let cuts = check_inputs(net, d, p, caps)?;
    let edges = net.edge_count();
    let size = 1usize << edges;
    let columns = size * (2 + cuts.len());
    let rows = 2 * size * cuts.len() + 1;
    check_size(rows, columns, caps)?;

    let mut lp = LinearProgram::new();
    for t in 0..size {
        let j = lp.add_variable(format!("w+[{t}]"), false);
        lp.set_objective(j, -p[t]);
    }
    for t in 0..size {
        let j = lp.add_variable(format!("w-[{t}]"), false);
        lp.set_objective(j, p[t]);
    }
    for c in 0..cuts.len() {
        for t in 0..size {
            lp.add_variable(format!("q{c}[{t}]"), true);
        }
    }
    let q_start = 2 * size;
    add_cut_rows(&mut lp, d, edges, &cuts, q_start, false);
    for c in 0..cuts.len() {
        for t in 0..size {
            lp.add_constraint(
                vec![(q_start + c * size + t, 1.0), (t, -1.0), (size + t, 1.0)],
                Relation::Le,
                0.0,
            );
        }
    }
    lp.add_constraint((0..2 * size).map(|j| (j, 1.0)).collect(), Relation::Le, 1.0);
    Ok(SswProgram {
        kind: ProgramKind::Feasibility,
        lp,
        d,
        edges,
        cuts,
    })
}

/// Searches cut certificates for a fixed witness: `Q_K ⪰ 0` and `q_T(K) ≤ w_T`
/// for every nonempty cut. Returns `None` when no such certificates exist.
pub fn certify_witness(
    net: &Network,
    w: &Witness,
    caps: &Caps,
) -> Result<Option<Vec<CutCertificate>>> {
    let d = w.local_dim();
    let edges = net.edge_count();
    if w.edge_count() != edges {
        return Err(Error::DimensionMismatch(format!(
            "witness on {} edges, network has {edges}",
            w.edge_count()
        )));
    }
    let size = 1usize << edges;
    let cuts = check_inputs(net, d, &vec![0.0; size], caps)?;
    let columns = size * cuts.len();
    let rows = 2 * size * cuts.len();
    check_size(rows, columns, caps)?;
    let mut lp = LinearProgram::new();
    for c in 0..cuts.len() {
        for t in 0..size {
            lp.add_variable(format!("q{c}[{t}]"), true);
        }
    }
    add_cut_rows(&mut lp, d, edges, &cuts, 0, false);
    for c in 0..cuts.len() {
        for t in 0..size {
            lp.add_constraint(vec![(c * size + t, 1.0)], Relation::Le, w.coeff(t));
        }
    }
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Ok(None);
    }
    Ok(Some(
        cuts.iter()
            .enumerate()
            .map(|(c, cut)| CutCertificate {
                cut: cut.clone(),
                q: Witness::new(d, sol.values[c * size..(c + 1) * size].to_vec())
                    .expect("solver values are finite"),
            })
            .collect(),
    ))
}
