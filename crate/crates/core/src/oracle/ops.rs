//! Network operators on `N` edges of two qudits each. Qudit `2e` is the first
//! slot of edge `e` and `2e + 1` the second; qudit 0 is the most significant
//! digit of the computational index.

use num_complex::Complex64;

use super::matrix::CMatrix;
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::graph::EdgeSubset;
use crate::witness::Witness;

/// Which qudit of an edge a partial transpose acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    First,
    Second,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TwirlMode {
    /// Projection onto `span{Φ, I - Φ}`.
    UUStar,
    /// Projection onto `span{P⁺, P⁻}`.
    UU,
}

/// An operator on a network of `edges` edges with local dimension `d`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    pub d: u32,
    pub edges: usize,
    pub matrix: CMatrix,
}

pub fn check_dim(d: u32, edges: usize, caps: &Caps) -> Result<usize> {
    let dim = (d as u64).checked_pow(2 * edges as u32).unwrap_or(u64::MAX);
    if dim > caps.oracle_dim as u64 {
        return Err(Error::CapExceeded {
            what: "dense operator dimension".into(),
            requested: dim,
            limit: caps.oracle_dim as u64,
        });
    }
    Ok(dim as usize)
}

/// `|φ⁺⟩⟨φ⁺|` with `|φ⁺⟩ = Σ_i |ii⟩ / √d`.
pub fn phi(d: u32) -> CMatrix {
    let d = d as usize;
    CMatrix::from_fn(d * d, |r, c| {
        if r % (d + 1) == 0 && c % (d + 1) == 0 {
            Complex64::new(1.0 / d as f64, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

pub fn phi_perp(d: u32) -> CMatrix {
    &CMatrix::identity((d * d) as usize) - &phi(d)
}

/// Swap operator on two qudits.
pub fn swap(d: u32) -> CMatrix {
    let d = d as usize;
    CMatrix::from_fn(d * d, |r, c| {
        let (a, b) = (r / d, r % d);
        if c == b * d + a {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Symmetric (`sign = 1`) or antisymmetric (`sign = -1`) projector.
pub fn sym_projector(d: u32, sign: f64) -> CMatrix {
    let mut m = CMatrix::identity((d * d) as usize);
    m.add_scaled(&swap(d), sign);
    m.scale(0.5)
}

/// `⊗_e (Φ_e if e ∈ T else I - Φ_e)`.
pub fn projector(d: u32, edges: usize, t: usize) -> CMatrix {
    let (p, q) = (phi(d), phi_perp(d));
    let mut m = CMatrix::identity(1);
    for e in 0..edges {
        m = m.kron(if t >> e & 1 == 1 { &p } else { &q });
    }
    m
}

pub fn build_operator(w: &Witness, caps: &Caps) -> Result<DenseOperator> {
    let (d, edges) = (w.local_dim(), w.edge_count());
    let dim = check_dim(d, edges, caps)?;
    let mut m = CMatrix::zeros(dim);
    for (t, &c) in w.coeffs().iter().enumerate() {
        if c != 0.0 {
            m.add_scaled(&projector(d, edges, t), c);
        }
    }
    Ok(DenseOperator { d, edges, matrix: m })
}

/// `⊗_e ρ_e` from per-edge two-qudit states.
pub fn product_state(d: u32, factors: &[CMatrix], caps: &Caps) -> Result<DenseOperator> {
    check_dim(d, factors.len(), caps)?;
    let mut m = CMatrix::identity(1);
    for f in factors {
        if f.dim() != (d * d) as usize {
            return Err(Error::DimensionMismatch(format!(
                "edge state of size {} for d = {d}",
                f.dim()
            )));
        }
        m = m.kron(f);
    }
    Ok(DenseOperator {
        d,
        edges: factors.len(),
        matrix: m,
    })
}

/// `p Φ + (1 - p) I / d²`.
pub fn isotropic_edge(d: u32, p: f64) -> CMatrix {
    let dd = (d * d) as usize;
    let mut m = CMatrix::identity(dd).scale((1.0 - p) / dd as f64);
    m.add_scaled(&phi(d), p);
    m
}

pub fn ipen_state(d: u32, edges: usize, p: f64, caps: &Caps) -> Result<DenseOperator> {
    product_state(d, &vec![isotropic_edge(d, p); edges], caps)
}

impl DenseOperator {
    fn qudits(&self) -> usize {
        2 * self.edges
    }

    fn digit_weight(&self, qudit: usize) -> usize {
        (self.d as usize).pow((self.qudits() - 1 - qudit) as u32)
    }

    /// Transposes the chosen slot of every edge in `edges`.
    pub fn partial_transpose(&self, edges: &EdgeSubset, slot: Slot) -> DenseOperator {
        let d = self.d as usize;
        let weights: Vec<usize> = edges
            .indices()
            .map(|e| {
                let q = 2 * e + usize::from(slot == Slot::Second);
                self.digit_weight(q)
            })
            .collect();
        let n = self.matrix.dim();
        let m = CMatrix::from_fn(n, |r, c| {
            let (mut r2, mut c2) = (r, c);
            for &w in &weights {
                let dr = (r / w) % d;
                let dc = (c / w) % d;
                r2 = r2 - dr * w + dc * w;
                c2 = c2 - dc * w + dr * w;
            }
            self.matrix[(r2, c2)]
        });
        DenseOperator {
            matrix: m,
            ..*self
        }
    }

    /// Splits a full index into (edge part, rest part) for edge `e`.
    fn split(&self, index: usize, e: usize) -> (usize, usize) {
        let dd = (self.d * self.d) as usize;
        let low = dd.pow((self.edges - 1 - e) as u32);
        let hi = index / (low * dd);
        let mid = (index / low) % dd;
        let lo = index % low;
        (mid, hi * low + lo)
    }

    fn join(&self, edge_part: usize, rest: usize, e: usize) -> usize {
        let dd = (self.d * self.d) as usize;
        let low = dd.pow((self.edges - 1 - e) as u32);
        let hi = rest / low;
        let lo = rest % low;
        (hi * dd + edge_part) * low + lo
    }

    /// `Tr_e[(A_e ⊗ I) X]`, an operator on the other edges.
    pub fn partial_trace_with(&self, e: usize, a: &CMatrix) -> CMatrix {
        let dd = (self.d * self.d) as usize;
        let rest = self.matrix.dim() / dd;
        let mut out = CMatrix::zeros(rest);
        for r1 in 0..rest {
            for r2 in 0..rest {
                let mut acc = Complex64::new(0.0, 0.0);
                for s in 0..dd {
                    for s2 in 0..dd {
                        let av = a[(s, s2)];
                        if av != Complex64::new(0.0, 0.0) {
                            acc += av * self.matrix[(self.join(s2, r1, e), self.join(s, r2, e))];
                        }
                    }
                }
                out[(r1, r2)] = acc;
            }
        }
        out
    }

    /// `A_e ⊗ B_rest`, with `A` placed on edge `e`.
    fn embed(&self, e: usize, a: &CMatrix, b: &CMatrix) -> CMatrix {
        let n = self.matrix.dim();
        CMatrix::from_fn(n, |r, c| {
            let (ar, br) = self.split(r, e);
            let (ac, bc) = self.split(c, e);
            a[(ar, ac)] * b[(br, bc)]
        })
    }

    /// Twirl of edge `e`, leaving the other edges untouched.
    pub fn twirl(&self, e: usize, mode: TwirlMode) -> DenseOperator {
        let d = self.d;
        let (x, y, nx, ny) = match mode {
            TwirlMode::UUStar => (phi(d), phi_perp(d), 1.0, f64::from(d * d - 1)),
            TwirlMode::UU => (
                sym_projector(d, 1.0),
                sym_projector(d, -1.0),
                f64::from(d * (d + 1)) / 2.0,
                f64::from(d * (d - 1)) / 2.0,
            ),
        };
        let bx = self.partial_trace_with(e, &x).scale(1.0 / nx);
        let by = self.partial_trace_with(e, &y).scale(1.0 / ny);
        let mut m = self.embed(e, &x, &bx);
        m.add_scaled(&self.embed(e, &y, &by), 1.0);
        DenseOperator { matrix: m, ..*self }
    }

    pub fn twirl_all(&self, mode: TwirlMode) -> DenseOperator {
        (0..self.edges).fold(self.clone(), |acc, e| acc.twirl(e, mode))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_is_unit_trace_projector() {
        for d in 2..5 {
            let p = phi(d);
            assert!((p.trace().re - 1.0).abs() < 1e-14);
            assert!((&p * &p).max_abs_diff(&p) < 1e-14);
        }
    }

    #[test]
    fn projector_traces() {
        let p = projector(2, 2, 0b01);
        assert!((p.trace().re - 3.0).abs() < 1e-12);
    }

    #[test]
    fn transpose_both_slots_of_phi_is_identity_map() {
        let op = DenseOperator {
            d: 3,
            edges: 1,
            matrix: phi(3),
        };
        let all = EdgeSubset::full(1);
        let once = op.partial_transpose(&all, Slot::First);
        let twice = once.partial_transpose(&all, Slot::Second);
        assert!(twice.matrix.max_abs_diff(&phi(3)) < 1e-15);
        // Φ^Γ = F/d.
        assert!(once.matrix.max_abs_diff(&swap(3).scale(1.0 / 3.0)) < 1e-15);
    }

    #[test]
    fn split_join_round_trip() {
        let op = DenseOperator {
            d: 2,
            edges: 3,
            matrix: CMatrix::zeros(64),
        };
        for i in 0..64 {
            for e in 0..3 {
                let (a, b) = op.split(i, e);
                assert_eq!(op.join(a, b, e), i);
            }
        }
    }
}
