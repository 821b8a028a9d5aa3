//! Eigenvalue certificates and the explicit state decompositions.

use serde::Serialize;

use super::matrix::CMatrix;
use super::ops::{
    build_operator, check_dim, ipen_state, phi, phi_perp, projector, sym_projector,
    DenseOperator, Slot,
};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::graph::{cut_space, EdgeSubset, Network};
use crate::witness::{gamma_of, CutCertificate, Witness};

/// Uniform tolerance for semidefiniteness checks.
pub const PSD_TOL: f64 = 1e-8;
const STATE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CutMargin {
    pub cut: EdgeSubset,
    /// Smallest eigenvalue of `Q_K`.
    pub q_min: f64,
    /// Largest eigenvalue of `Q_K`.
    pub q_max: f64,
    /// Smallest eigenvalue of `W - Q_K^{Γ_K}`.
    pub remainder_min: f64,
    /// Whether the certificate was supplied (missing cuts fail).
    pub supplied: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub cuts: Vec<CutMargin>,
    /// Smallest of `q_min`, `remainder_min` and (when the upper bound is
    /// required) `1 - q_max` over all cuts.
    pub min_margin: f64,
    pub require_upper: bool,
    pub passed: bool,
}

/// Checks `W = P_K + Q_K^{Γ_K}` with `P_K, Q_K ⪰ 0` on every nonempty cut,
/// plus `Q_K ⪯ I` when `require_upper` is set.
pub fn verify_fully_decomposable(
    w: &Witness,
    net: &Network,
    certificates: &[CutCertificate],
    require_upper: bool,
    caps: &Caps,
) -> Result<DecompositionReport> {
    if w.edge_count() != net.edge_count() {
        return Err(Error::DimensionMismatch(format!(
            "witness on {} edges, network has {}",
            w.edge_count(),
            net.edge_count()
        )));
    }
    let w_op = build_operator(w, caps)?;
    let space = cut_space(net, caps, true)?;
    let mut cuts = Vec::new();
    let mut min_margin = f64::INFINITY;
    for cut in space.nonempty_cuts() {
        let Some(cert) = certificates.iter().find(|c| &c.cut == cut) else {
            cuts.push(CutMargin {
                cut: cut.clone(),
                q_min: f64::NAN,
                q_max: f64::NAN,
                remainder_min: f64::NAN,
                supplied: false,
            });
            min_margin = f64::NEG_INFINITY;
            continue;
        };
        let q_gamma = build_operator(&cert.q, caps)?;
        let q = q_gamma.partial_transpose(cut, Slot::First);
        let q_eigs = q.matrix.eigenvalues();
        let q_min = q_eigs[0];
        let q_max = *q_eigs.last().expect("nonempty spectrum");
        let remainder_min = (&w_op.matrix - &q_gamma.matrix).min_eigenvalue();
        min_margin = min_margin.min(q_min).min(remainder_min);
        if require_upper {
            min_margin = min_margin.min(1.0 - q_max);
        }
        cuts.push(CutMargin {
            cut: cut.clone(),
            q_min,
            q_max,
            remainder_min,
            supplied: true,
        });
    }
    Ok(DecompositionReport {
        cuts,
        min_margin,
        require_upper,
        passed: min_margin >= -PSD_TOL,
    })
}

fn check_state(rho: &DenseOperator) -> Result<()> {
    let tr = rho.matrix.trace();
    if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
        return Err(Error::NotAState(format!("trace {tr}")));
    }
    if rho.matrix.hermiticity_error() > STATE_TOL {
        return Err(Error::NotAState("not Hermitian".into()));
    }
    let min = rho.matrix.min_eigenvalue();
    if min < -STATE_TOL {
        return Err(Error::NotAState(format!("minimum eigenvalue {min}")));
    }
    Ok(())
}

/// Sum of the negative eigenvalues (in magnitude) of `ρ^{Γ}` across `cut`.
pub fn bipartite_negativity(rho: &DenseOperator, cut: &EdgeSubset) -> Result<f64> {
    check_state(rho)?;
    Ok(rho
        .partial_transpose(cut, Slot::First)
        .matrix
        .eigenvalues()
        .iter()
        .filter(|&&x| x < 0.0)
        .map(|x| -x)
        .sum())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IpenDecompositionReport {
    pub d: u32,
    pub edges: usize,
    pub visibility: f64,
    pub gamma: f64,
    /// Weight of `⊗Φ`; it equals `-2 Tr(W_E ρ)/(d - 1)`.
    pub first_coefficient: f64,
    /// Smallest eigenvalue over all `ρ_T`.
    pub rho_t_min: f64,
    /// Smallest eigenvalue over all `ρ_T^{Γ_T}`.
    pub rho_t_pt_min: f64,
    pub reconstruction_error: f64,
    /// Components PSD and PPT and the sum reproduces the state.
    pub components_valid: bool,
    /// Components valid and no `⊗Φ` weight left, so the state is a PPT
    /// mixture by this decomposition.
    pub ppt_mixture: bool,
}

/// Checks the decomposition
/// `ρ = c_0 ⊗Φ + (1 + (d²-1)γ)^{-N} Σ_{T≠∅} γ^{|T|} ρ_T ⊗ Φ_{E∖T}` with
/// `ρ_T = ⊗_T (I - Φ) + (d+1)(d-1)^{|T|-1} ⊗_T Φ`.
pub fn verify_ipen_decomposition(
    d: u32,
    p: f64,
    edges: usize,
    caps: &Caps,
) -> Result<IpenDecompositionReport> {
    check_dim(d, edges, caps)?;
    if edges == 0 || !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgs(format!("need N ≥ 1 and p in [0, 1], got N = {edges}, p = {p}")));
    }
    let df = f64::from(d);
    let gamma = gamma_of(d, p);
    let n = edges as i32;
    let norm = (1.0 + (df * df - 1.0) * gamma).powi(n);
    let first = (2.0 * df - (df + 1.0) * (1.0 + (df - 1.0) * gamma).powi(n)) / ((df - 1.0) * norm);

    let full = (1usize << edges) - 1;
    let mut sum = projector(d, edges, full).scale(first);
    let mut rho_t_min = f64::INFINITY;
    let mut rho_t_pt_min = f64::INFINITY;
    for t in 1..=full {
        let size = t.count_ones() as i32;
        let blocks: Vec<usize> = (0..edges).filter(|e| t >> e & 1 == 1).collect();
        let mut perp = CMatrix::identity(1);
        let mut phis = CMatrix::identity(1);
        for _ in &blocks {
            perp = perp.kron(&phi_perp(d));
            phis = phis.kron(&phi(d));
        }
        let mut rho_t = perp;
        rho_t.add_scaled(&phis, (df + 1.0) * (df - 1.0).powi(size - 1));
        let local = DenseOperator {
            d,
            edges: blocks.len(),
            matrix: rho_t.clone(),
        };
        rho_t_min = rho_t_min.min(rho_t.min_eigenvalue());
        let pt = local.partial_transpose(&EdgeSubset::full(blocks.len()), Slot::First);
        rho_t_pt_min = rho_t_pt_min.min(pt.matrix.min_eigenvalue());

        let term = embed_blocks(d, edges, &blocks, &rho_t, &phi(d));
        sum.add_scaled(&term, gamma.powi(size) / norm);
    }
    let rho = ipen_state(d, edges, p, caps)?;
    let reconstruction_error = sum.max_abs_diff(&rho.matrix);
    let components_valid =
        rho_t_min >= -PSD_TOL && rho_t_pt_min >= -PSD_TOL && reconstruction_error <= STATE_TOL;
    Ok(IpenDecompositionReport {
        d,
        edges,
        visibility: p,
        gamma,
        first_coefficient: first,
        rho_t_min,
        rho_t_pt_min,
        reconstruction_error,
        components_valid,
        ppt_mixture: components_valid && first.abs() <= STATE_TOL,
    })
}

/// `A` on the edges listed in `on` (in order) and `fill` on every other edge.
fn embed_blocks(d: u32, edges: usize, on: &[usize], a: &CMatrix, fill: &CMatrix) -> CMatrix {
    let dd = (d * d) as usize;
    let dim = dd.pow(edges as u32);
    let digits = |mut idx: usize| {
        let mut out = vec![0; edges];
        for e in (0..edges).rev() {
            out[e] = idx % dd;
            idx /= dd;
        }
        out
    };
    let pack = |ds: &[usize]| ds.iter().fold(0, |acc, &x| acc * dd + x);
    CMatrix::from_fn(dim, |r, c| {
        let (dr, dc) = (digits(r), digits(c));
        let ar: Vec<usize> = on.iter().map(|&e| dr[e]).collect();
        let ac: Vec<usize> = on.iter().map(|&e| dc[e]).collect();
        let mut val = a[(pack(&ar), pack(&ac))];
        for e in 0..edges {
            if !on.contains(&e) {
                val *= fill[(dr[e], dc[e])];
            }
        }
        val
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TriangleSigmaReport {
    pub d: u32,
    pub gamma: f64,
    pub lambdas: [f64; 3],
    /// Distance between `σ^{Γ_B}` and its claimed spectral form.
    pub reconstruction_error: f64,
    pub min_eigenvalue: f64,
}

/// Two-edge operator
/// `σ = Φ⊗Φ/3 + γ/2 [(I-Φ)⊗Φ + Φ⊗(I-Φ)] + γ² (I-Φ)⊗(I-Φ)`, partially
/// transposed on the shared party, against
/// `λ1 P⁺⊗P⁺ + λ2 P⁻⊗P⁻ + λ3 (P⁺⊗P⁻ + P⁻⊗P⁺)`.
pub fn triangle_sigma_check(d: u32, gamma: f64) -> TriangleSigmaReport {
    let df = f64::from(d);
    let (p, q) = (phi(d), phi_perp(d));
    let mut sigma = p.kron(&p).scale(1.0 / 3.0);
    sigma.add_scaled(&q.kron(&p), gamma / 2.0);
    sigma.add_scaled(&p.kron(&q), gamma / 2.0);
    sigma.add_scaled(&q.kron(&q), gamma * gamma);
    let op = DenseOperator {
        d,
        edges: 2,
        matrix: sigma,
    };
    let pt = op.partial_transpose(&EdgeSubset::full(2), Slot::First);
    let g = gamma;
    let l1 = (3.0 * (df - 1.0).powi(2) * g * g + 3.0 * (df - 1.0) * g + 1.0) / (3.0 * df * df);
    let l2 = (3.0 * (df + 1.0).powi(2) * g * g - 3.0 * (df + 1.0) * g + 1.0) / (3.0 * df * df);
    let l3 = (3.0 * (df * df - 1.0) * g * g + 3.0 * g - 1.0) / (3.0 * df * df);
    let (pp, pm) = (sym_projector(d, 1.0), sym_projector(d, -1.0));
    let mut claimed = pp.kron(&pp).scale(l1);
    claimed.add_scaled(&pm.kron(&pm), l2);
    claimed.add_scaled(&pp.kron(&pm), l3);
    claimed.add_scaled(&pm.kron(&pp), l3);
    TriangleSigmaReport {
        d,
        gamma,
        lambdas: [l1, l2, l3],
        reconstruction_error: pt.matrix.max_abs_diff(&claimed),
        min_eigenvalue: pt.matrix.min_eigenvalue(),
    }
}

/// Largest squared Schmidt coefficient of `⊗_e |φ⁺⟩_e` over all vertex
/// bipartitions, computed from the explicit state vector.
pub fn max_schmidt_weight(net: &Network, d: u32, caps: &Caps) -> Result<f64> {
    let edges = net.edge_count();
    check_dim(d, edges, caps)?;
    let du = d as usize;
    let qudits = 2 * edges;
    let dim = du.pow(qudits as u32);
    // Amplitude is d^{-N/2} when both qudits of every edge agree.
    let amp = (d as f64).powf(-(edges as f64) / 2.0);
    let digit = |idx: usize, q: usize| (idx / du.pow((qudits - 1 - q) as u32)) % du;
    let psi: Vec<f64> = (0..dim)
        .map(|i| {
            if (0..edges).all(|e| digit(i, 2 * e) == digit(i, 2 * e + 1)) {
                amp
            } else {
                0.0
            }
        })
        .collect();
    let owner: Vec<usize> = net
        .edges()
        .iter()
        .flat_map(|&(u, v)| [u, v])
        .collect();
    let n = net.vertex_count();
    let mut best: f64 = 0.0;
    for s in 1..(1u64 << (n - 1)) {
        // Vertex 0 stays outside `s` so each bipartition is visited once.
        let side: Vec<bool> = owner.iter().map(|&v| (s << 1) >> v & 1 == 1).collect();
        let inside: Vec<usize> = (0..qudits).filter(|&q| side[q]).collect();
        let outside: Vec<usize> = (0..qudits).filter(|&q| !side[q]).collect();
        let rows = du.pow(inside.len() as u32);
        let cols = du.pow(outside.len() as u32);
        let mut m = vec![0.0; rows * cols];
        for (i, &a) in psi.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let r = inside.iter().fold(0, |acc, &q| acc * du + digit(i, q));
            let c = outside.iter().fold(0, |acc, &q| acc * du + digit(i, q));
            m[r * cols + c] = a;
        }
        let gram = CMatrix::from_fn(rows, |i, j| {
            let v: f64 = (0..cols).map(|k| m[i * cols + k] * m[j * cols + k]).sum();
            num_complex::Complex64::new(v, 0.0)
        });
        let top = *gram.eigenvalues().last().expect("nonempty");
        best = best.max(top);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witness::triangle_gamma0;

    #[test]
    fn embed_blocks_matches_kron_for_contiguous_blocks() {
        let a = phi(2).kron(&phi_perp(2));
        let got = embed_blocks(2, 3, &[0, 1], &a, &phi(2));
        let want = a.kron(&phi(2));
        assert!(got.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn sigma_spectral_form() {
        for d in 2..4 {
            let r = triangle_sigma_check(d, triangle_gamma0(d));
            assert!(r.reconstruction_error < 1e-12);
            assert!(r.lambdas[2].abs() < 1e-12);
            assert!(r.min_eigenvalue > -1e-12);
        }
    }

    #[test]
    fn single_edge_negativity_of_phi() {
        let rho = ipen_state(2, 1, 1.0, &Caps::default()).unwrap();
        let n = bipartite_negativity(&rho, &EdgeSubset::full(1)).unwrap();
        assert!((n - 0.5).abs() < 1e-12);
    }

    #[test]
    fn not_a_state() {
        let op = DenseOperator {
            d: 2,
            edges: 1,
            matrix: CMatrix::identity(4),
        };
        assert!(matches!(
            bipartite_negativity(&op, &EdgeSubset::full(1)),
            Err(Error::NotAState(_))
        ));
    }
}
