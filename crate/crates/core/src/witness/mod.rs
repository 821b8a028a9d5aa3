//! Sub-symmetric witnesses in the projector basis
//! `P_T = ⊗_{e∈T} Φ_e ⊗ ⊗_{e∉T} (I - Φ_e)`.

mod certificate;
mod state;
mod thresholds;

pub use certificate::{
    bg_ssw_certificates, e_ssw_certificates, triangle_certificates, CutCertificate,
};
pub use state::{
    gamma_of, visibility_of_fidelity, visibility_of_gamma, IsotropicParams, NetworkState,
    StateSpec,
};
pub use thresholds::{
    bg_expectation_from_histogram, critical_visibility_bg, critical_visibility_bg_from_histogram,
    critical_visibility_tree, critical_visibility_triangle, e_ssw_expectation_ipen,
    fidelity_alpha, fidelity_threshold_from_min_cut, fidelity_witness_threshold,
    tree_gme_condition, tree_negativity, triangle_expectation_ipen, triangle_gamma0,
};

use serde::Serialize;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::graph::{cut_space, Network};
use crate::numeric::KahanSum;

/// Real coefficients `w_T`, indexed by the Φ-edge mask `T`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    d: u32,
    edges: usize,
    coeffs: Vec<f64>,
}

impl Witness {
    pub fn new(d: u32, coeffs: Vec<f64>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidArgs(format!("local dimension {d} < 2")));
        }
        if !coeffs.len().is_power_of_two() {
            return Err(Error::InvalidArgs(format!(
                "{} coefficients is not a power of two",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgs("non-finite witness coefficient".into()));
        }
        let edges = coeffs.len().trailing_zeros() as usize;
        Ok(Self { d, edges, coeffs })
    }

    pub fn zeros(d: u32, edges: usize) -> Self {
        Self {
            d,
            edges,
            coeffs: vec![0.0; 1 << edges],
        }
    }

    /// `⊗_e (φ_e Φ_e + π_e (I - Φ_e))`.
    pub fn product(d: u32, factors: &[(f64, f64)]) -> Self {
        let mut coeffs = vec![1.0];
        for &(phi, perp) in factors {
            let mut next = Vec::with_capacity(coeffs.len() * 2);
            next.extend(coeffs.iter().map(|c| c * perp));
            next.extend(coeffs.iter().map(|c| c * phi));
            coeffs = next;
        }
        Self {
            d,
            edges: factors.len(),
            coeffs,
        }
    }

    pub fn local_dim(&self) -> u32 {
        self.d
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, t: usize) -> f64 {
        self.coeffs[t]
    }

    pub fn set_coeff(&mut self, t: usize, value: f64) {
        self.coeffs[t] = value;
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
            ..self.clone()
        }
    }

    /// Adds `factor * other` in place.
    pub fn add_scaled(&mut self, other: &Witness, factor: f64) {
        assert_eq!(self.edges, other.edges);
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += factor * b;
        }
    }

    /// `Tr(W ρ) = Σ_T w_T p_T`.
    pub fn expectation(&self, state: &NetworkState) -> Result<f64> {
        if state.edge_count() != self.edges {
            return Err(Error::DimensionMismatch(format!(
                "witness on {} edges, state on {}",
                self.edges,
                state.edge_count()
            )));
        }
        if state.local_dim() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "witness has d = {}, state has d = {}",
                self.d,
                state.local_dim()
            )));
        }
        Ok(self.dot(&state.p_vector()))
    }

    pub fn dot(&self, p: &[f64]) -> f64 {
        let mut sum = KahanSum::new();
        for (w, p) in self.coeffs.iter().zip(p) {
            sum.add(w * p);
        }
        sum.value()
    }

    /// `Tr(P_T) = (d² - 1)^(N - |T|)`, so `Tr W = Σ_T w_T (d²-1)^(N-|T|)`.
    pub fn trace(&self) -> f64 {
        let perp = f64::from(self.d * self.d - 1);
        let n = self.edges as i32;
        let mut sum = KahanSum::new();
        for (t, w) in self.coeffs.iter().enumerate() {
            sum.add(w * perp.powi(n - t.count_ones() as i32));
        }
        sum.value()
    }
}

/// `W_E = -d ⊗Φ + (d+1)/2 ⊗ (I + dΦ)/(d+1)`, expanded as
/// `w_T = -d [T = E] + (d+1)/2 (d+1)^(-|E \ T|)`.
pub fn e_ssw(edges: usize, d: u32, caps: &Caps) -> Result<Witness> {
    caps.check_bits("witness coefficient bits (edges)", edges)?;
    if d < 2 {
        return Err(Error::InvalidArgs(format!("local dimension {d} < 2")));
    }
    let df = f64::from(d);
    let factor = 1.0 / (df + 1.0);
    let mut w = Witness::product(d, &vec![(1.0, factor); edges]).scaled((df + 1.0) / 2.0);
    let full = (1usize << edges) - 1;
    w.coeffs[full] -= df;
    Ok(w)
}

/// `W_B(G) = -⊗Φ + Σ_{K ≠ ∅} (I - Φ)^{⊗K} / (d-1)^{|K|} ⊗ Φ^{⊗(E \ K)}`.
pub fn bg_ssw(net: &Network, d: u32, caps: &Caps) -> Result<Witness> {
    let edges = net.edge_count();
    caps.check_bits("witness coefficient bits (edges)", edges)?;
    if d < 2 {
        return Err(Error::InvalidArgs(format!("local dimension {d} < 2")));
    }
    let space = cut_space(net, caps, true)?;
    let full = (1usize << edges) - 1;
    let mut w = Witness::zeros(d, edges);
    w.coeffs[full] = -1.0;
    let inv = 1.0 / f64::from(d - 1);
    for cut in space.nonempty_cuts() {
        let k = cut.mask().expect("witness edges fit a mask") as usize;
        w.coeffs[full & !k] += inv.powi(cut.count() as i32);
    }
    Ok(w)
}

/// Triangle witness: `w_E = -(d²-1)/2`, `w_T = 1/2` for `∅ ≠ T ⊊ E`.
pub fn triangle_ssw(d: u32) -> Result<Witness> {
    if d < 2 {
        return Err(Error::InvalidArgs(format!("local dimension {d} < 2")));
    }
    let mut coeffs = vec![0.5; 8];
    coeffs[0] = 0.0;
    coeffs[7] = -f64::from(d * d - 1) / 2.0;
    Witness::new(d, coeffs)
}

/// Fidelity witness `α I - ⊗Φ` with `α = d^(-λ)` for minimum cut size `λ`.
pub fn fidelity_witness(net: &Network, d: u32, caps: &Caps) -> Result<Witness> {
    let edges = net.edge_count();
    caps.check_bits("witness coefficient bits (edges)", edges)?;
    if d < 2 {
        return Err(Error::InvalidArgs(format!("local dimension {d} < 2")));
    }
    let alpha = fidelity_alpha(d, crate::graph::min_cut_size(net, caps)?);
    let mut w = Witness::product(d, &vec![(1.0, 1.0); edges]).scaled(alpha);
    w.coeffs[(1usize << edges) - 1] -= 1.0;
    Ok(w)
}

/// True if the network is the 3-cycle.
pub fn is_triangle(net: &Network) -> bool {
    net.vertex_count() == 3 && net.edge_count() == 3
}
