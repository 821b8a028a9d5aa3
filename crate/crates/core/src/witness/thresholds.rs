//! Closed-form expectations and critical visibilities on IPEN states.

use super::state::{gamma_of, visibility_of_fidelity, visibility_of_gamma};
use crate::caps::Caps;
use crate::error::Result;
use crate::graph::{cut_size_histogram, Network};
use crate::numeric::{bisect, pow_nonneg, KahanSum};

fn check_visibility(p: f64) {
    assert!((0.0..=1.0).contains(&p), "visibility {p} outside [0, 1]");
}

/// `Tr(W_E ρ) = (d+1)/2 b^N - d a^N` on the IPEN state, with
/// `a = (1 + (d²-1)p)/d²` and `b = (1 + (d-1)p)/d`.
pub fn e_ssw_expectation_ipen(d: u32, p: f64, edges: usize) -> f64 {
    check_visibility(p);
    let df = f64::from(d);
    let a = (1.0 + (df * df - 1.0) * p) / (df * df);
    let b = (1.0 + (df - 1.0) * p) / df;
    let n = edges as i32;
    (df + 1.0) / 2.0 * b.powi(n) - df * a.powi(n)
}

/// GME negativity of the IPEN state on any tree with `edges` edges.
pub fn tree_negativity(d: u32, p: f64, edges: usize) -> f64 {
    (-e_ssw_expectation_ipen(d, p, edges)).max(0.0)
}

/// `(1 - ν_d/d)^N > (d+1)/(2d)`.
pub fn tree_gme_condition(d: u32, p: f64, edges: usize) -> bool {
    let df = f64::from(d);
    let q = 1.0 - p;
    let nu = (df - 1.0) * q / (df - (df - 1.0) * q);
    (1.0 - nu / df).powi(edges as i32) > (df + 1.0) / (2.0 * df)
}

/// Visibility below which the IPEN state on a tree is not GME:
/// `γ0 = ((2d/(d+1))^(1/N) - 1)/(d - 1)`.
pub fn critical_visibility_tree(d: u32, edges: usize) -> f64 {
    assert!(edges >= 1 && d >= 2);
    let df = f64::from(d);
    let gamma0 = ((2.0 * df / (df + 1.0)).powf(1.0 / edges as f64) - 1.0) / (df - 1.0);
    visibility_of_gamma(d, gamma0)
}

/// `Tr(W_B(G) ρ) = (Σ_{K≠∅} [γ(d+1)]^{|K|} - 1) / (1 + (d²-1)γ)^N` from the
/// histogram of nonempty cut sizes.
pub fn bg_expectation_from_histogram(histogram: &[u64], d: u32, p: f64) -> f64 {
    check_visibility(p);
    let gamma = gamma_of(d, p);
    let edges = histogram.len().saturating_sub(1) as u32;
    let denom = pow_nonneg(1.0 + f64::from(d * d - 1) * gamma, edges);
    (cut_power_sum(histogram, gamma * f64::from(d + 1)) - 1.0) / denom
}

fn cut_power_sum(histogram: &[u64], x: f64) -> f64 {
    let mut sum = KahanSum::new();
    for (k, &count) in histogram.iter().enumerate().skip(1) {
        if count > 0 {
            sum.add(count as f64 * pow_nonneg(x, k as u32));
        }
    }
    sum.value()
}

/// Smallest visibility detected by `W_B(G)`: the root of
/// `Σ_k hist(k) [γ(d+1)]^k = 1`.
pub fn critical_visibility_bg_from_histogram(histogram: &[u64], d: u32) -> f64 {
    let df = f64::from(d);
    let f = |p: f64| cut_power_sum(histogram, gamma_of(d, p) * (df + 1.0)) - 1.0;
    // At p = 1/(d+1) every cut term equals 1, and at p = 1 they all vanish.
    bisect(f, 1.0 / (df + 1.0), 1.0).unwrap_or(1.0)
}

pub fn critical_visibility_bg(net: &Network, d: u32, caps: &Caps) -> Result<f64> {
    Ok(critical_visibility_bg_from_histogram(
        &cut_size_histogram(net, caps)?,
        d,
    ))
}

/// `Tr(W^Δ ρ)` on the triangle IPEN state, written with `γ`:
/// `(d²-1)/2 (3(d²-1)γ² + 3γ - 1) / (1 + (d²-1)γ)^3`.
pub fn triangle_expectation_ipen(d: u32, p: f64) -> f64 {
    check_visibility(p);
    let g = gamma_of(d, p);
    let big = f64::from(d * d - 1);
    big / 2.0 * (3.0 * big * g * g + 3.0 * g - 1.0) / (1.0 + big * g).powi(3)
}

/// `γ0 = (√(3(4d²-1)) - 3) / (6(d²-1))`.
pub fn triangle_gamma0(d: u32) -> f64 {
    let df = f64::from(d);
    ((3.0 * (4.0 * df * df - 1.0)).sqrt() - 3.0) / (6.0 * (df * df - 1.0))
}

pub fn critical_visibility_triangle(d: u32) -> f64 {
    visibility_of_gamma(d, triangle_gamma0(d))
}

/// Largest overlap of `⊗Φ` with a biseparable pure state, `d^(-λ)` for
/// minimum cut size `λ`.
pub fn fidelity_alpha(d: u32, min_cut: usize) -> f64 {
    f64::from(d).powi(-(min_cut as i32))
}

/// Visibility at which `α I - ⊗Φ` stops detecting the IPEN state:
/// `F^N = α` with `F = (1 + (d²-1)p)/d²`.
pub fn fidelity_threshold_from_min_cut(d: u32, edges: usize, min_cut: usize) -> f64 {
    let alpha = fidelity_alpha(d, min_cut);
    visibility_of_fidelity(d, alpha.powf(1.0 / edges as f64))
}

pub fn fidelity_witness_threshold(net: &Network, d: u32, caps: &Caps) -> Result<f64> {
    let min_cut = crate::graph::min_cut_size(net, caps)?;
    Ok(fidelity_threshold_from_min_cut(d, net.edge_count(), min_cut))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_thresholds() {
        assert!((critical_visibility_tree(2, 1) - 1.0 / 3.0).abs() < 1e-12);
        assert!((critical_visibility_tree(2, 2) - 3f64.sqrt().recip()).abs() < 1e-12);
        for d in 2..5 {
            for n in 1..10 {
                let p0 = critical_visibility_tree(d, n);
                assert!(e_ssw_expectation_ipen(d, p0, n).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn single_edge_negativity() {
        assert!((tree_negativity(2, 2.0 / 3.0, 1) - 0.25).abs() < 1e-15);
        assert_eq!(tree_negativity(2, 0.2, 1), 0.0);
        assert!((tree_negativity(3, 1.0, 4) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bg_single_edge_and_triangle() {
        assert!((critical_visibility_bg_from_histogram(&[0, 1], 2) - 1.0 / 3.0).abs() < 1e-9);
        let g = 1.0 / (3.0 * 3f64.sqrt());
        let want = (1.0 - g) / (1.0 + 3.0 * g);
        let got = critical_visibility_bg_from_histogram(&[0, 0, 3, 0], 2);
        assert!((got - want).abs() < 1e-9);
        assert!((got - 0.51197).abs() < 1e-5);
    }

    #[test]
    fn triangle_threshold() {
        let p = critical_visibility_triangle(2);
        assert!((triangle_gamma0(2) - 0.20601).abs() < 1e-5);
        assert!((p - 0.49071).abs() < 1e-5);
        assert!(triangle_expectation_ipen(2, p).abs() < 1e-12);
        assert!((triangle_expectation_ipen(2, 1.0) + 1.5).abs() < 1e-14);
    }

    #[test]
    fn fidelity_baseline() {
        assert!((fidelity_threshold_from_min_cut(2, 1, 1) - 1.0 / 3.0).abs() < 1e-14);
        let want = (4.0 * 0.5f64.sqrt() - 1.0) / 3.0;
        assert!((fidelity_threshold_from_min_cut(2, 2, 1) - want).abs() < 1e-14);
    }

    #[test]
    fn gme_condition_boundary() {
        for n in 1..6 {
            let p0 = critical_visibility_tree(2, n);
            assert!(tree_gme_condition(2, (p0 + 1e-6).min(1.0), n));
            assert!(!tree_gme_condition(2, p0 - 1e-6, n));
        }
    }
}
