//! Local stabilizer measurements for fidelity and E-SSW estimation.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::KahanSum;
use crate::oracle::CMatrix;

/// Shots per independent RNG stream.
pub const CHUNK_SHOTS: u64 = 4096;
const SNAP_TOL: f64 = 1e-8;
const PROB_FLOOR: f64 = 1e-14;
pub const MAX_SAMPLING_DIM: u32 = 5;

/// Clock-and-shift `X^i Z^j` on one qudit, with `X|k⟩ = |k+1⟩` and
/// `Z|k⟩ = ω^k |k⟩`.
pub fn clock_shift(d: u32, i: u32, j: i64) -> CMatrix {
    let du = d as usize;
    let omega = 2.0 * std::f64::consts::PI / f64::from(d);
    CMatrix::from_fn(du, |r, c| {
        if r == (c + i as usize) % du {
            Complex64::from_polar(1.0, omega * (j * c as i64) as f64)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `M_{i,j} = X^i Z^j ⊗ X^i Z^{-j}`, which stabilizes `|φ⁺⟩`.
pub fn stabilizer(d: u32, i: u32, j: u32) -> CMatrix {
    clock_shift(d, i, i64::from(j)).kron(&clock_shift(d, i, -i64::from(j)))
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasurementSetting {
    pub i: u32,
    pub j: u32,
    /// Distinct eigenvalues of `M_{i,j} + M_{i,j}^†`, each `2cos(2πk/d)`.
    pub outcomes: Vec<f64>,
    /// Orthonormal eigenvectors grouped by outcome.
    #[serde(skip)]
    pub eigenspaces: Vec<Vec<Vec<Complex64>>>,
}

impl MeasurementSetting {
    /// Per-edge estimator value `1/d² + (d²-1)/(2d²) λ`.
    pub fn edge_value(d: u32, outcome: f64) -> f64 {
        let dd = f64::from(d * d);
        (2.0 + (dd - 1.0) * outcome) / (2.0 * dd)
    }

    /// Born probabilities of each outcome for a two-qudit state.
    pub fn probabilities(&self, rho: &CMatrix) -> Vec<f64> {
        let mut probs: Vec<f64> = self
            .eigenspaces
            .iter()
            .map(|space| {
                space
                    .iter()
                    .map(|v| {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for (r, vr) in v.iter().enumerate() {
                            for (c, vc) in v.iter().enumerate() {
                                acc += vr.conj() * rho[(r, c)] * vc;
                            }
                        }
                        acc.re
                    })
                    .sum::<f64>()
            })
            .map(|p| if p < PROB_FLOOR { 0.0 } else { p })
            .collect();
        let total: f64 = probs.iter().sum();
        for p in &mut probs {
            *p /= total;
        }
        probs
    }
}

/// The `d² - 1` settings `(i, j) ≠ (0, 0)` with numerically computed
/// eigenbases, eigenvalues snapped to `2cos(2πk/d)`.
pub fn stabilizer_settings(d: u32) -> Vec<MeasurementSetting> {
    let allowed: Vec<f64> = (0..d)
        .map(|k| 2.0 * (2.0 * std::f64::consts::PI * f64::from(k) / f64::from(d)).cos())
        .collect();
    let mut out = Vec::new();
    for i in 0..d {
        for j in 0..d {
            if i == 0 && j == 0 {
                continue;
            }
            let m = stabilizer(d, i, j);
            let h = &m + &m.adjoint();
            let (vals, vecs) = h.eigh();
            let mut outcomes: Vec<f64> = Vec::new();
            let mut spaces: Vec<Vec<Vec<Complex64>>> = Vec::new();
            for (col, &v) in vals.iter().enumerate() {
                let snapped = allowed
                    .iter()
                    .copied()
                    .find(|a| (a - v).abs() <= SNAP_TOL)
                    .unwrap_or(v);
                let vector: Vec<Complex64> = (0..h.dim()).map(|r| vecs[(r, col)]).collect();
                match outcomes.iter().position(|&o| o == snapped) {
                    Some(k) => spaces[k].push(vector),
                    None => {
                        outcomes.push(snapped);
                        spaces.push(vec![vector]);
                    }
                }
            }
            out.push(MeasurementSetting {
                i,
                j,
                outcomes,
                eigenspaces: spaces,
            });
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimationResult {
    pub estimate: f64,
    pub shots: u64,
    pub seed: u64,
    /// Sample variance of the single-shot values.
    pub variance: f64,
    pub epsilon: f64,
    /// Probability bound attached to `epsilon`.
    pub hoeffding_bound: f64,
}

/// `exp(-m ε² / (8 (1 + 1/d)²))`: probability that the E-SSW estimate falls
/// `ε` below its mean.
pub fn hoeffding_bound(shots: u64, epsilon: f64, d: u32) -> f64 {
    let k = 1.0 + 1.0 / f64::from(d);
    (-(shots as f64) * epsilon * epsilon / (8.0 * k * k)).exp()
}

/// Outcome sampler for one edge: uniform setting, then a Born-rule outcome.
struct EdgeSampler {
    /// Per setting: cumulative probabilities and per-edge values.
    tables: Vec<(Vec<f64>, Vec<f64>)>,
}

impl EdgeSampler {
    fn new(d: u32, settings: &[MeasurementSetting], rho: &CMatrix) -> Self {
        let tables = settings
            .iter()
            .map(|s| {
                let mut acc = 0.0;
                let cumulative = s
                    .probabilities(rho)
                    .into_iter()
                    .map(|p| {
                        acc += p;
                        acc
                    })
                    .collect();
                let values = s.outcomes.iter().map(|&o| MeasurementSetting::edge_value(d, o)).collect();
                (cumulative, values)
            })
            .collect();
        Self { tables }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        let (cumulative, values) = &self.tables[rng.gen_range(0..self.tables.len())];
        let r: f64 = rng.gen();
        let k = cumulative.iter().position(|&c| r < c).unwrap_or_else(|| {
            // Round-off can leave the last cumulative entry just below 1.
            cumulative.iter().rposition(|&c| c > 0.0).unwrap_or(0)
        });
        values[k]
    }
}

fn check_edge_state(d: u32, rho: &CMatrix) -> Result<()> {
    if !(2..=MAX_SAMPLING_DIM).contains(&d) {
        return Err(Error::InvalidState(format!(
            "sampling supports 2 ≤ d ≤ {MAX_SAMPLING_DIM}, got {d}"
        )));
    }
    if rho.dim() != (d * d) as usize {
        return Err(Error::InvalidState(format!(
            "edge state has size {}, expected {}",
            rho.dim(),
            d * d
        )));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 || rho.hermiticity_error() > 1e-10 {
        return Err(Error::InvalidState("edge state is not a unit-trace Hermitian matrix".into()));
    }
    if rho.min_eigenvalue() < -1e-10 {
        return Err(Error::InvalidState("edge state is not positive semidefinite".into()));
    }
    Ok(())
}

/// Runs `shots` single-shot evaluations in fixed-size chunks, each chunk on
/// its own ChaCha8 stream, and merges the chunk sums in order.
fn run_shots<F>(shots: u64, seed: u64, shot: F) -> (f64, f64)
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let chunks = shots.div_ceil(CHUNK_SHOTS);
    let partial: Vec<(KahanSum, KahanSum)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let count = CHUNK_SHOTS.min(shots - c * CHUNK_SHOTS);
            let mut sum = KahanSum::new();
            let mut sq = KahanSum::new();
            for _ in 0..count {
                let v = shot(&mut rng);
                sum.add(v);
                sq.add(v * v);
            }
            (sum, sq)
        })
        .collect();
    let mut sum = KahanSum::new();
    let mut sq = KahanSum::new();
    for (s, q) in &partial {
        sum.merge(s);
        sq.merge(q);
    }
    let m = shots as f64;
    let mean = sum.value() / m;
    let var = if shots > 1 {
        ((sq.value() - m * mean * mean) / (m - 1.0)).max(0.0)
    } else {
        0.0
    };
    (mean, var)
}

/// Estimates `Tr(Φ ρ)` of a two-qudit state.
///
/// The attached bound is two-sided Hoeffding at 95%: per-shot values lie in
/// `[-1 + 2/d², 1]`.
pub fn simulate_fidelity(d: u32, rho: &CMatrix, shots: u64, seed: u64) -> Result<EstimationResult> {
    check_edge_state(d, rho)?;
    if shots == 0 {
        return Err(Error::InvalidArgs("shots must be positive".into()));
    }
    let sampler = EdgeSampler::new(d, &stabilizer_settings(d), rho);
    let (estimate, variance) = run_shots(shots, seed, |rng| sampler.sample(rng));
    let width = 2.0 - 2.0 / f64::from(d * d);
    let confidence: f64 = 0.05;
    let epsilon = width * ((2.0 / confidence).ln() / (2.0 * shots as f64)).sqrt();
    Ok(EstimationResult {
        estimate,
        shots,
        seed,
        variance,
        epsilon,
        hoeffding_bound: confidence,
    })
}

/// Single-shot value of the rescaled E-SSW
/// `-2d/(d-1) ∏ m_i + (d+1)/(d-1) ∏ (1 + d m_i)/(d+1)`.
pub fn witness_shot_value(d: u32, edge_values: impl IntoIterator<Item = f64>) -> f64 {
    let df = f64::from(d);
    let (mut a, mut b) = (1.0, 1.0);
    for m in edge_values {
        a *= m;
        b *= (1.0 + df * m) / (df + 1.0);
    }
    ((df + 1.0) * b - 2.0 * df * a) / (df - 1.0)
}

/// Estimates `Tr(W̃_E ρ) = 2 Tr(W_E ρ)/(d-1)` for a product state. When the
/// estimate is negative the bound uses `ε = |estimate|`.
pub fn simulate_witness_estimate(
    d: u32,
    edge_states: &[CMatrix],
    shots: u64,
    seed: u64,
) -> Result<EstimationResult> {
    if edge_states.is_empty() || edge_states.len() > 64 {
        return Err(Error::InvalidState(format!(
            "need 1 to 64 edges, got {}",
            edge_states.len()
        )));
    }
    if shots == 0 {
        return Err(Error::InvalidArgs("shots must be positive".into()));
    }
    for rho in edge_states {
        check_edge_state(d, rho)?;
    }
    let settings = stabilizer_settings(d);
    let samplers: Vec<EdgeSampler> = edge_states
        .iter()
        .map(|rho| EdgeSampler::new(d, &settings, rho))
        .collect();
    let (estimate, variance) = run_shots(shots, seed, |rng| {
        witness_shot_value(d, samplers.iter().map(|s| s.sample(rng)))
    });
    let epsilon = if estimate < 0.0 { -estimate } else { 0.0 };
    Ok(EstimationResult {
        estimate,
        shots,
        seed,
        variance,
        epsilon,
        hoeffding_bound: hoeffding_bound(shots, epsilon, d),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{isotropic_edge, phi};

    #[test]
    fn stabilizers_fix_phi() {
        for d in 2..5 {
            let p = phi(d);
            for s in 0..d * d {
                let m = stabilizer(d, s / d, s % d);
                assert!((&m * &p).max_abs_diff(&p) < 1e-12);
            }
        }
    }

    #[test]
    fn qubit_settings() {
        let settings = stabilizer_settings(2);
        assert_eq!(settings.len(), 3);
        for s in &settings {
            let mut o = s.outcomes.clone();
            o.sort_by(f64::total_cmp);
            assert_eq!(o, vec![-2.0, 2.0]);
        }
    }

    #[test]
    fn perfect_pair_is_deterministic() {
        for d in 2..4 {
            let r = simulate_fidelity(d, &phi(d), 1000, 3).unwrap();
            assert_eq!(r.estimate, 1.0);
            assert_eq!(r.variance, 0.0);
        }
    }

    #[test]
    fn seeded_runs_repeat_bit_for_bit() {
        let rho = isotropic_edge(3, 0.6);
        let a = simulate_fidelity(3, &rho, 10_000, 99).unwrap();
        let b = simulate_fidelity(3, &rho, 10_000, 99).unwrap();
        assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
        let c = simulate_fidelity(3, &rho, 10_000, 100).unwrap();
        assert_ne!(a.estimate, c.estimate);
    }

    #[test]
    fn rejects_bad_states() {
        assert!(simulate_fidelity(2, &CMatrix::identity(4), 10, 0).is_err());
        assert!(simulate_fidelity(6, &phi(6), 10, 0).is_err());
        assert!(simulate_fidelity(2, &phi(3), 10, 0).is_err());
    }
}
