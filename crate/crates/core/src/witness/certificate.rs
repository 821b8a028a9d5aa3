use serde::Serialize;

use super::Witness;
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::graph::{cut_space, EdgeSubset, Network};

/// Coefficients `q_T(K)` of `Q_K^{Γ_K}` in the projector basis, for one cut.
///
/// A witness is certified on `K` when `q_T(K) ≤ w_T` for every `T` and the
/// partially transposed back operator `Q_K` satisfies `0 ⪯ Q_K ⪯ I`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CutCertificate {
    pub cut: EdgeSubset,
    pub q: Witness,
}

fn cuts_of(net: &Network, caps: &Caps) -> Result<Vec<EdgeSubset>> {
    caps.check_bits("witness coefficient bits (edges)", net.edge_count())?;
    let space = cut_space(net, caps, true)?;
    Ok(space.nonempty_cuts().cloned().collect())
}

/// Per-cut certificates for the E-SSW:
/// `Q_K^Γ = 1/(2|K|) Σ_{e∈K} (I - dΦ)_e ⊗ ⊗_{K∖e} (I + dΦ)/(d+1) ⊗ Φ_{E∖K}`.
pub fn e_ssw_certificates(net: &Network, d: u32, caps: &Caps) -> Result<Vec<CutCertificate>> {
    let edges = net.edge_count();
    let df = f64::from(d);
    let mut out = Vec::new();
    for cut in cuts_of(net, caps)? {
        let mut q = Witness::zeros(d, edges);
        let scale = 1.0 / (2.0 * cut.count() as f64);
        for e in cut.indices() {
            let factors: Vec<(f64, f64)> = (0..edges)
                .map(|i| {
                    if i == e {
                        (1.0 - df, 1.0)
                    } else if cut.contains(i) {
                        (1.0, 1.0 / (df + 1.0))
                    } else {
                        (1.0, 0.0)
                    }
                })
                .collect();
            q.add_scaled(&Witness::product(d, &factors), scale);
        }
        out.push(CutCertificate { cut, q });
    }
    Ok(out)
}

/// Per-cut certificates for `W_B(G)`: the `-⊗Φ` term plus the single cut term
/// belonging to `K`.
pub fn bg_ssw_certificates(net: &Network, d: u32, caps: &Caps) -> Result<Vec<CutCertificate>> {
    let edges = net.edge_count();
    let full = (1usize << edges) - 1;
    let inv = 1.0 / f64::from(d - 1);
    Ok(cuts_of(net, caps)?
        .into_iter()
        .map(|cut| {
            let mut q = Witness::zeros(d, edges);
            q.set_coeff(full, -1.0);
            let k = cut.mask().expect("witness edges fit a mask") as usize;
            q.set_coeff(full & !k, inv.powi(cut.count() as i32));
            CutCertificate { cut, q }
        })
        .collect())
}

/// Certificates for the triangle witness: `q_E = -(d²-1)/2` and `q_T = 1/2`
/// for `E∖K ⊆ T ⊊ E`.
pub fn triangle_certificates(net: &Network, d: u32, caps: &Caps) -> Result<Vec<CutCertificate>> {
    if !super::is_triangle(net) {
        return Err(Error::InvalidArgs(
            "the triangle witness needs the 3-vertex ring".into(),
        ));
    }
    Ok(cuts_of(net, caps)?
        .into_iter()
        .map(|cut| {
            let k = cut.mask().expect("triangle edges fit a mask") as usize;
            let outside = 7 & !k;
            let mut q = Witness::zeros(d, 3);
            for t in 0..7usize {
                if t & outside == outside {
                    q.set_coeff(t, 0.5);
                }
            }
            q.set_coeff(7, -f64::from(d * d - 1) / 2.0);
            CutCertificate { cut, q }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witness::{bg_ssw, e_ssw, triangle_ssw};

    fn dominated(w: &Witness, certs: &[CutCertificate]) -> bool {
        certs.iter().all(|c| {
            c.q.coeffs()
                .iter()
                .zip(w.coeffs())
                .all(|(q, w)| *q <= *w + 1e-12)
        })
    }

    #[test]
    fn certificates_are_dominated_by_their_witness() {
        let caps = Caps::default();
        for d in 2..5 {
            for net in [Network::path(3), Network::star(3), Network::ring(4)] {
                let w = e_ssw(net.edge_count(), d, &caps).unwrap();
                assert!(dominated(&w, &e_ssw_certificates(&net, d, &caps).unwrap()));
                let w = bg_ssw(&net, d, &caps).unwrap();
                assert!(dominated(&w, &bg_ssw_certificates(&net, d, &caps).unwrap()));
            }
            let tri = Network::ring(3);
            let w = triangle_ssw(d).unwrap();
            assert!(dominated(&w, &triangle_certificates(&tri, d, &caps).unwrap()));
        }
    }

    #[test]
    fn e_ssw_certificate_full_coefficient() {
        let certs = e_ssw_certificates(&Network::path(2), 2, &Caps::default()).unwrap();
        assert_eq!(certs.len(), 3);
        for c in &certs {
            assert!((c.q.coeff(3) + 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn triangle_certificates_reject_other_graphs() {
        assert!(triangle_certificates(&Network::path(3), 2, &Caps::default()).is_err());
    }
}
