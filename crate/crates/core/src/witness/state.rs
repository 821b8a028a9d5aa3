use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// White-noise edge model `p Φ + (1 - p) I / d²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IsotropicParams {
    pub d: u32,
    pub visibility: f64,
}

impl IsotropicParams {
    pub fn new(d: u32, visibility: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidState(format!("local dimension {d} < 2")));
        }
        if !(0.0..=1.0).contains(&visibility) {
            return Err(Error::InvalidState(format!(
                "visibility {visibility} outside [0, 1]"
            )));
        }
        Ok(Self { d, visibility })
    }

    /// Noise ratio `γ = (1-p) / (1 + (d²-1) p)`, so the edge state is
    /// proportional to `Φ + γ (I - Φ)`.
    pub fn gamma(&self) -> f64 {
        gamma_of(self.d, self.visibility)
    }

    pub fn nu(&self) -> f64 {
        let d = f64::from(self.d);
        let q = 1.0 - self.visibility;
        (d - 1.0) * q / (d - (d - 1.0) * q)
    }

    /// `Tr(ρ_e Φ) = p + (1 - p)/d²`.
    pub fn fidelity(&self) -> f64 {
        let d2 = f64::from(self.d * self.d);
        self.visibility + (1.0 - self.visibility) / d2
    }
}

/// The map `p ↦ (1-p)/(1+(d²-1)p)`. It is an involution on `[0, 1]`, so it
/// also converts `γ` back to a visibility.
pub fn gamma_of(d: u32, x: f64) -> f64 {
    let d2m1 = f64::from(d * d - 1);
    (1.0 - x) / (1.0 + d2m1 * x)
}

pub fn visibility_of_gamma(d: u32, gamma: f64) -> f64 {
    gamma_of(d, gamma)
}

/// Visibility with the given edge fidelity.
pub fn visibility_of_fidelity(d: u32, fidelity: f64) -> f64 {
    let d2 = f64::from(d * d);
    (d2 * fidelity - 1.0) / (d2 - 1.0)
}

#[derive(Clone, Debug, PartialEq)]
enum Distribution {
    /// Product of edge states with these fidelities.
    Product(Vec<f64>),
    /// `p_T = Tr(ρ P_T)` given directly, indexed by the Φ-edge mask `T`.
    Raw(Vec<f64>),
}

/// A network state, reduced to what SSW expectations depend on.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkState {
    d: u32,
    edges: usize,
    dist: Distribution,
}

impl NetworkState {
    pub fn isotropic(d: u32, edges: usize, visibility: f64) -> Result<Self> {
        let params = IsotropicParams::new(d, visibility)?;
        Self::from_fidelities(d, vec![params.fidelity(); edges])
    }

    /// Independent edges with possibly different visibilities.
    pub fn from_visibilities(d: u32, visibilities: &[f64]) -> Result<Self> {
        let fids = visibilities
            .iter()
            .map(|&p| IsotropicParams::new(d, p).map(|i| i.fidelity()))
            .collect::<Result<Vec<_>>>()?;
        Self::from_fidelities(d, fids)
    }

    pub fn from_fidelities(d: u32, fidelities: Vec<f64>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidState(format!("local dimension {d} < 2")));
        }
        if let Some(bad) = fidelities.iter().find(|f| !(0.0..=1.0).contains(*f)) {
            return Err(Error::InvalidState(format!("fidelity {bad} outside [0, 1]")));
        }
        Ok(Self {
            d,
            edges: fidelities.len(),
            dist: Distribution::Product(fidelities),
        })
    }

    pub fn from_p_vector(d: u32, p: Vec<f64>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidState(format!("local dimension {d} < 2")));
        }
        if !p.len().is_power_of_two() {
            return Err(Error::InvalidState(format!(
                "p-vector length {} is not a power of two",
                p.len()
            )));
        }
        if p.iter().any(|&x| !(x >= -1e-12)) {
            return Err(Error::InvalidState("p-vector has negative entries".into()));
        }
        let total = crate::numeric::kahan_sum(p.iter().copied());
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidState(format!("p-vector sums to {total}")));
        }
        Ok(Self {
            d,
            edges: p.len().trailing_zeros() as usize,
            dist: Distribution::Raw(p),
        })
    }

    pub fn local_dim(&self) -> u32 {
        self.d
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn is_product(&self) -> bool {
        matches!(self.dist, Distribution::Product(_))
    }

    /// Per-edge fidelities for product states.
    pub fn fidelities(&self) -> Option<&[f64]> {
        match &self.dist {
            Distribution::Product(f) => Some(f),
            Distribution::Raw(_) => None,
        }
    }

    /// `p_T` for every `T ⊆ E`, with bit `e` of the index set iff edge `e`
    /// is projected on Φ.
    pub fn p_vector(&self) -> Vec<f64> {
        match &self.dist {
            Distribution::Raw(p) => p.clone(),
            Distribution::Product(fids) => {
                let mut p = vec![0.0; 1 << fids.len()];
                p[0] = 1.0;
                for (e, &f) in fids.iter().enumerate() {
                    let half = 1usize << e;
                    for t in 0..half {
                        let base = p[t];
                        p[t] = base * (1.0 - f);
                        p[t | half] = base * f;
                    }
                }
                p
            }
        }
    }
}

/// JSON state description: `{"d": 2, "p": 0.8}`, `{"d": 2, "fidelities": [...]}`
/// or `{"d": 2, "p_vector": [...]}`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub d: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fidelities: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_vector: Option<Vec<f64>>,
}

impl StateSpec {
    pub fn into_state(self, edges: usize) -> Result<NetworkState> {
        let state = match (self.p, self.fidelities, self.p_vector) {
            (Some(p), None, None) => NetworkState::isotropic(self.d, edges, p)?,
            (None, Some(f), None) => NetworkState::from_fidelities(self.d, f)?,
            (None, None, Some(v)) => NetworkState::from_p_vector(self.d, v)?,
            _ => {
                return Err(Error::InvalidState(
                    "state needs exactly one of \"p\", \"fidelities\", \"p_vector\"".into(),
                ))
            }
        };
        if state.edge_count() != edges {
            return Err(Error::DimensionMismatch(format!(
                "state describes {} edges, network has {edges}",
                state.edge_count()
            )));
        }
        Ok(state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_endpoints_and_monotonicity() {
        for d in 2..6 {
            assert_eq!(gamma_of(d, 1.0), 0.0);
            assert_eq!(gamma_of(d, 0.0), 1.0);
            let mut prev = f64::INFINITY;
            for i in 0..=100 {
                let g = gamma_of(d, f64::from(i) / 100.0);
                assert!(g < prev);
                prev = g;
                assert!((visibility_of_gamma(d, g) - f64::from(i) / 100.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn gamma_at_entanglement_threshold() {
        // p = 1/(d+1) is where γ(d+1) = 1.
        for d in 2..6 {
            let p = 1.0 / f64::from(d + 1);
            assert!((gamma_of(d, p) * f64::from(d + 1) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn fidelity_matches_gamma_form() {
        let iso = IsotropicParams::new(3, 0.4).unwrap();
        let g = iso.gamma();
        assert!((iso.fidelity() - 1.0 / (1.0 + 8.0 * g)).abs() < 1e-15);
        assert!((visibility_of_fidelity(3, iso.fidelity()) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn product_p_vector_sums_to_one() {
        let s = NetworkState::from_fidelities(2, vec![0.9, 0.5, 0.3]).unwrap();
        let p = s.p_vector();
        assert_eq!(p.len(), 8);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!((p[0b101] - 0.9 * 0.5 * 0.3).abs() < 1e-15);
    }

    #[test]
    fn state_spec_validation() {
        let spec: StateSpec = serde_json::from_str(r#"{"d": 2, "p": 0.8}"#).unwrap();
        assert_eq!(spec.into_state(3).unwrap().edge_count(), 3);
        let spec: StateSpec = serde_json::from_str(r#"{"d": 2, "fidelities": [0.9]}"#).unwrap();
        assert!(spec.into_state(2).is_err());
        let spec: StateSpec = serde_json::from_str(r#"{"d": 2}"#).unwrap();
        assert!(spec.into_state(2).is_err());
        assert!(NetworkState::from_p_vector(2, vec![0.5, 0.6]).is_err());
        assert!(NetworkState::isotropic(2, 1, 1.5).is_err());
    }
}
