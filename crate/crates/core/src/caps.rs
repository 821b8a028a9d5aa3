//! Size limits for exponential enumerations.

use crate::error::{Error, Result};

/// Environment variable that overrides [`Caps::enumeration_bits`].
pub const CAP_ENV_VAR: &str = "NETWIT_CAP_BITS";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Maximum exponent for any `2^k` enumeration: cut enumeration visits
    /// `2^(n-1)` vertex subsets and dense witnesses hold `2^N` coefficients.
    pub enumeration_bits: u32,
    /// Maximum `rows * columns` of a dense simplex tableau.
    pub lp_cells: u64,
    /// Maximum total Hilbert-space dimension of a dense operator.
    pub oracle_dim: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            enumeration_bits: 23,
            lp_cells: 1 << 28,
            oracle_dim: 4096,
        }
    }
}

impl Caps {
    /// Defaults, with `enumeration_bits` taken from `NETWIT_CAP_BITS` when set.
    pub fn from_env() -> Result<Self> {
        let mut caps = Self::default();
        if let Ok(raw) = std::env::var(CAP_ENV_VAR) {
            let bits: u32 = raw.trim().parse().map_err(|_| {
                Error::InvalidArgs(format!("{CAP_ENV_VAR} must be an integer, got {raw:?}"))
            })?;
            if bits > 40 {
                return Err(Error::InvalidArgs(format!(
                    "{CAP_ENV_VAR}={bits} is beyond the supported maximum of 40"
                )));
            }
            caps.enumeration_bits = bits;
        }
        Ok(caps)
    }

    pub(crate) fn check_bits(&self, what: &str, bits: usize) -> Result<()> {
        if bits as u64 > u64::from(self.enumeration_bits) {
            return Err(Error::CapExceeded {
                what: what.to_string(),
                requested: bits as u64,
                limit: u64::from(self.enumeration_bits),
            });
        }
        Ok(())
    }
}
