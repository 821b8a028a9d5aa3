//! Small numerical helpers shared across modules.

/// Compensated (Kahan–Babuška/Neumaier) accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &KahanSum) {
        self.add(other.sum);
        self.add(other.compensation);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl std::iter::FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

pub fn kahan_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<KahanSum>().value()
}

pub const BISECTION_TOL: f64 = 1e-10;
pub const BISECTION_MAX_ITER: usize = 200;

/// Bisection for a sign change of `f` on `[lo, hi]`.
///
/// Returns `None` when `f(lo)` and `f(hi)` have the same strict sign.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> Option<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Some(lo);
    }
    if f_hi == 0.0 {
        return Some(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return None;
    }
    for _ in 0..BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Some(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        if hi - lo < BISECTION_TOL {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

/// `base^k` for a non-negative base, switching to log space for large `k`.
pub fn pow_nonneg(base: f64, k: u32) -> f64 {
    if k <= 64 {
        base.powi(k as i32)
    } else if base == 0.0 {
        0.0
    } else {
        (f64::from(k) * base.ln()).exp()
    }
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_recovers_small_terms() {
        let mut values = vec![1.0];
        values.extend(std::iter::repeat_n(1e-16, 10_000));
        let naive: f64 = values.iter().sum();
        let compensated = kahan_sum(values.iter().copied());
        assert_eq!(naive, 1.0);
        assert!((compensated - (1.0 + 1e-12)).abs() < 1e-20);
    }

    #[test]
    fn bisect_finds_sqrt_two() {
        let root = bisect(|x| x * x - 2.0, 0.0, 2.0).unwrap();
        assert!((root - 2f64.sqrt()).abs() < 1e-10);
        assert!(bisect(|x| x * x + 1.0, 0.0, 1.0).is_none());
    }

    #[test]
    fn log_space_power_matches_powi() {
        let a = pow_nonneg(0.97, 100);
        let b = 0.97f64.powi(100);
        assert!((a - b).abs() / b < 1e-12);
        assert_eq!(pow_nonneg(0.0, 100), 0.0);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(16, 8), 12870.0);
        assert_eq!(binomial(3, 4), 0.0);
    }
}
