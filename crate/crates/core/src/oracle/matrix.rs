use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

pub const JACOBI_TOL: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_real(n: usize, values: &[f64]) -> Self {
        assert_eq!(values.len(), n * n);
        Self {
            n,
            data: values.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|x| x * factor).collect(),
        }
    }

    pub fn scale_complex(&self, factor: Complex64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|x| x * factor).collect(),
        }
    }

    pub fn add_scaled(&mut self, other: &CMatrix, factor: f64) {
        assert_eq!(self.n, other.n);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * factor;
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn kron(&self, other: &CMatrix) -> Self {
        let m = other.n;
        Self::from_fn(self.n * m, |i, j| self[(i / m, j / m)] * other[(i % m, j % m)])
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.n, other.n);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn hermiticity_error(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigh_impl(false).0
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// Eigenvalues in ascending order with unit eigenvectors as the matching
    /// columns of the second result.
    pub fn eigh(&self) -> (Vec<f64>, CMatrix) {
        let (vals, vecs) = self.eigh_impl(true);
        (vals, vecs.expect("vectors requested"))
    }

    /// Cyclic Jacobi on the Hermitian part.
    fn eigh_impl(&self, want_vectors: bool) -> (Vec<f64>, Option<CMatrix>) {
        let n = self.n;
        let mut a = Self::from_fn(n, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5);
        let mut v = want_vectors.then(|| Self::identity(n));
        let scale = a.frobenius().max(1.0);
        for _ in 0..JACOBI_MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if off <= JACOBI_TOL * scale {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    let mag = apq.norm();
                    if mag <= f64::MIN_POSITIVE {
                        continue;
                    }
                    let phase = apq / mag;
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    let theta = (aqq - app) / (2.0 * mag);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    // J = diag(1, conj(phase)) R with R = [[c, s], [-s, c]].
                    let jpp = Complex64::new(c, 0.0);
                    let jpq = Complex64::new(s, 0.0);
                    let jqp = phase.conj() * -s;
                    let jqq = phase.conj() * c;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = akp * jpp + akq * jqp;
                        a[(k, q)] = akp * jpq + akq * jqq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                    }
                    a[(p, q)] = Complex64::new(0.0, 0.0);
                    a[(q, p)] = Complex64::new(0.0, 0.0);
                    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
                    if let Some(v) = v.as_mut() {
                        for k in 0..n {
                            let vkp = v[(k, p)];
                            let vkq = v[(k, q)];
                            v[(k, p)] = vkp * jpp + vkq * jqp;
                            v[(k, q)] = vkp * jpq + vkq * jqq;
                        }
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&x, &y| a[(x, x)].re.total_cmp(&a[(y, y)].re));
        let values = order.iter().map(|&i| a[(i, i)].re).collect();
        let vectors = v.map(|v| Self::from_fn(n, |i, j| v[(i, order[j])]));
        (values, vectors)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        let mut out = self.clone();
        out.add_scaled(rhs, 1.0);
        out
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        let mut out = self.clone();
        out.add_scaled(rhs, -1.0);
        out
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pauli_y_eigen() {
        let y = CMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 1) => c(0.0, -1.0),
            (1, 0) => c(0.0, 1.0),
            _ => c(0.0, 0.0),
        });
        let (vals, vecs) = y.eigh();
        assert!((vals[0] + 1.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
        let recon = &(&vecs * &CMatrix::from_fn(2, |i, j| if i == j { c(vals[i], 0.0) } else { c(0.0, 0.0) }))
            * &vecs.adjoint();
        assert!(recon.max_abs_diff(&y) < 1e-13);
    }

    #[test]
    fn random_hermitian_reconstruction() {
        let mut seed = 7u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let n = 12;
        let raw = CMatrix::from_fn(n, |_, _| c(next(), next()));
        let h = &raw + &raw.adjoint();
        let (vals, vecs) = h.eigh();
        for w in vals.windows(2) {
            assert!(w[0] <= w[1]);
        }
        let diag = CMatrix::from_fn(n, |i, j| if i == j { c(vals[i], 0.0) } else { c(0.0, 0.0) });
        let recon = &(&vecs * &diag) * &vecs.adjoint();
        assert!(recon.max_abs_diff(&h) < 1e-11);
        let unit = &vecs.adjoint() * &vecs;
        assert!(unit.max_abs_diff(&CMatrix::identity(n)) < 1e-12);
        let tr: f64 = vals.iter().sum();
        assert!((tr - h.trace().re).abs() < 1e-11);
    }

    #[test]
    fn kron_and_trace() {
        let a = CMatrix::from_real(2, &[1.0, 2.0, 3.0, 4.0]);
        let b = CMatrix::identity(3);
        let k = a.kron(&b);
        assert_eq!(k.dim(), 6);
        assert_eq!(k.trace(), c(15.0, 0.0));
        assert_eq!(k[(3, 0)], c(3.0, 0.0));
    }
}
