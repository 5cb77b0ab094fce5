//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.

use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Relative off-diagonal Frobenius norm at which a sweep sequence stops.
const OFF_DIAG_TOL: f64 = 1e-13;
/// Hermiticity tolerance of the public entry point (absolute, scaled by `max(1, |m|_max)`).
const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Sorted in descending order.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector of `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEig {
    /// `V f(diag(lambda)) V^H`
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            if fl[k] == 0.0 {
                continue;
            }
            for i in 0..n {
                let a = v[(i, k)] * fl[k];
                for j in 0..n {
                    out[(i, j)] += a * v[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply(|l| l)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }
}

/// Eigendecomposition of a Hermitian matrix.
pub fn herm_eig(m: &ComplexMatrix) -> Result<HermitianEig> {
    m.ensure_square("herm_eig input")?;
    m.ensure_finite()?;
    let err = m.hermiticity_error();
    if err > HERMITIAN_TOL * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian(err));
    }
    jacobi(m.hermitian_part())
}

/// Same as [`herm_eig`] for matrices that are Hermitian up to roundoff by
/// construction; the input is symmetrized instead of checked.
pub(crate) fn herm_eig_trusted(m: &ComplexMatrix) -> Result<HermitianEig> {
    m.ensure_finite()?;
    jacobi(m.hermitian_part())
}

fn jacobi(mut a: ComplexMatrix) -> Result<HermitianEig> {
    let n = a.rows();
    let mut v = ComplexMatrix::identity(n);
    let total = a.frobenius_norm();
    let max_rotations = 100 * n * n;
    let mut rotations = 0usize;

    loop {
        let off = off_diagonal_norm(&a);
        if off <= OFF_DIAG_TOL * total || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let beta = a[(p, q)];
                let bn = beta.norm();
                if bn <= f64::MIN_POSITIVE || bn <= 1e-18 * total {
                    a[(p, q)] = C64::new(0.0, 0.0);
                    a[(q, p)] = C64::new(0.0, 0.0);
                    continue;
                }
                rotate(&mut a, &mut v, p, q, beta, bn);
                rotations += 1;
            }
        }
        if rotations > max_rotations {
            return Err(Error::NoConvergence(format!(
                "Jacobi eigensolver exceeded {max_rotations} rotations"
            )));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]));
    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One rotation annihilating `a[p][q]`: `a <- G^H a G`, `v <- v G`, where
/// `G = diag(1, e^{-i phi}) R(theta)` on the `(p, q)` plane.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, beta: C64, bn: f64) {
    let n = a.rows();
    let alpha = a[(p, p)].re;
    let gamma = a[(q, q)].re;
    let phase = (beta / bn).conj();
    let theta = (gamma - alpha) / (2.0 * bn);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let g_pp = C64::new(c, 0.0);
    let g_pq = C64::new(s, 0.0);
    let g_qp = phase * (-s);
    let g_qq = phase * c;

    for k in 0..n {
        let x = a[(k, p)];
        let y = a[(k, q)];
        a[(k, p)] = x * g_pp + y * g_qp;
        a[(k, q)] = x * g_pq + y * g_qq;
    }
    for k in 0..n {
        let x = a[(p, k)];
        let y = a[(q, k)];
        a[(p, k)] = g_pp.conj() * x + g_qp.conj() * y;
        a[(q, k)] = g_pq.conj() * x + g_qq.conj() * y;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(alpha - t * bn, 0.0);
    a[(q, q)] = C64::new(gamma + t * bn, 0.0);

    for k in 0..n {
        let x = v[(k, p)];
        let y = v[(k, q)];
        v[(k, p)] = x * g_pp + y * g_qp;
        v[(k, q)] = x * g_pq + y * g_qq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::testing::random_hermitian;

    #[test]
    fn identity_spectrum() {
        let e = herm_eig(&ComplexMatrix::identity(3)).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn pauli_x_spectrum() {
        let x = ComplexMatrix::from_fn(2, 2, |i, j| C64::new((i != j) as u8 as f64, 0.0));
        let e = herm_eig(&x).unwrap();
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-15);
        assert!((e.eigenvalues[1] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn pauli_y_spectrum() {
        let y = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => C64::new(0.0, -1.0),
            (1, 0) => C64::new(0.0, 1.0),
            _ => C64::new(0.0, 0.0),
        });
        let e = herm_eig(&y).unwrap();
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-15);
        assert!(e.reconstruct().max_abs_diff(&y) < 1e-15);
    }

    #[test]
    fn seeded_reconstruction_and_orthonormality() {
        for seed in 0..100u64 {
            let n = 1 + (seed as usize % 16);
            let m = random_hermitian(n, seed);
            let e = herm_eig(&m).unwrap();
            let rel = (&e.reconstruct() - &m).frobenius_norm() / m.frobenius_norm().max(1e-300);
            assert!(rel < 1e-10, "n={n} rel={rel}");
            assert!(e.eigenvectors.unitarity_error() < 1e-10);
            assert!(e.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_fn(2, 2, |i, j| C64::new((i + 2 * j) as f64, 0.0));
        assert!(matches!(herm_eig(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn rejects_non_finite() {
        let mut m = ComplexMatrix::identity(2);
        m[(0, 0)] = C64::new(f64::INFINITY, 0.0);
        assert!(matches!(herm_eig(&m), Err(Error::NonFinite)));
    }

    #[test]
    fn zero_matrix() {
        let e = herm_eig(&ComplexMatrix::zeros(4, 4)).unwrap();
        assert!(e.eigenvalues.iter().all(|&l| l == 0.0));
    }
}
