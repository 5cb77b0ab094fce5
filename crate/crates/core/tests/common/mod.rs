//! Reference computations that avoid the library's eigensolver, used as
//! oracles by the integration tests.
#![allow(dead_code)]

use lufid::{ComplexMatrix, C64};

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Gauss-Jordan inverse with partial pivoting.
pub fn inverse(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.rows();
    let mut a = m.clone();
    let mut inv = ComplexMatrix::identity(n);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm()))
            .unwrap();
        for k in 0..n {
            let t = a[(col, k)];
            a[(col, k)] = a[(piv, k)];
            a[(piv, k)] = t;
            let t = inv[(col, k)];
            inv[(col, k)] = inv[(piv, k)];
            inv[(piv, k)] = t;
        }
        let p = a[(col, col)];
        assert!(p.norm() > 1e-300, "singular matrix");
        for k in 0..n {
            a[(col, k)] /= p;
            inv[(col, k)] /= p;
        }
        for r in 0..n {
            if r != col {
                let f = a[(r, col)];
                if f.norm() != 0.0 {
                    for k in 0..n {
                        let ak = a[(col, k)];
                        let ik = inv[(col, k)];
                        a[(r, k)] -= f * ak;
                        inv[(r, k)] -= f * ik;
                    }
                }
            }
        }
    }
    inv
}

/// Principal square root of a positive definite matrix by the
/// Denman-Beavers iteration.
pub fn db_sqrt(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.rows();
    let mut y = m.clone();
    let mut z = ComplexMatrix::identity(n);
    for _ in 0..100 {
        let yi = inverse(&y);
        let zi = inverse(&z);
        let y2 = (&y + &zi).scale(0.5);
        let z2 = (&z + &yi).scale(0.5);
        let done = y2.max_abs_diff(&y) < 1e-15 * y2.max_abs().max(1.0);
        y = y2;
        z = z2;
        if done {
            break;
        }
    }
    y.hermitian_part()
}

/// `Tr sqrt(sqrt(a) b sqrt(a))` for positive definite inputs.
pub fn fidelity_pd(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let sa = db_sqrt(a);
    let inner = sa.matmul(b).matmul(&sa).hermitian_part();
    db_sqrt(&inner).trace().re
}

/// Smallest eigenvalue of a Hermitian matrix by power iteration on a
/// Gershgorin-shifted operator.
pub fn min_eigenvalue(m: &ComplexMatrix) -> f64 {
    let n = m.rows();
    let radius = (0..n)
        .map(|i| (0..n).map(|j| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let shifted = &ComplexMatrix::identity(n).scale(radius) - m;
    let mut v: Vec<C64> = (0..n).map(|i| C64::new(1.0 + 0.1 * i as f64, 0.03 * i as f64)).collect();
    let mut rq = 0.0;
    for _ in 0..20_000 {
        let w = shifted.mul_vec(&v);
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return radius;
        }
        v = w.into_iter().map(|z| z / norm).collect();
        let next = m.sandwich(&v, &v).re;
        if (next - rq).abs() < 1e-16 {
            rq = next;
            break;
        }
        rq = next;
    }
    rq
}

/// Eigenvalues of a 2x2 or 3x3 Hermitian matrix from its characteristic
/// polynomial, descending.
pub fn small_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    match m.rows() {
        1 => vec![m[(0, 0)].re],
        2 => {
            let (a, d) = (m[(0, 0)].re, m[(1, 1)].re);
            let b = m[(0, 1)].norm();
            let mean = 0.5 * (a + d);
            let r = (0.25 * (a - d) * (a - d) + b * b).sqrt();
            vec![mean + r, mean - r]
        }
        3 => {
            let q = m.trace().re / 3.0;
            let shifted = m - &ComplexMatrix::identity(3).scale(q);
            let p2 = shifted.frobenius_norm().powi(2) / 6.0;
            let p = p2.sqrt();
            if p < 1e-300 {
                return vec![q; 3];
            }
            let b = shifted.scale(1.0 / p);
            let det = det3(&b).re / 2.0;
            let phi = det.clamp(-1.0, 1.0).acos() / 3.0;
            let two_pi_3 = 2.0 * std::f64::consts::PI / 3.0;
            let e1 = q + 2.0 * p * phi.cos();
            let e3 = q + 2.0 * p * (phi + two_pi_3).cos();
            vec![e1, 3.0 * q - e1 - e3, e3]
        }
        n => panic!("small_eigenvalues supports orders up to 3, got {n}"),
    }
}

fn det3(m: &ComplexMatrix) -> C64 {
    m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
        - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
        + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)])
}

/// Squared Schmidt coefficients of a ket on `C^d1 (x) C^d2`, `d1 <= 3`.
pub fn schmidt_squares(ket: &[C64], d1: usize, d2: usize) -> Vec<f64> {
    let a = ComplexMatrix::from_fn(d1, d2, |i, j| ket[i * d2 + j]);
    let g = a.matmul(&a.adjoint());
    small_eigenvalues(&g).into_iter().map(|x| x.max(0.0)).collect()
}

/// Transpose on the second factor by index swapping.
pub fn partial_transpose(m: &ComplexMatrix, d1: usize, d2: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d1 * d2, d1 * d2, |r, s| {
        let (i, k) = (r / d2, r % d2);
        let (j, l) = (s / d2, s % d2);
        m[(i * d2 + l, j * d2 + k)]
    })
}

/// `[[a b] [c d]]` determinant of the coefficient matrix of a two-qubit ket;
/// nonzero exactly when the Schmidt rank is two.
pub fn two_qubit_concurrence(ket: &[C64]) -> f64 {
    2.0 * (ket[0] * ket[3] - ket[1] * ket[2]).norm()
}
