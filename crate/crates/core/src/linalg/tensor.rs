//! Bipartite tensor operations.
//!
//! Basis convention: `|i>|j>` on `C^d1 (x) C^d2` has index `i * d2 + j`.

use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    ComplexMatrix::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

fn check_bipartite(m: &ComplexMatrix, d1: usize, d2: usize) -> Result<()> {
    let n = d1 * d2;
    if m.rows() != n || m.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "expected {n}x{n} for dims ({d1},{d2}), got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// Traces out `subsystem`.
pub fn partial_trace(m: &ComplexMatrix, d1: usize, d2: usize, subsystem: Subsystem) -> Result<ComplexMatrix> {
    check_bipartite(m, d1, d2)?;
    Ok(match subsystem {
        Subsystem::Second => ComplexMatrix::from_fn(d1, d1, |i, j| {
            (0..d2).map(|k| m[(i * d2 + k, j * d2 + k)]).sum()
        }),
        Subsystem::First => ComplexMatrix::from_fn(d2, d2, |k, l| {
            (0..d1).map(|i| m[(i * d2 + k, i * d2 + l)]).sum()
        }),
    })
}

/// Transpose on the second factor.
pub fn partial_transpose(m: &ComplexMatrix, d1: usize, d2: usize) -> Result<ComplexMatrix> {
    check_bipartite(m, d1, d2)?;
    Ok(ComplexMatrix::from_fn(d1 * d2, d1 * d2, |r, c| {
        let (i, k) = (r / d2, r % d2);
        let (j, l) = (c / d2, c % d2);
        m[(i * d2 + l, j * d2 + k)]
    }))
}

/// Row-major vectorization: `vec(|i><j|) = |i>|j>`, so that
/// `(U1 (x) U2) vec(B) = vec(U1 B U2^T)` for a `d1 x d2` matrix `B`.
pub fn vec(a: &ComplexMatrix) -> Vec<C64> {
    a.data().to_vec()
}

pub fn unvec(v: &[C64], d1: usize, d2: usize) -> Result<ComplexMatrix> {
    if v.len() != d1 * d2 {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} cannot be reshaped to {d1}x{d2}",
            v.len()
        )));
    }
    ComplexMatrix::new(d1, d2, v.to_vec())
}

/// `(U1 (x) U2) X` without forming the Kronecker product.
pub fn apply_local(u1: &ComplexMatrix, u2: &ComplexMatrix, x: &ComplexMatrix) -> ComplexMatrix {
    let (d1, d2) = (u1.rows(), u2.rows());
    let cols = x.cols();
    assert_eq!(x.rows(), d1 * d2);
    let mut tmp = ComplexMatrix::zeros(d1 * d2, cols);
    // apply U2 on the second index
    for i in 0..d1 {
        for k in 0..d2 {
            for l in 0..d2 {
                let u = u2[(k, l)];
                if u == ZERO {
                    continue;
                }
                for c in 0..cols {
                    tmp[(i * d2 + k, c)] += u * x[(i * d2 + l, c)];
                }
            }
        }
    }
    let mut out = ComplexMatrix::zeros(d1 * d2, cols);
    for i in 0..d1 {
        for j in 0..d1 {
            let u = u1[(i, j)];
            if u == ZERO {
                continue;
            }
            for k in 0..d2 {
                for c in 0..cols {
                    out[(i * d2 + k, c)] += u * tmp[(j * d2 + k, c)];
                }
            }
        }
    }
    out
}

/// Swap operator on `C^d (x) C^d`.
pub fn swap_operator(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d * d, d * d, |r, c| {
        let (i, j) = (r / d, r % d);
        if c == j * d + i {
            C64::new(1.0, 0.0)
        } else {
            ZERO
        }
    })
}
