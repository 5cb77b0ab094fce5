//! Spectral matrix functions on Hermitian / PSD matrices.

use super::eig::{herm_eig, herm_eig_trusted, HermitianEig};
use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Eigenvalues in `[-PSD_TOL, 0)` are roundoff and get clamped to zero.
pub const PSD_TOL: f64 = 1e-8;

/// Eigenvalues below this fraction of the spectral radius are clamped to
/// zero before square roots are taken. The Jacobi solver resolves
/// eigenvalues to about `eps * |m|`, so anything smaller is noise, and its
/// square root would otherwise surface at the `1e-8` level.
const ROUNDOFF_FLOOR: f64 = 64.0 * f64::EPSILON;

/// Eigendecomposition of a PSD matrix with roundoff negatives clamped.
pub fn psd_eig(m: &ComplexMatrix) -> Result<HermitianEig> {
    let mut e = herm_eig(m)?;
    clamp_psd(&mut e)?;
    Ok(e)
}

fn clamp_psd(e: &mut HermitianEig) -> Result<()> {
    let min = e.min_eigenvalue();
    if min < -PSD_TOL {
        return Err(Error::NotPsd(min));
    }
    let floor = ROUNDOFF_FLOOR * e.max_eigenvalue().abs();
    for l in e.eigenvalues.iter_mut() {
        if *l < floor {
            *l = 0.0;
        }
    }
    Ok(())
}

/// Principal square root of a PSD matrix.
pub fn matrix_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(psd_eig(m)?.apply(f64::sqrt))
}

/// Number of eigenvalues above `tol`.
pub fn rank_psd(e: &HermitianEig, tol: f64) -> usize {
    e.eigenvalues.iter().filter(|&&l| l > tol).count()
}

/// `Tr sqrt(m)` for PSD `m`.
pub fn trace_sqrt(m: &ComplexMatrix) -> Result<f64> {
    Ok(psd_eig(m)?.eigenvalues.iter().map(|l| l.sqrt()).sum())
}

/// Natural logarithm restricted to the support: eigenvalues at or below
/// `support_tol` map to zero (`0 log 0 = 0`).
pub fn log_on_support(m: &ComplexMatrix, support_tol: f64) -> Result<ComplexMatrix> {
    Ok(psd_eig(m)?.apply(|l| if l > support_tol { l.ln() } else { 0.0 }))
}

/// Hermitian `H` with `exp(iH) = u` for a unitary `u`, together with the
/// eigenbasis that diagonalizes both.
///
/// `u` is normal, so its Hermitian and anti-Hermitian parts commute and a
/// generic real combination of them shares the eigenvectors of `u`.
pub fn unitary_generator(u: &ComplexMatrix) -> Result<HermitianEig> {
    u.ensure_square("unitary_generator input")?;
    let err = u.unitarity_error();
    if err > 1e-8 {
        return Err(Error::BadParameter(format!(
            "matrix is not unitary (deviation {err:.3e})"
        )));
    }
    let n = u.rows();
    let c = (u + &u.adjoint()).scale(0.5);
    let s = (u - &u.adjoint()).map(|z| z * C64::new(0.0, -0.5));
    for mix in [0.754_877_666_246_692_7, 1.324_717_957_244_746, std::f64::consts::E] {
        let e = herm_eig_trusted(&(&c + &s.scale(mix)))?;
        let v = &e.eigenvectors;
        let d = v.adjoint().matmul(u).matmul(v);
        let mut off = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off = off.max(d[(i, j)].norm());
                }
            }
        }
        if off < 1e-9 {
            let angles = (0..n).map(|i| d[(i, i)].arg()).collect();
            return Ok(HermitianEig {
                eigenvalues: angles,
                eigenvectors: e.eigenvectors,
            });
        }
    }
    Err(Error::NoConvergence(
        "could not diagonalize unitary".into(),
    ))
}

/// `exp(i s H)` from a generator decomposition (eigenvalues = angles).
pub fn unitary_power(gen: &HermitianEig, s: f64) -> ComplexMatrix {
    let n = gen.eigenvalues.len();
    let v = &gen.eigenvectors;
    let mut out = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let phase = C64::from_polar(1.0, s * gen.eigenvalues[k]);
        for i in 0..n {
            let a = v[(i, k)] * phase;
            for j in 0..n {
                out[(i, j)] += a * v[(j, k)].conj();
            }
        }
    }
    out
}
