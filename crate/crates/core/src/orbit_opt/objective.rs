//! Objectives on the local-unitary orbit `W = U1 (x) U2`.
//!
//! Each objective returns its value and the Euclidean gradient `G` with
//! respect to `W`, in the sense `df = Re Tr(G^H dW)`. The optimizer turns
//! `G` into factor-wise Riemannian gradients.

use crate::error::{Error, Result};
use crate::linalg::{apply_local, polar_from_svd, psd_eig, svd, trace_norm, ComplexMatrix};
use crate::states::LocalUnitary;

pub trait OrbitObjective: Sync {
    fn dims(&self) -> (usize, usize);
    fn value(&self, w: &LocalUnitary) -> Result<f64>;
    fn value_and_gradient(&self, w: &LocalUnitary) -> Result<(f64, ComplexMatrix)>;
}

pub(crate) fn check_pair(
    rho: &ComplexMatrix,
    sigma: &ComplexMatrix,
    (d1, d2): (usize, usize),
) -> Result<()> {
    if d1 == 0 || d2 == 0 {
        return Err(Error::BadParameter("local dimensions must be positive".into()));
    }
    let n = d1 * d2;
    for (name, m) in [("rho", rho), ("sigma", sigma)] {
        if m.rows() != n || m.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "{name} is {}x{}, expected {n}x{n} for dims ({d1},{d2})",
                m.rows(),
                m.cols()
            )));
        }
    }
    Ok(())
}

/// `W x W^H`
pub fn conjugate(w: &LocalUnitary, x: &ComplexMatrix) -> ComplexMatrix {
    let wx = apply_local(&w.u1, &w.u2, x);
    apply_local(&w.u1, &w.u2, &wx.adjoint()).adjoint()
}

/// `L` with `L L^H = m`, one column per nonzero eigenvalue.
fn psd_factor(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let e = psd_eig(m)?;
    let n = m.rows();
    let keep: Vec<usize> = (0..n).filter(|&k| e.eigenvalues[k] > 0.0).collect();
    Ok(ComplexMatrix::from_fn(n, keep.len(), |i, j| {
        e.eigenvectors[(i, keep[j])] * e.eigenvalues[keep[j]].sqrt()
    }))
}

/// `F(rho, W sigma W^H) = |L_rho^H W L_sigma|_1` where `L L^H` factor the
/// inputs; equal to `|sqrt(rho) W sqrt(sigma)|_1`.
#[derive(Debug, Clone)]
pub struct FidelityObjective {
    dims: (usize, usize),
    l_rho: ComplexMatrix,
    l_sigma: ComplexMatrix,
}

impl FidelityObjective {
    pub fn new(rho: &ComplexMatrix, sigma: &ComplexMatrix, dims: (usize, usize)) -> Result<Self> {
        check_pair(rho, sigma, dims)?;
        Ok(Self {
            dims,
            l_rho: psd_factor(rho)?,
            l_sigma: psd_factor(sigma)?,
        })
    }

    fn core(&self, w: &LocalUnitary) -> Option<ComplexMatrix> {
        if self.l_rho.cols() == 0 || self.l_sigma.cols() == 0 {
            return None;
        }
        let b = apply_local(&w.u1, &w.u2, &self.l_sigma);
        Some(self.l_rho.adjoint().matmul(&b))
    }
}

impl OrbitObjective for FidelityObjective {
    fn dims(&self) -> (usize, usize) {
        self.dims
    }

    fn value(&self, w: &LocalUnitary) -> Result<f64> {
        match self.core(w) {
            Some(a) => trace_norm(&a),
            None => Ok(0.0),
        }
    }

    fn value_and_gradient(&self, w: &LocalUnitary) -> Result<(f64, ComplexMatrix)> {
        let n = self.dims.0 * self.dims.1;
        let Some(a) = self.core(w) else {
            return Ok((0.0, ComplexMatrix::zeros(n, n)));
        };
        let s = svd(&a)?;
        let value = s.singular_values.iter().sum();
        let q = polar_from_svd(&s, a.rows(), a.cols());
        let g = self.l_rho.matmul(&q).matmul(&self.l_sigma.adjoint());
        Ok((value, g))
    }
}

/// `Re Tr(rho W sigma W^H)`
#[derive(Debug, Clone)]
pub struct OverlapObjective {
    dims: (usize, usize),
    rho: ComplexMatrix,
    sigma: ComplexMatrix,
}

impl OverlapObjective {
    pub fn new(rho: &ComplexMatrix, sigma: &ComplexMatrix, dims: (usize, usize)) -> Result<Self> {
        check_pair(rho, sigma, dims)?;
        Ok(Self {
            dims,
            rho: rho.clone(),
            sigma: sigma.clone(),
        })
    }
}

impl OrbitObjective for OverlapObjective {
    fn dims(&self) -> (usize, usize) {
        self.dims
    }

    fn value(&self, w: &LocalUnitary) -> Result<f64> {
        Ok(self.rho.trace_of_product(&conjugate(w, &self.sigma)).re)
    }

    fn value_and_gradient(&self, w: &LocalUnitary) -> Result<(f64, ComplexMatrix)> {
        let ws = apply_local(&w.u1, &w.u2, &self.sigma);
        let tau = apply_local(&w.u1, &w.u2, &ws.adjoint()).adjoint();
        let value = self.rho.trace_of_product(&tau).re;
        Ok((value, self.rho.matmul(&ws).scale(2.0)))
    }
}

/// `|[rho, W sigma W^H]|_F^2`
#[derive(Debug, Clone)]
pub struct CommutatorObjective {
    dims: (usize, usize),
    rho: ComplexMatrix,
    sigma: ComplexMatrix,
}

impl CommutatorObjective {
    pub fn new(rho: &ComplexMatrix, sigma: &ComplexMatrix, dims: (usize, usize)) -> Result<Self> {
        check_pair(rho, sigma, dims)?;
        Ok(Self {
            dims,
            rho: rho.clone(),
            sigma: sigma.clone(),
        })
    }
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    &a.matmul(b) - &b.matmul(a)
}

impl OrbitObjective for CommutatorObjective {
    fn dims(&self) -> (usize, usize) {
        self.dims
    }

    fn value(&self, w: &LocalUnitary) -> Result<f64> {
        let c = commutator(&self.rho, &conjugate(w, &self.sigma));
        Ok(c.frobenius_norm().powi(2))
    }

    fn value_and_gradient(&self, w: &LocalUnitary) -> Result<(f64, ComplexMatrix)> {
        let ws = apply_local(&w.u1, &w.u2, &self.sigma);
        let tau = apply_local(&w.u1, &w.u2, &ws.adjoint()).adjoint();
        let c = commutator(&self.rho, &tau);
        let m = commutator(&self.rho, &c);
        Ok((c.frobenius_norm().powi(2), m.matmul(&ws).scale(4.0)))
    }
}
