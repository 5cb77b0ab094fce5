//! Singular value decomposition, polar isometry and trace norm.
//!
//! The right singular vectors come from the eigendecomposition of the
//! smaller Gram matrix. Singular values are then measured directly as column
//! norms of `A V`, which keeps tiny singular values accurate to roundoff in
//! `|A|` rather than to its square root.

use super::eig::herm_eig_trusted;
use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::Result;

/// Singular values below this fraction of the largest one are treated as zero
/// when left vectors are recovered.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct SvdResult {
    /// `m x m` unitary.
    pub left: ComplexMatrix,
    /// `min(m, n)` values, descending.
    pub singular_values: Vec<f64>,
    /// `n x n` unitary.
    pub right: ComplexMatrix,
}

impl SvdResult {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let m = self.left.rows();
        let n = self.right.rows();
        let mut out = ComplexMatrix::zeros(m, n);
        for (k, &s) in self.singular_values.iter().enumerate() {
            for i in 0..m {
                let a = self.left[(i, k)] * s;
                for j in 0..n {
                    out[(i, j)] += a * self.right[(j, k)].conj();
                }
            }
        }
        out
    }

    /// Number of singular values above `RANK_TOL` relative to the largest.
    pub fn numerical_rank(&self) -> usize {
        let top = self.singular_values.first().copied().unwrap_or(0.0);
        self.singular_values
            .iter()
            .filter(|&&s| s > RANK_TOL * top && s > 0.0)
            .count()
    }
}

pub fn svd(a: &ComplexMatrix) -> Result<SvdResult> {
    a.ensure_finite()?;
    if a.rows() < a.cols() {
        let t = svd_tall(&a.adjoint())?;
        return Ok(SvdResult {
            left: t.right,
            singular_values: t.singular_values,
            right: t.left,
        });
    }
    svd_tall(a)
}

/// SVD for `rows >= cols`.
fn svd_tall(a: &ComplexMatrix) -> Result<SvdResult> {
    let (m, n) = (a.rows(), a.cols());
    let gram = a.adjoint().matmul(a);
    let eig = herm_eig_trusted(&gram)?;
    let av = a.matmul(&eig.eigenvectors);
    let mut sv: Vec<(f64, usize)> = (0..n)
        .map(|k| {
            let s = (0..m).map(|i| av[(i, k)].norm_sqr()).sum::<f64>().sqrt();
            (s, k)
        })
        .collect();
    sv.sort_by(|x, y| y.0.total_cmp(&x.0));

    let right = ComplexMatrix::from_fn(n, n, |i, k| eig.eigenvectors[(i, sv[k].1)]);
    let top = sv.first().map_or(0.0, |x| x.0);
    let mut left_cols: Vec<Vec<C64>> = Vec::with_capacity(m);
    for &(s, k) in &sv {
        if s > RANK_TOL * top && s > 0.0 {
            let u: Vec<C64> = (0..m).map(|i| av[(i, k)] / s).collect();
            left_cols.push(u);
        } else {
            break;
        }
    }
    orthonormalize(&mut left_cols);
    complete_basis(&mut left_cols, m);
    let mut left = ComplexMatrix::zeros(m, m);
    for (j, c) in left_cols.iter().enumerate() {
        left.set_column(j, c);
    }
    Ok(SvdResult {
        left,
        singular_values: sv.iter().map(|x| x.0).collect(),
        right,
    })
}

/// Modified Gram-Schmidt, applied twice.
pub(crate) fn orthonormalize(cols: &mut Vec<Vec<C64>>) {
    for _ in 0..2 {
        let mut out: Vec<Vec<C64>> = Vec::with_capacity(cols.len());
        for c in cols.iter() {
            let mut w = c.clone();
            for q in &out {
                let proj: C64 = q.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= proj * qi;
                }
            }
            let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-300 {
                for wi in w.iter_mut() {
                    *wi /= norm;
                }
                out.push(w);
            }
        }
        *cols = out;
    }
}

/// Extends an orthonormal family to a basis of `C^dim` using standard basis
/// vectors with the largest residual.
pub(crate) fn complete_basis(cols: &mut Vec<Vec<C64>>, dim: usize) {
    while cols.len() < dim {
        let mut best: Option<(f64, Vec<C64>)> = None;
        for e in 0..dim {
            let mut w = vec![ZERO; dim];
            w[e] = C64::new(1.0, 0.0);
            for _ in 0..2 {
                for q in cols.iter() {
                    let proj: C64 = q.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                    for (wi, qi) in w.iter_mut().zip(q) {
                        *wi -= proj * qi;
                    }
                }
            }
            let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if best.as_ref().is_none_or(|b| norm > b.0) {
                best = Some((norm, w));
            }
        }
        let (norm, mut w) = best.expect("dim > 0");
        for wi in w.iter_mut() {
            *wi /= norm;
        }
        cols.push(w);
    }
}

/// Partial isometry `Q = U_r V_r^H` over the nonzero singular values, so that
/// `Tr(Q^H a) = |a|_1`.
pub fn polar_isometry(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let s = svd(a)?;
    Ok(polar_from_svd(&s, a.rows(), a.cols()))
}

pub(crate) fn polar_from_svd(s: &SvdResult, m: usize, n: usize) -> ComplexMatrix {
    let r = s.numerical_rank();
    let mut q = ComplexMatrix::zeros(m, n);
    for k in 0..r {
        for i in 0..m {
            let u = s.left[(i, k)];
            for j in 0..n {
                q[(i, j)] += u * s.right[(j, k)].conj();
            }
        }
    }
    q
}

/// Sum of singular values.
pub fn trace_norm(a: &ComplexMatrix) -> Result<f64> {
    Ok(singular_values(a)?.iter().sum())
}

/// Singular values only (no left vectors).
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    a.ensure_finite()?;
    let owned;
    let a = if a.rows() < a.cols() {
        owned = a.adjoint();
        &owned
    } else {
        a
    };
    let eig = herm_eig_trusted(&a.adjoint().matmul(a))?;
    let av = a.matmul(&eig.eigenvectors);
    let mut sv: Vec<f64> = (0..a.cols())
        .map(|k| (0..a.rows()).map(|i| av[(i, k)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    Ok(sv)
}
