//! Quantum states, unitaries and their JSON representation.

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    herm_eig, kron, orthonormalize, partial_trace, psd_eig, svd, swap_operator, unvec,
    ComplexMatrix, Subsystem, C64, ONE, ZERO,
};
use crate::rng::{self, Rng};

const STATE_HERMITIAN_TOL: f64 = 1e-12;
const STATE_TRACE_TOL: f64 = 1e-12;
const STATE_PSD_TOL: f64 = 1e-10;

/// Trace-one PSD operator on `C^d1 (x) C^d2`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    d1: usize,
    d2: usize,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix, d1: usize, d2: usize) -> Result<Self> {
        if d1 == 0 || d2 == 0 {
            return Err(Error::BadParameter("subsystem dimensions must be positive".into()));
        }
        let n = d1 * d2;
        if mat.rows() != n || mat.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for dims ({d1},{d2})",
                mat.rows(),
                mat.cols()
            )));
        }
        let herr = mat.hermiticity_error();
        if herr > STATE_HERMITIAN_TOL {
            return Err(Error::NotHermitian(herr));
        }
        let tr = mat.trace();
        if (tr - ONE).norm() > STATE_TRACE_TOL {
            return Err(Error::BadParameter(format!("trace {} is not 1", tr.re)));
        }
        let min = herm_eig(&mat)?.min_eigenvalue();
        if min < -STATE_PSD_TOL {
            return Err(Error::NotPsd(min));
        }
        Ok(Self {
            mat: mat.hermitian_part(),
            d1,
            d2,
        })
    }

    /// Normalizes a PSD matrix to unit trace first.
    pub fn from_unnormalized(mat: ComplexMatrix, d1: usize, d2: usize) -> Result<Self> {
        let tr = mat.trace().re;
        if tr <= 0.0 {
            return Err(Error::BadParameter("matrix has non-positive trace".into()));
        }
        Self::new(mat.scale(1.0 / tr), d1, d2)
    }

    pub fn maximally_mixed(d1: usize, d2: usize) -> Self {
        let n = d1 * d2;
        Self {
            mat: ComplexMatrix::identity(n).scale(1.0 / n as f64),
            d1,
            d2,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d1, self.d2)
    }

    pub fn order(&self) -> usize {
        self.d1 * self.d2
    }

    pub fn reduced(&self, keep: Subsystem) -> ComplexMatrix {
        let traced = match keep {
            Subsystem::First => Subsystem::Second,
            Subsystem::Second => Subsystem::First,
        };
        partial_trace(&self.mat, self.d1, self.d2, traced).expect("dimensions validated")
    }

    /// Eigenvalues, descending, roundoff negatives clamped.
    pub fn spectrum(&self) -> Vec<f64> {
        psd_eig(&self.mat)
            .expect("validated density matrix")
            .eigenvalues
    }

    /// `(W) rho (W)^H` for a local unitary.
    pub fn conjugate_local(&self, w: &LocalUnitary) -> Self {
        let k = w.to_matrix();
        Self {
            mat: k.matmul(&self.mat).matmul(&k.adjoint()).hermitian_part(),
            d1: self.d1,
            d2: self.d2,
        }
    }

    /// `(1 - rho) / (d1 d2 - 1)`
    pub fn complement(&self) -> Result<Self> {
        let n = self.order();
        if n < 2 {
            return Err(Error::BadParameter("complement needs order >= 2".into()));
        }
        let m = (&ComplexMatrix::identity(n) - &self.mat).scale(1.0 / (n as f64 - 1.0));
        Ok(Self {
            mat: m,
            d1: self.d1,
            d2: self.d2,
        })
    }

    pub fn to_json(&self) -> StateJson {
        let (re, im) = self.mat.to_parts();
        StateJson {
            d1: self.d1,
            d2: self.d2,
            re,
            im,
        }
    }

    pub fn from_json(j: &StateJson) -> Result<Self> {
        Self::new(ComplexMatrix::from_parts(&j.re, &j.im)?, j.d1, j.d2)
    }
}

/// On-disk state layout `{d1, d2, re: [[..]], im: [[..]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    pub d1: usize,
    pub d2: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

/// Unit vector on `C^d1 (x) C^d2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    ket: Vec<C64>,
    d1: usize,
    d2: usize,
}

impl PureState {
    pub fn new(ket: Vec<C64>, d1: usize, d2: usize) -> Result<Self> {
        if ket.len() != d1 * d2 {
            return Err(Error::DimensionMismatch(format!(
                "ket of length {} for dims ({d1},{d2})",
                ket.len()
            )));
        }
        let norm = ket.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::BadParameter(format!("ket norm {norm} is not 1")));
        }
        Ok(Self { ket, d1, d2 })
    }

    /// Scales a nonzero vector to unit norm.
    pub fn normalized(ket: Vec<C64>, d1: usize, d2: usize) -> Result<Self> {
        let norm = ket.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::BadParameter("cannot normalize a zero vector".into()));
        }
        Self::new(ket.into_iter().map(|z| z / norm).collect(), d1, d2)
    }

    /// Computational basis product state `|i>|j>`.
    pub fn basis(d1: usize, d2: usize, i: usize, j: usize) -> Result<Self> {
        if i >= d1 || j >= d2 {
            return Err(Error::BadParameter(format!("basis index ({i},{j}) out of range")));
        }
        let mut ket = vec![ZERO; d1 * d2];
        ket[i * d2 + j] = ONE;
        Self::new(ket, d1, d2)
    }

    /// `sqrt(lam)|00> + sqrt(1-lam)|11>` embedded in `C^d1 (x) C^d2`.
    pub fn phi_lambda(d1: usize, d2: usize, lam: f64) -> Result<Self> {
        if d1 < 2 || d2 < 2 || !(0.0..=1.0).contains(&lam) {
            return Err(Error::BadParameter(format!(
                "phi_lambda needs d1,d2 >= 2 and lam in [0,1], got ({d1},{d2},{lam})"
            )));
        }
        let mut ket = vec![ZERO; d1 * d2];
        ket[0] = C64::new(lam.sqrt(), 0.0);
        ket[d2 + 1] = C64::new((1.0 - lam).sqrt(), 0.0);
        Self::new(ket, d1, d2)
    }

    pub fn ket(&self) -> &[C64] {
        &self.ket
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d1, self.d2)
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            mat: ComplexMatrix::outer(&self.ket, &self.ket),
            d1: self.d1,
            d2: self.d2,
        }
    }

    /// Schmidt decomposition `|psi> = sum_k c_k |a_k>|b_k>`.
    pub fn schmidt(&self) -> Schmidt {
        let m = unvec(&self.ket, self.d1, self.d2).expect("validated dims");
        let s = svd(&m).expect("finite ket");
        // vec(u v^H) = u (x) conj(v)
        Schmidt {
            coefficients: s.singular_values,
            left: s.left,
            right: s.right.conj(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Schmidt {
    /// Descending, `min(d1, d2)` entries.
    pub coefficients: Vec<f64>,
    /// Columns are `|a_k>` (full basis of `C^d1`).
    pub left: ComplexMatrix,
    /// Columns are `|b_k>` (full basis of `C^d2`).
    pub right: ComplexMatrix,
}

impl Schmidt {
    pub fn reconstruct(&self) -> Vec<C64> {
        let (d1, d2) = (self.left.rows(), self.right.rows());
        let mut ket = vec![ZERO; d1 * d2];
        for (k, &c) in self.coefficients.iter().enumerate() {
            for i in 0..d1 {
                for j in 0..d2 {
                    ket[i * d2 + j] += self.left[(i, k)] * self.right[(j, k)] * c;
                }
            }
        }
        ket
    }

    /// Squared coefficients, i.e. the spectrum of either reduced state.
    pub fn reduced_spectrum(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c * c).collect()
    }
}

/// A product unitary `U1 (x) U2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalUnitary {
    pub u1: ComplexMatrix,
    pub u2: ComplexMatrix,
}

impl LocalUnitary {
    pub fn new(u1: ComplexMatrix, u2: ComplexMatrix) -> Result<Self> {
        for (name, u) in [("u1", &u1), ("u2", &u2)] {
            u.ensure_square(name)?;
            let err = u.unitarity_error();
            if err > 1e-10 {
                return Err(Error::BadParameter(format!(
                    "{name} is not unitary (deviation {err:.3e})"
                )));
            }
        }
        Ok(Self { u1, u2 })
    }

    pub fn identity(d1: usize, d2: usize) -> Self {
        Self {
            u1: ComplexMatrix::identity(d1),
            u2: ComplexMatrix::identity(d2),
        }
    }

    pub fn haar(d1: usize, d2: usize, rng: &mut Rng) -> Self {
        Self {
            u1: haar_unitary_with(d1, rng),
            u2: haar_unitary_with(d2, rng),
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.u1.rows(), self.u2.rows())
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        kron(&self.u1, &self.u2)
    }

    pub fn unitarity_error(&self) -> f64 {
        self.u1.unitarity_error().max(self.u2.unitarity_error())
    }
}

fn check_d(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::BadParameter(format!("local dimension must be >= 2, got {d}")));
    }
    Ok(())
}

/// `(1 - t SWAP) / (d (d - t))`, `t` in `[-1, 1]`.
pub fn werner(d: usize, t: f64) -> Result<DensityMatrix> {
    check_d(d)?;
    if !(-1.0..=1.0).contains(&t) {
        return Err(Error::BadParameter(format!("werner parameter t={t} outside [-1,1]")));
    }
    let df = d as f64;
    let m = (&ComplexMatrix::identity(d * d) - &swap_operator(d).scale(t))
        .scale(1.0 / (df * (df - t)));
    DensityMatrix::new(m, d, d)
}

/// `(1-lam)/(d^2-1) (1 - P) + lam P` with `P` the maximally entangled projector.
pub fn isotropic(d: usize, lam: f64) -> Result<DensityMatrix> {
    check_d(d)?;
    if !(0.0..=1.0).contains(&lam) {
        return Err(Error::BadParameter(format!("isotropic parameter {lam} outside [0,1]")));
    }
    let omega = max_entangled(d)?;
    let p = ComplexMatrix::outer(omega.ket(), omega.ket());
    let n = d * d;
    let rest = (&ComplexMatrix::identity(n) - &p).scale((1.0 - lam) / (n as f64 - 1.0));
    DensityMatrix::new(&rest + &p.scale(lam), d, d)
}

/// `(1/sqrt d) sum_j |jj>`
pub fn max_entangled(d: usize) -> Result<PureState> {
    check_d(d)?;
    let mut ket = vec![ZERO; d * d];
    let a = 1.0 / (d as f64).sqrt();
    for j in 0..d {
        ket[j * d + j] = C64::new(a, 0.0);
    }
    PureState::new(ket, d, d)
}

fn complex_gaussian(rng: &mut Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-distributed unitary from stream 0 of `seed`.
pub fn haar_unitary(d: usize, seed: u64) -> ComplexMatrix {
    haar_unitary_with(d, &mut rng::stream(seed, 0))
}

/// QR of a complex Ginibre matrix with the diagonal of `R` made positive.
/// Gram-Schmidt produces exactly that normalization.
pub fn haar_unitary_with(d: usize, rng: &mut Rng) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = (0..d)
        .map(|_| (0..d).map(|_| complex_gaussian(rng)).collect())
        .collect();
    orthonormalize(&mut cols);
    debug_assert_eq!(cols.len(), d);
    let mut u = ComplexMatrix::zeros(d, d);
    for (j, c) in cols.iter().enumerate() {
        u.set_column(j, c);
    }
    u
}

/// Haar-random pure state.
pub fn random_pure(d1: usize, d2: usize, rng: &mut Rng) -> PureState {
    let v: Vec<C64> = (0..d1 * d2).map(|_| complex_gaussian(rng)).collect();
    PureState::normalized(v, d1, d2).expect("gaussian vector is nonzero")
}

/// Density matrix of the given rank: partial trace of a Haar-random
/// purification on `C^(d1 d2) (x) C^rank`.
pub fn random_density(d1: usize, d2: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    random_density_with(d1, d2, rank, &mut rng::stream(seed, 1))
}

pub fn random_density_with(d1: usize, d2: usize, rank: usize, rng: &mut Rng) -> Result<DensityMatrix> {
    let n = d1 * d2;
    if d1 == 0 || d2 == 0 || rank == 0 || rank > n {
        return Err(Error::BadParameter(format!(
            "rank {rank} not in [1, {n}] for dims ({d1},{d2})"
        )));
    }
    let purification = random_pure(n, rank, rng);
    let p = ComplexMatrix::outer(purification.ket(), purification.ket());
    let rho = partial_trace(&p, n, rank, Subsystem::Second)?;
    DensityMatrix::from_unnormalized(rho.hermitian_part(), d1, d2)
}

/// Uniform draw in `[lo, hi)` from a stream, for test-instance generation.
pub fn uniform(rng: &mut Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}
