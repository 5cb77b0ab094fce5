//! Fidelity, affine fidelity, relative entropy and Kraus channels.

use crate::error::{Error, Result};
use crate::linalg::{matrix_sqrt, psd_eig, trace_norm, ComplexMatrix};
use crate::rng;
use crate::states::haar_unitary_with;

/// Kernel eigenvalues of `sigma` below this are treated as zero.
const SUPPORT_TOL: f64 = 1e-10;
/// Weight of `rho` on `ker(sigma)` above which the relative entropy is infinite.
const KERNEL_WEIGHT_TOL: f64 = 1e-9;

fn same_order(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    a.ensure_square("first argument")?;
    b.ensure_square("second argument")?;
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "orders {} and {} differ",
            a.rows(),
            b.rows()
        )));
    }
    Ok(())
}

/// `F(a, b) = |sqrt(a) sqrt(b)|_1`. Inputs need not have unit trace.
pub fn fidelity(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    same_order(a, b)?;
    fidelity_from_roots(&matrix_sqrt(a)?, &matrix_sqrt(b)?)
}

pub fn fidelity_from_roots(sqrt_a: &ComplexMatrix, sqrt_b: &ComplexMatrix) -> Result<f64> {
    trace_norm(&sqrt_a.matmul(sqrt_b))
}

/// `Tr sqrt(sqrt(a) b sqrt(a))`, the textbook route. Kept as a cross-check.
pub fn fidelity_nested(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    same_order(a, b)?;
    let ra = matrix_sqrt(a)?;
    let inner = ra.matmul(b).matmul(&ra).hermitian_part();
    Ok(psd_eig(&inner)?.eigenvalues.iter().map(|l| l.sqrt()).sum())
}

/// `A(a, b) = Tr(sqrt(a) sqrt(b))`
pub fn affine_fidelity(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    same_order(a, b)?;
    Ok(matrix_sqrt(a)?.trace_of_product(&matrix_sqrt(b)?).re)
}

/// `S(rho || sigma) = Tr rho (log rho - log sigma)` in nats; `+inf` when the
/// support of `rho` is not contained in that of `sigma`.
pub fn relative_entropy(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    same_order(rho, sigma)?;
    let er = psd_eig(rho)?;
    let es = psd_eig(sigma)?;
    let n = rho.rows();

    // weight of rho on ker(sigma)
    let mut kernel_weight = 0.0;
    for k in 0..n {
        if es.eigenvalues[k] <= SUPPORT_TOL {
            let v = es.eigenvectors.column(k);
            kernel_weight += rho.sandwich(&v, &v).re;
        }
    }
    if kernel_weight > KERNEL_WEIGHT_TOL {
        return Ok(f64::INFINITY);
    }

    let neg_entropy: f64 = er
        .eigenvalues
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| l * l.ln())
        .sum();
    // Tr rho log sigma = sum_j log(mu_j) <s_j|rho|s_j>
    let mut cross = 0.0;
    for k in 0..n {
        let mu = es.eigenvalues[k];
        if mu > SUPPORT_TOL {
            let v = es.eigenvectors.column(k);
            cross += mu.ln() * rho.sandwich(&v, &v).re;
        }
    }
    Ok((neg_entropy - cross).max(0.0))
}

/// Von Neumann entropy in nats.
pub fn von_neumann_entropy(rho: &ComplexMatrix) -> Result<f64> {
    Ok(-psd_eig(rho)?
        .eigenvalues
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| l * l.ln())
        .sum::<f64>())
}

/// Channel `X -> sum_j M_j X M_j^H` with `sum_j M_j^H M_j = 1`.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    ops: Vec<ComplexMatrix>,
}

impl KrausChannel {
    pub fn new(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| Error::BadParameter("channel needs at least one Kraus operator".into()))?;
        let (d_out, d_in) = (first.rows(), first.cols());
        let mut sum = ComplexMatrix::zeros(d_in, d_in);
        for m in &ops {
            if m.rows() != d_out || m.cols() != d_in {
                return Err(Error::DimensionMismatch("Kraus operators differ in shape".into()));
            }
            m.ensure_finite()?;
            sum += &m.adjoint().matmul(m);
        }
        let dev = sum.max_abs_diff(&ComplexMatrix::identity(d_in));
        if dev > 1e-10 {
            return Err(Error::InvalidChannel(dev));
        }
        Ok(Self { ops })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            ops: vec![ComplexMatrix::identity(d)],
        }
    }

    /// Projective measurement in the computational basis, outcome forgotten.
    pub fn dephasing(d: usize) -> Self {
        let ops = (0..d)
            .map(|k| {
                let mut p = ComplexMatrix::zeros(d, d);
                p[(k, k)] = crate::linalg::ONE;
                p
            })
            .collect();
        Self { ops }
    }

    /// Qubit depolarizing channel with error probability `p`.
    pub fn depolarizing(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::BadParameter(format!("depolarizing p={p} outside [0,1]")));
        }
        use crate::linalg::C64;
        let z = C64::new(0.0, 0.0);
        let o = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let paulis = [
            [o, z, z, o],
            [z, o, o, z],
            [z, -i, i, z],
            [o, z, z, -o],
        ];
        let weights = [(1.0 - 3.0 * p / 4.0).sqrt(), (p / 4.0).sqrt(), (p / 4.0).sqrt(), (p / 4.0).sqrt()];
        let ops = paulis
            .iter()
            .zip(weights)
            .map(|(m, w)| ComplexMatrix::new(2, 2, m.iter().map(|x| x * w).collect()).expect("2x2"))
            .collect();
        Self::new(ops)
    }

    /// Random channel with `n_ops` Kraus operators: blocks of a Haar isometry.
    pub fn random(d: usize, n_ops: usize, seed: u64) -> Result<Self> {
        if d == 0 || n_ops == 0 {
            return Err(Error::BadParameter("random channel needs d, n_ops >= 1".into()));
        }
        let u = haar_unitary_with(d * n_ops, &mut rng::stream(seed, 7));
        let ops = (0..n_ops)
            .map(|j| ComplexMatrix::from_fn(d, d, |r, c| u[(j * d + r, c)]))
            .collect();
        Self::new(ops)
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn input_dim(&self) -> usize {
        self.ops[0].cols()
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.rows() != self.input_dim() || rho.cols() != self.input_dim() {
            return Err(Error::DimensionMismatch(format!(
                "channel input dim {} vs operator {}x{}",
                self.input_dim(),
                rho.rows(),
                rho.cols()
            )));
        }
        let d_out = self.ops[0].rows();
        let mut out = ComplexMatrix::zeros(d_out, d_out);
        for m in &self.ops {
            out += &m.matmul(rho).matmul(&m.adjoint());
        }
        Ok(out.hermitian_part())
    }
}

/// `(F(rho, sigma), sum_j F(M_j rho M_j^H, M_j sigma M_j^H), F(Phi(rho), Phi(sigma)))`,
/// which is nondecreasing left to right.
pub fn monotonicity_chain(
    rho: &ComplexMatrix,
    sigma: &ComplexMatrix,
    ch: &KrausChannel,
) -> Result<(f64, f64, f64)> {
    same_order(rho, sigma)?;
    let f0 = fidelity(rho, sigma)?;
    let mut mid = 0.0;
    for m in ch.ops() {
        let a = m.matmul(rho).matmul(&m.adjoint()).hermitian_part();
        let b = m.matmul(sigma).matmul(&m.adjoint()).hermitian_part();
        mid += fidelity(&a, &b)?;
    }
    let out = fidelity(&ch.apply(rho)?, &ch.apply(sigma)?)?;
    Ok((f0, mid, out))
}
