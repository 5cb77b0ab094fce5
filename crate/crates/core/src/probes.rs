//! Two probes built on the orbit optimizers: a Schmidt-rank-two
//! distillability witness search, and the search for a local unitary that
//! makes two states commute.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{herm_eig, partial_transpose, ComplexMatrix, C64};
use crate::orbit_opt::{self, commutator_min, OptimizationReport, OptimizerConfig};
use crate::states::{DensityMatrix, PureState};

/// Largest total dimension `(d1 d2)^n` the distillability probe accepts.
pub const MAX_PROBE_DIM: usize = 256;
/// Expectations below `-NEGATIVITY_TOL` count as negative.
pub const NEGATIVITY_TOL: f64 = 1e-9;
const GRID_POINTS: usize = 21;
const GOLDEN_ITERS: usize = 16;

/// `rho^(x)n` with factors reordered to `(A1..An) | (B1..Bn)`.
pub fn bipartite_tensor_power(rho: &DensityMatrix, n: usize) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::BadParameter("tensor power must be at least 1".into()));
    }
    let (d1, d2) = rho.dims();
    let d = d1 * d2;
    let total = d
        .checked_pow(n as u32)
        .filter(|&t| t <= MAX_PROBE_DIM)
        .ok_or(Error::DimensionTooLarge(MAX_PROBE_DIM))?;
    let big_d2 = d2.pow(n as u32);
    // position of copy-ordered index in the (A..)(B..) ordering
    let perm: Vec<usize> = (0..total)
        .map(|idx| {
            let (mut a, mut b) = (0, 0);
            let mut rest = idx;
            let mut digits = vec![0; n];
            for k in (0..n).rev() {
                digits[k] = rest % d;
                rest /= d;
            }
            for &dig in &digits {
                a = a * d1 + dig / d2;
                b = b * d2 + dig % d2;
            }
            a * big_d2 + b
        })
        .collect();
    let m = rho.matrix();
    let mut out = ComplexMatrix::zeros(total, total);
    for r in 0..total {
        for c in 0..total {
            let (mut rr, mut cc) = (r, c);
            let mut v = C64::new(1.0, 0.0);
            for _ in 0..n {
                v *= m[(rr % d, cc % d)];
                rr /= d;
                cc /= d;
            }
            out[(perm[r], perm[c])] = v;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// A Schmidt-rank-two state with negative expectation was found.
    Distillable,
    /// The partial transpose is PSD, so no witness exists at this `n`.
    Ppt,
    /// Negative partial transpose but no witness found at this `n`.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistillReport {
    pub n: usize,
    pub dims: (usize, usize),
    pub min_pt_eigenvalue: f64,
    pub x_shift: f64,
    pub best_lambda: f64,
    /// Squared minimal fidelity between `|phi_lambda>` and the shifted
    /// partial transpose, at `best_lambda`.
    pub witness_value: f64,
    /// `<psi| (rho^(x)n)^T_B |psi>` recomputed directly.
    pub witness_expectation: f64,
    pub distillable_flag: bool,
    pub verdict: Verdict,
    pub witness_re: Option<Vec<f64>>,
    pub witness_im: Option<Vec<f64>>,
    pub lambda_values: Vec<(f64, f64)>,
}

struct LambdaEval {
    value: f64,
    psi: Vec<C64>,
}

fn eval_lambda(
    shifted: &ComplexMatrix,
    dims: (usize, usize),
    lam: f64,
    cfg: &OptimizerConfig,
) -> Result<LambdaEval> {
    let phi = PureState::phi_lambda(dims.0, dims.1, lam)?;
    let rep = orbit_opt::gmin(phi.to_density().matrix(), shifted, dims, cfg)?;
    // G = <phi| W P W^H |phi>, so the probe state is W^H |phi>
    let w = rep.local_unitary.to_matrix();
    let psi = w.adjoint().mul_vec(phi.ket());
    Ok(LambdaEval { value: rep.value * rep.value, psi })
}

/// Searches for a Schmidt-rank-two `|psi>` with
/// `<psi| (rho^(x)n)^T_B |psi> < 0` by minimizing `G_min^2(|phi_lambda>, M + x 1)`
/// over `lambda`, `M` the partial transpose and `x` the smallest shift that
/// makes it PSD.
pub fn distill_probe(rho: &DensityMatrix, n: usize, cfg: &OptimizerConfig) -> Result<DistillReport> {
    cfg.validate()?;
    let (d1, d2) = rho.dims();
    if d1 < 2 || d2 < 2 {
        return Err(Error::BadParameter("probe needs both local dimensions >= 2".into()));
    }
    let power = bipartite_tensor_power(rho, n)?;
    let dims = (d1.pow(n as u32), d2.pow(n as u32));
    let m = partial_transpose(&power, dims.0, dims.1)?.hermitian_part();
    let lmin = herm_eig(&m)?.min_eigenvalue();
    let x = if lmin < 0.0 { -lmin + NEGATIVITY_TOL } else { 1e-3 };
    let shifted = &m + &ComplexMatrix::identity(m.rows()).scale(x);

    let mut lambda_values = Vec::new();
    let mut best: Option<(f64, LambdaEval)> = None;
    let mut consider = |lam: f64, e: LambdaEval, best: &mut Option<(f64, LambdaEval)>| {
        lambda_values.push((lam, e.value));
        if best.as_ref().is_none_or(|(_, b)| e.value < b.value) {
            *best = Some((lam, e));
        }
    };
    let step = 1.0 / (GRID_POINTS + 1) as f64;
    let grid: Vec<f64> = (1..=GRID_POINTS).map(|k| k as f64 * step).collect();
    let evals = crate::par::map_indexed(grid.len(), cfg.execution, |k| {
        eval_lambda(&shifted, dims, grid[k], cfg)
    });
    for (lam, e) in grid.iter().zip(evals) {
        consider(*lam, e?, &mut best);
    }

    let (lam0, _) = best.as_ref().map(|(l, e)| (*l, e.value)).expect("grid is nonempty");
    let (mut a, mut b) = ((lam0 - step).max(step * 1e-3), (lam0 + step).min(1.0 - step * 1e-3));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = eval_lambda(&shifted, dims, c, cfg)?;
    let mut fd = eval_lambda(&shifted, dims, d, cfg)?;
    for _ in 0..GOLDEN_ITERS {
        if fc.value < fd.value {
            consider(d, fd, &mut best);
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval_lambda(&shifted, dims, c, cfg)?;
        } else {
            consider(c, fc, &mut best);
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval_lambda(&shifted, dims, d, cfg)?;
        }
    }
    consider(c, fc, &mut best);
    consider(d, fd, &mut best);

    let (best_lambda, eval) = best.expect("grid is nonempty");
    let psi = eval.psi;
    let expectation = m.sandwich(&psi, &psi).re;
    let flag = expectation < -NEGATIVITY_TOL && eval.value < x - NEGATIVITY_TOL;
    let verdict = if flag {
        Verdict::Distillable
    } else if lmin >= -NEGATIVITY_TOL {
        Verdict::Ppt
    } else {
        Verdict::Inconclusive
    };
    Ok(DistillReport {
        n,
        dims: (d1, d2),
        min_pt_eigenvalue: lmin,
        x_shift: x,
        best_lambda,
        witness_value: eval.value.max(0.0),
        witness_expectation: expectation,
        distillable_flag: flag,
        verdict,
        witness_re: flag.then(|| psi.iter().map(|z| z.re).collect()),
        witness_im: flag.then(|| psi.iter().map(|z| z.im).collect()),
        lambda_values,
    })
}

/// Number of Schmidt coefficients of `psi` above `tol`.
pub fn schmidt_rank(psi: &[C64], dims: (usize, usize), tol: f64) -> Result<usize> {
    let s = PureState::normalized(psi.to_vec(), dims.0, dims.1)?.schmidt();
    Ok(s.coefficients.iter().filter(|&&c| c > tol).count())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutativityReport {
    pub best_norm: f64,
    pub per_restart_minima: Vec<f64>,
    /// Multiplicities of the distinct positive eigenvalues, descending.
    pub rho_multiplicities: Vec<usize>,
    pub sigma_multiplicities: Vec<usize>,
    pub nondegenerate_support: bool,
    pub optimization: OptimizationReport,
}

fn positive_multiplicities(m: &DensityMatrix, tol: f64) -> Vec<usize> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    for l in m.spectrum().into_iter().filter(|&l| l > tol) {
        match out.last_mut() {
            Some((prev, k)) if (*prev - l).abs() <= tol => *k += 1,
            _ => out.push((l, 1)),
        }
    }
    out.into_iter().map(|(_, k)| k).collect()
}

pub fn commutativity_experiment(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    cfg: &OptimizerConfig,
) -> Result<CommutativityReport> {
    let opt = commutator_min(rho, sigma, cfg)?;
    let rm = positive_multiplicities(rho, 1e-9);
    let sm = positive_multiplicities(sigma, 1e-9);
    Ok(CommutativityReport {
        best_norm: opt.value,
        per_restart_minima: opt.per_restart_values.clone(),
        nondegenerate_support: rm.iter().chain(&sm).all(|&k| k == 1),
        rho_multiplicities: rm,
        sigma_multiplicities: sm,
        optimization: opt,
    })
}

/// Two-qubit pair with nondegenerate positive spectra that no local unitary
/// brings to commute: `rho` mixes three Bell states with weights
/// `1/2, 1/3, 1/6`, `sigma = 2/3 |00><00| + 1/3 |11><11|`.
pub fn counterexample_pair() -> (DensityMatrix, DensityMatrix) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let ket = |v: [f64; 4]| v.map(|x| C64::new(x, 0.0));
    let psi_p = ket([h, 0.0, 0.0, h]);
    let psi_m = ket([h, 0.0, 0.0, -h]);
    let phi_p = ket([0.0, h, h, 0.0]);
    let rho = &(&ComplexMatrix::outer(&psi_p, &psi_p).scale(0.5)
        + &ComplexMatrix::outer(&psi_m, &psi_m).scale(1.0 / 3.0))
        + &ComplexMatrix::outer(&phi_p, &phi_p).scale(1.0 / 6.0);
    let sigma = ComplexMatrix::from_real_diag(&[2.0 / 3.0, 0.0, 0.0, 1.0 / 3.0]);
    (
        DensityMatrix::new(rho, 2, 2).expect("valid state"),
        DensityMatrix::new(sigma, 2, 2).expect("valid state"),
    )
}
