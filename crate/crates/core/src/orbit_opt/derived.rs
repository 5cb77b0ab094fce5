//! Optimizers built on the orbit machinery: product-state overlap (the
//! `S(1)` norm), Hilbert-Schmidt overlap extrema and commutator
//! minimization.

use serde::{Deserialize, Serialize};

use super::objective::{check_pair, CommutatorObjective, OverlapObjective};
use super::{default_starts, optimize, reduced_alignment, Mode, OptimizationReport, OptimizerConfig};
use crate::error::{Error, Result};
use crate::linalg::{herm_eig, herm_eig_trusted, ComplexMatrix, C64};
use crate::par::map_indexed;
use crate::rng;
use crate::states::{random_pure, DensityMatrix, LocalUnitary};

/// `(1 (x) <v|) x (1 (x) |v>)`, a `d1 x d1` operator.
fn contract_second(x: &ComplexMatrix, v: &[C64], d1: usize, d2: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d1, d1, |i, j| {
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..d2 {
            let cv = v[k].conj();
            for l in 0..d2 {
                acc += cv * x[(i * d2 + k, j * d2 + l)] * v[l];
            }
        }
        acc
    })
}

/// `(<u| (x) 1) x (|u> (x) 1)`, a `d2 x d2` operator.
fn contract_first(x: &ComplexMatrix, u: &[C64], d1: usize, d2: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d2, d2, |k, l| {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..d1 {
            let cu = u[i].conj();
            for j in 0..d1 {
                acc += cu * x[(i * d2 + k, j * d2 + l)] * u[j];
            }
        }
        acc
    })
}

/// Largest `<uv| x |uv>` over product states by alternating top
/// eigenvectors, from a random product start.
fn alternating_max(
    x: &ComplexMatrix,
    (d1, d2): (usize, usize),
    start: &[C64],
    max_iters: usize,
    value_tol: f64,
) -> Result<f64> {
    let mut v = start.to_vec();
    let mut best = f64::NEG_INFINITY;
    for _ in 0..max_iters.max(1) {
        let eu = herm_eig_trusted(&contract_second(x, &v, d1, d2))?;
        let u = eu.eigenvectors.column(0);
        let ev = herm_eig_trusted(&contract_first(x, &u, d1, d2))?;
        v = ev.eigenvectors.column(0);
        let val = ev.max_eigenvalue();
        let done = val - best <= value_tol * val.abs().max(f64::MIN_POSITIVE);
        best = best.max(val);
        if done {
            break;
        }
    }
    Ok(best)
}

/// Product-state norm `sup |<uv| x |u'v'>|` of a Hermitian operator on
/// `C^d1 (x) C^d2`. For PSD `x` this is `max <uv|x|uv>`; for indefinite `x`
/// the value returned is `max |<uv|x|uv>|` over product states, a lower
/// estimate of the supremum.
pub fn s1_norm(x: &ComplexMatrix, dims: (usize, usize), cfg: &OptimizerConfig) -> Result<f64> {
    cfg.validate()?;
    check_pair(x, x, dims)?;
    herm_eig(x)?;
    let (d1, d2) = dims;
    let neg = x.scale(-1.0);
    let psd = herm_eig_trusted(x)?.min_eigenvalue() >= -1e-12 * x.max_abs().max(1.0);
    let runs = map_indexed(cfg.restarts, cfg.execution, |k| -> Result<f64> {
        let mut r = rng::stream(cfg.seed, k as u64);
        let start = random_pure(d2, 1, &mut r);
        let mut best = alternating_max(x, dims, start.ket(), cfg.max_iters, cfg.value_tol)?;
        if !psd {
            best = best.max(alternating_max(&neg, dims, start.ket(), cfg.max_iters, cfg.value_tol)?);
        }
        Ok(best)
    });
    let mut best = f64::NEG_INFINITY;
    for r in runs {
        best = best.max(r?);
    }
    // basis product states as a floor
    for i in 0..d1 {
        for j in 0..d2 {
            best = best.max(x[(i * d2 + j, i * d2 + j)].re.abs());
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HsExtrema {
    pub max: f64,
    pub min: f64,
    pub max_witness: LocalUnitary,
    pub min_witness: LocalUnitary,
}

/// Extrema of `Tr(rho W sigma W^H)` over local unitaries. The minimum is
/// obtained from the maximum for the complement `1 - sigma`:
/// `min_W Tr(rho W sigma W^H) = Tr rho - max_W Tr(rho W (1 - sigma) W^H)`.
pub fn hs_overlap_extrema(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    cfg: &OptimizerConfig,
) -> Result<HsExtrema> {
    super::same_dims(rho, sigma)?;
    let dims = rho.dims();
    let n = rho.order();
    let (r, s) = (rho.matrix(), sigma.matrix());
    let cfg_max = OptimizerConfig {
        mode: Mode::Maximize,
        ..cfg.clone()
    };

    let obj = OverlapObjective::new(r, s, dims)?;
    let hi = optimize(&obj, &cfg_max, &default_starts(r, s, dims, Mode::Maximize)?)?;

    let comp = &ComplexMatrix::identity(n) - s;
    let obj_c = OverlapObjective::new(r, &comp, dims)?;
    let lo = optimize(&obj_c, &cfg_max, &default_starts(r, &comp, dims, Mode::Maximize)?)?;
    let min = (r.trace().re - lo.value).max(0.0);
    Ok(HsExtrema {
        max: hi.value,
        min,
        max_witness: hi.local_unitary,
        min_witness: lo.local_unitary,
    })
}

/// Minimizes `|[rho, W sigma W^H]|_F` over local unitaries. Reported values
/// are norms (square roots of the optimized squared norm).
pub fn commutator_min(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    cfg: &OptimizerConfig,
) -> Result<OptimizationReport> {
    super::same_dims(rho, sigma)?;
    let dims = rho.dims();
    let (r, s) = (rho.matrix(), sigma.matrix());
    let obj = CommutatorObjective::new(r, s, dims)?;
    let starts = vec![
        LocalUnitary::identity(dims.0, dims.1),
        reduced_alignment(r, s, dims, false)?,
    ];
    let mut rep = optimize(
        &obj,
        &OptimizerConfig {
            mode: Mode::Minimize,
            ..cfg.clone()
        },
        &starts,
    )?;
    let root = |x: f64| x.max(0.0).sqrt();
    rep.value = root(rep.value);
    rep.per_restart_values.iter_mut().for_each(|v| *v = root(*v));
    rep.trace.iter_mut().for_each(|v| *v = root(*v));
    rep.commutator_norm = Some(rep.value);
    if !rep.value.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(rep)
}
