//! Extremal fidelity over the local-unitary orbit by Riemannian gradient
//! steps on `U(d1) x U(d2)` with multi-start.
//!
//! Tangent vectors at `U` are written `Omega U` with `Omega` anti-Hermitian.
//! For an objective with Euclidean gradient `G` (with respect to
//! `W = U1 (x) U2`) the factor gradients are
//! `K1 = Tr_2[G (1 (x) U2)^H]`, `K2 = Tr_1[G (U1 (x) 1)^H]`, and the
//! Riemannian gradient of factor `i` is `S_i = (K_i U_i^H - U_i K_i^H) / 2`,
//! so that the derivative along `Omega_i U_i` is `sum_i Re Tr(S_i^H Omega_i)`.
//! Steps use the Cayley retraction
//! `U <- (1 - eta/2 Omega)^-1 (1 + eta/2 Omega) U`.

mod derived;
mod objective;

pub use derived::{commutator_min, hs_overlap_extrema, s1_norm, HsExtrema};
pub use objective::{
    commutator, conjugate, CommutatorObjective, FidelityObjective, OrbitObjective,
    OverlapObjective,
};

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{psd_eig, ComplexMatrix, Subsystem, C64};
use crate::par::{map_indexed, Execution};
use crate::rng::{self, Rng};
use crate::states::{DensityMatrix, LocalUnitary, PureState};

const ARMIJO: f64 = 1e-4;
const SHRINK: f64 = 0.5;
const GROW: f64 = 2.0;
const MAX_STEP: f64 = 1e4;
const MAX_HALVINGS: usize = 60;
const PERTURBATION: f64 = 1e-7;
const MAX_PERTURBATIONS: usize = 3;
/// Consecutive small improvements before the value test stops a run.
const STALL_STEPS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Maximize,
    Minimize,
}

impl Mode {
    fn sign(self) -> f64 {
        match self {
            Mode::Maximize => 1.0,
            Mode::Minimize => -1.0,
        }
    }

    /// True if `a` is strictly better than `b`.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Mode::Maximize => a > b,
            Mode::Minimize => a < b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub step_init: f64,
    pub grad_tol: f64,
    pub value_tol: f64,
    pub seed: u64,
    pub mode: Mode,
    pub execution: Execution,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 24,
            max_iters: 500,
            step_init: 1.0,
            grad_tol: 1e-9,
            value_tol: 1e-10,
            seed: 0,
            mode: Mode::Maximize,
            execution: Execution::Parallel,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::BadConfig("restarts must be at least 1".into()));
        }
        for (name, v) in [
            ("step_init", self.step_init),
            ("grad_tol", self.grad_tol),
            ("value_tol", self.value_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::BadConfig(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    fn with_mode(&self, mode: Mode) -> Self {
        Self {
            mode,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationReport {
    pub mode: Mode,
    pub value: f64,
    pub local_unitary: LocalUnitary,
    pub best_restart: usize,
    pub per_restart_values: Vec<f64>,
    pub iterations_used: Vec<usize>,
    /// Whether the best restart met a stopping tolerance.
    pub converged: bool,
    /// Objective value per iteration of the best restart.
    pub trace: Vec<f64>,
    /// `|[rho, W sigma W^H]|_F` at the reported point, for fidelity runs.
    pub commutator_norm: Option<f64>,
}

/// Riemannian gradient `(S1, S2)`.
#[derive(Debug, Clone)]
pub struct TangentGradient {
    pub s1: ComplexMatrix,
    pub s2: ComplexMatrix,
}

impl TangentGradient {
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    fn norm_sqr(&self) -> f64 {
        self.s1.frobenius_norm().powi(2) + self.s2.frobenius_norm().powi(2)
    }

    /// Derivative along the tangent direction `(o1 U1, o2 U2)`.
    pub fn directional(&self, o1: &ComplexMatrix, o2: &ComplexMatrix) -> f64 {
        self.s1.inner(o1).re + self.s2.inner(o2).re
    }
}

fn skew(k: &ComplexMatrix, u: &ComplexMatrix) -> ComplexMatrix {
    let ku = k.matmul(&u.adjoint());
    (&ku - &ku.adjoint()).scale(0.5)
}

/// Factor gradients `(K1, K2)` from the Euclidean gradient `g` at `w`.
fn factor_gradients(g: &ComplexMatrix, w: &LocalUnitary) -> (ComplexMatrix, ComplexMatrix) {
    let (d1, d2) = w.dims();
    let mut k1 = ComplexMatrix::zeros(d1, d1);
    let mut k2 = ComplexMatrix::zeros(d2, d2);
    for i in 0..d1 {
        for j in 0..d1 {
            let mut acc1 = C64::new(0.0, 0.0);
            let cu1 = w.u1[(i, j)].conj();
            for k in 0..d2 {
                for l in 0..d2 {
                    let gv = g[(i * d2 + k, j * d2 + l)];
                    acc1 += gv * w.u2[(k, l)].conj();
                    k2[(k, l)] += gv * cu1;
                }
            }
            k1[(i, j)] = acc1;
        }
    }
    (k1, k2)
}

/// Objective value and Riemannian gradient at `w`.
pub fn riemannian_gradient<O: OrbitObjective + ?Sized>(
    obj: &O,
    w: &LocalUnitary,
) -> Result<(f64, TangentGradient)> {
    let (f, g) = obj.value_and_gradient(w)?;
    let (k1, k2) = factor_gradients(&g, w);
    Ok((
        f,
        TangentGradient {
            s1: skew(&k1, &w.u1),
            s2: skew(&k2, &w.u2),
        },
    ))
}

/// `(1 - eta/2 omega)^-1 (1 + eta/2 omega) u`
pub fn cayley(omega: &ComplexMatrix, eta: f64, u: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = u.rows();
    let id = ComplexMatrix::identity(n);
    let half = omega.scale(0.5 * eta);
    let lhs = &id - &half;
    let rhs = (&id + &half).matmul(u);
    lhs.solve(&rhs, 1e-12).ok_or(Error::SingularRetraction)
}

/// Moves both factors along `(o1 U1, o2 U2)` by `eta`.
pub fn retract(
    w: &LocalUnitary,
    o1: &ComplexMatrix,
    o2: &ComplexMatrix,
    eta: f64,
) -> Result<LocalUnitary> {
    Ok(LocalUnitary {
        u1: cayley(o1, eta, &w.u1)?,
        u2: cayley(o2, eta, &w.u2)?,
    })
}

#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub gradient: TangentGradient,
    pub value_before: f64,
    pub value_after: f64,
    /// Accepted step length; zero if the line search failed.
    pub step: f64,
    pub unitary: LocalUnitary,
}

/// One backtracking step from `w` along `+S` (maximize) or `-S` (minimize),
/// starting at step length `eta`.
pub fn line_search_step<O: OrbitObjective + ?Sized>(
    obj: &O,
    w: &LocalUnitary,
    mode: Mode,
    eta: f64,
) -> Result<StepOutcome> {
    let (f, g) = riemannian_gradient(obj, w)?;
    line_search_from(obj, w, mode, eta, f, &g)
}

fn line_search_from<O: OrbitObjective + ?Sized>(
    obj: &O,
    w: &LocalUnitary,
    mode: Mode,
    eta: f64,
    f: f64,
    g: &TangentGradient,
) -> Result<StepOutcome> {
    let sign = mode.sign();
    let gn2 = g.norm_sqr();
    let mut e = eta;
    for _ in 0..MAX_HALVINGS {
        match retract(w, &g.s1, &g.s2, sign * e) {
            Ok(trial) => {
                let ft = obj.value(&trial)?;
                if sign * (ft - f) >= ARMIJO * e * gn2 && ft.is_finite() {
                    return Ok(StepOutcome {
                        gradient: g.clone(),
                        value_before: f,
                        value_after: ft,
                        step: e,
                        unitary: trial,
                    });
                }
            }
            Err(Error::SingularRetraction) => {}
            Err(other) => return Err(other),
        }
        e *= SHRINK;
    }
    Ok(StepOutcome {
        gradient: g.clone(),
        value_before: f,
        value_after: f,
        step: 0.0,
        unitary: w.clone(),
    })
}

/// One fidelity ascent (maximize) or descent (minimize) step with unit
/// initial step length.
pub fn riemannian_step(
    rho: &ComplexMatrix,
    sigma: &ComplexMatrix,
    dims: (usize, usize),
    w: &LocalUnitary,
    mode: Mode,
) -> Result<StepOutcome> {
    let obj = FidelityObjective::new(rho, sigma, dims)?;
    line_search_step(&obj, w, mode, 1.0)
}

fn random_skew(d: usize, rng: &mut Rng) -> ComplexMatrix {
    let m = ComplexMatrix::from_fn(d, d, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    });
    (&m - &m.adjoint()).scale(0.5)
}

#[derive(Debug, Clone)]
struct RunResult {
    value: f64,
    unitary: LocalUnitary,
    iterations: usize,
    converged: bool,
    trace: Vec<f64>,
}

fn run_from<O: OrbitObjective + ?Sized>(
    obj: &O,
    cfg: &OptimizerConfig,
    start: LocalUnitary,
    rng: &mut Rng,
) -> Result<RunResult> {
    let mode = cfg.mode;
    let sign = mode.sign();
    let (d1, d2) = obj.dims();
    let mut w = start;
    let (mut f, mut g) = riemannian_gradient(obj, &w)?;
    let mut best = (f, w.clone());
    let mut trace = vec![f];
    let mut eta = cfg.step_init;
    let mut perturbations = 0;
    let mut small = 0;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < cfg.max_iters {
        if g.norm() <= cfg.grad_tol {
            converged = true;
            break;
        }
        iterations += 1;
        let out = line_search_from(obj, &w, mode, eta, f, &g)?;
        if out.step > 0.0 {
            let gain = sign * (out.value_after - f);
            w = out.unitary;
            (f, g) = riemannian_gradient(obj, &w)?;
            eta = (out.step * GROW).min(MAX_STEP);
            if gain <= cfg.value_tol * f.abs().max(f64::MIN_POSITIVE) {
                small += 1;
                if small >= STALL_STEPS {
                    converged = true;
                }
            } else {
                small = 0;
            }
        } else {
            // No resolvable ascent direction: a kink of the trace norm or a
            // point stationary to working precision. Nudge and retry.
            if perturbations == MAX_PERTURBATIONS {
                converged = true;
            } else {
                perturbations += 1;
                let mut o1 = random_skew(d1, rng);
                let mut o2 = random_skew(d2, rng);
                let norm = (o1.frobenius_norm().powi(2) + o2.frobenius_norm().powi(2)).sqrt();
                if norm > 0.0 {
                    o1 = o1.scale(PERTURBATION / norm);
                    o2 = o2.scale(PERTURBATION / norm);
                }
                w = retract(&w, &o1, &o2, 1.0)?;
                (f, g) = riemannian_gradient(obj, &w)?;
                eta = cfg.step_init;
                small = 0;
            }
        }
        if sign * (f - best.0) > 0.0 {
            best = (f, w.clone());
        }
        trace.push(f);
        if converged {
            break;
        }
    }
    Ok(RunResult {
        value: best.0,
        unitary: best.1,
        iterations,
        converged,
        trace,
    })
}

/// Multi-start optimization of `obj` in `cfg.mode`. Restart `k` starts at
/// `starts[k]` when present and at a Haar-random point drawn from stream
/// `k` of `cfg.seed` otherwise.
pub fn optimize<O: OrbitObjective + ?Sized>(
    obj: &O,
    cfg: &OptimizerConfig,
    starts: &[LocalUnitary],
) -> Result<OptimizationReport> {
    cfg.validate()?;
    let (d1, d2) = obj.dims();
    for s in starts {
        if s.dims() != (d1, d2) {
            return Err(Error::DimensionMismatch("start point has wrong dimensions".into()));
        }
    }
    let runs = map_indexed(cfg.restarts, cfg.execution, |k| {
        let mut rng = rng::stream(cfg.seed, k as u64);
        let start = match starts.get(k) {
            Some(s) => s.clone(),
            None => LocalUnitary::haar(d1, d2, &mut rng),
        };
        run_from(obj, cfg, start, &mut rng)
    });
    let runs: Vec<RunResult> = runs.into_iter().collect::<Result<_>>()?;
    let mut best = 0;
    for (k, r) in runs.iter().enumerate() {
        if cfg.mode.better(r.value, runs[best].value) {
            best = k;
        }
    }
    let per_restart_values = runs.iter().map(|r| r.value).collect();
    let iterations_used = runs.iter().map(|r| r.iterations).collect();
    let b = runs.into_iter().nth(best).expect("restarts >= 1");
    Ok(OptimizationReport {
        mode: cfg.mode,
        value: b.value,
        local_unitary: b.unitary,
        best_restart: best,
        per_restart_values,
        iterations_used,
        converged: b.converged,
        trace: b.trace,
        commutator_norm: None,
    })
}

fn top_eigenvector(m: &ComplexMatrix) -> Result<Vec<C64>> {
    Ok(psd_eig(m)?.eigenvectors.column(0))
}

/// Local unitary taking the Schmidt basis of `from` onto that of `to`,
/// pairing coefficients in descending order. With `shift` the second
/// factor is cyclically offset so that `W|from>` is orthogonal to `|to>`.
pub fn schmidt_alignment(from: &PureState, to: &PureState, shift: bool) -> LocalUnitary {
    let (_, d2) = from.dims();
    let sf = from.schmidt();
    let st = to.schmidt();
    let u1 = st.left.matmul(&sf.left.adjoint());
    let target2 = if shift {
        ComplexMatrix::from_fn(d2, d2, |i, j| st.right[(i, (j + 1) % d2)])
    } else {
        st.right.clone()
    };
    let u2 = target2.matmul(&sf.right.adjoint());
    LocalUnitary { u1, u2 }
}

/// Local unitary mapping the eigenbases of the reduced states of `sigma`
/// onto those of `rho` (descending to descending, or to ascending with
/// `reverse`).
fn reduced_alignment(
    rho: &ComplexMatrix,
    sigma: &ComplexMatrix,
    (d1, d2): (usize, usize),
    reverse: bool,
) -> Result<LocalUnitary> {
    let mut us = Vec::with_capacity(2);
    for (keep, d) in [(Subsystem::First, d1), (Subsystem::Second, d2)] {
        let traced = match keep {
            Subsystem::First => Subsystem::Second,
            Subsystem::Second => Subsystem::First,
        };
        let r = psd_eig(&crate::linalg::partial_trace(rho, d1, d2, traced)?)?.eigenvectors;
        let s = psd_eig(&crate::linalg::partial_trace(sigma, d1, d2, traced)?)?.eigenvectors;
        let r = if reverse {
            ComplexMatrix::from_fn(d, d, |i, j| r[(i, d - 1 - j)])
        } else {
            r
        };
        us.push(r.matmul(&s.adjoint()));
    }
    let u2 = us.pop().expect("two factors");
    let u1 = us.pop().expect("two factors");
    Ok(LocalUnitary { u1, u2 })
}

/// Deterministic starting points: identity, the Schmidt alignment of the
/// leading eigenvectors, and the alignment of reduced-state eigenbases.
fn default_starts(
    rho: &ComplexMatrix,
    sigma: &ComplexMatrix,
    (d1, d2): (usize, usize),
    mode: Mode,
) -> Result<Vec<LocalUnitary>> {
    let mut starts = vec![LocalUnitary::identity(d1, d2)];
    let vr = top_eigenvector(rho)?;
    let vs = top_eigenvector(sigma)?;
    let pr = PureState::normalized(vr, d1, d2);
    let ps = PureState::normalized(vs, d1, d2);
    if let (Ok(pr), Ok(ps)) = (pr, ps) {
        let shift = mode == Mode::Minimize && d2 >= 2;
        starts.push(schmidt_alignment(&ps, &pr, shift));
    }
    starts.push(reduced_alignment(rho, sigma, (d1, d2), mode == Mode::Minimize)?);
    Ok(starts)
}

fn extremize(
    rho: &ComplexMatrix,
    sigma: &ComplexMatrix,
    dims: (usize, usize),
    cfg: &OptimizerConfig,
    mode: Mode,
    extra_starts: &[LocalUnitary],
) -> Result<OptimizationReport> {
    let obj = FidelityObjective::new(rho, sigma, dims)?;
    let mut starts = default_starts(rho, sigma, dims, mode)?;
    starts.extend_from_slice(extra_starts);
    let mut rep = optimize(&obj, &cfg.with_mode(mode), &starts)?;
    let tau = conjugate(&rep.local_unitary, sigma);
    rep.commutator_norm = Some(commutator(rho, &tau).frobenius_norm());
    Ok(rep)
}

/// `G_max(rho, sigma) = max_W F(rho, W sigma W^H)`. Inputs are PSD of
/// order `d1 d2` and need not have unit trace.
pub fn gmax(
    rho: &ComplexMatrix,
    sigma: &ComplexMatrix,
    dims: (usize, usize),
    cfg: &OptimizerConfig,
) -> Result<OptimizationReport> {
    extremize(rho, sigma, dims, cfg, Mode::Maximize, &[])
}

/// `G_min(rho, sigma) = min_W F(rho, W sigma W^H)`.
pub fn gmin(
    rho: &ComplexMatrix,
    sigma: &ComplexMatrix,
    dims: (usize, usize),
    cfg: &OptimizerConfig,
) -> Result<OptimizationReport> {
    extremize(rho, sigma, dims, cfg, Mode::Minimize, &[])
}

/// [`gmax`] with additional deterministic starting points, tried after the
/// built-in ones.
pub fn gmax_with_starts(
    rho: &ComplexMatrix,
    sigma: &ComplexMatrix,
    dims: (usize, usize),
    cfg: &OptimizerConfig,
    extra: &[LocalUnitary],
) -> Result<OptimizationReport> {
    extremize(rho, sigma, dims, cfg, Mode::Maximize, extra)
}

/// Convenience wrappers on density matrices.
pub fn gmax_states(rho: &DensityMatrix, sigma: &DensityMatrix, cfg: &OptimizerConfig) -> Result<OptimizationReport> {
    same_dims(rho, sigma)?;
    gmax(rho.matrix(), sigma.matrix(), rho.dims(), cfg)
}

pub fn gmin_states(rho: &DensityMatrix, sigma: &DensityMatrix, cfg: &OptimizerConfig) -> Result<OptimizationReport> {
    same_dims(rho, sigma)?;
    gmin(rho.matrix(), sigma.matrix(), rho.dims(), cfg)
}

pub(crate) fn same_dims(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dims() != sigma.dims() {
        return Err(Error::DimensionMismatch(format!(
            "states have dims {:?} and {:?}",
            rho.dims(),
            sigma.dims()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests;
