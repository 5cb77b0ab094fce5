//! Analytic bounds on the extremal fidelities and the inequalities relating
//! them, each returned as a checkable [`BoundReport`].

use serde::{Deserialize, Serialize};

use crate::closed_form::global_unitary_extrema;
use crate::error::{Error, Result};
use crate::fidelity::{affine_fidelity, fidelity, relative_entropy};
use crate::linalg::{
    matrix_sqrt, psd_eig, rank_psd, singular_values, trace_sqrt, unitary_generator, unitary_power,
    ComplexMatrix, Subsystem,
};
use crate::orbit_opt::{self, conjugate, OptimizationReport, OptimizerConfig};
use crate::states::{DensityMatrix, LocalUnitary};

/// A bound is violated when its slack drops below this.
pub const SLACK_TOL: f64 = 1e-8;
/// Eigenvalues above this count towards the rank.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Witness {
    Local(LocalUnitary),
    Global(ComplexMatrix),
}

/// One inequality `lhs <= rhs` inside a composite check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundPart {
    pub name: String,
    pub value: f64,
    /// False for quantities reported for information only.
    pub sound: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    /// The quantity being bounded, once checked.
    pub value: Option<f64>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub witness: Option<Witness>,
    pub satisfied: bool,
    /// `min(value - lower, upper - value)`; zero until checked.
    pub slack: f64,
    pub parts: Vec<BoundPart>,
    pub notes: Vec<String>,
}

impl BoundReport {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            value: None,
            lower: None,
            upper: None,
            witness: None,
            satisfied: true,
            slack: 0.0,
            parts: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Records `value` and whether it lies within the bounds.
    pub fn check_against(mut self, value: f64) -> Self {
        let mut slack = f64::INFINITY;
        if let Some(l) = self.lower {
            slack = slack.min(value - l);
        }
        if let Some(u) = self.upper {
            slack = slack.min(u - value);
        }
        if !slack.is_finite() {
            slack = 0.0;
        }
        self.value = Some(value);
        self.slack = slack;
        self.satisfied = slack >= -SLACK_TOL;
        self
    }

    fn with_slack(mut self, slack: f64) -> Self {
        self.slack = slack;
        self.satisfied = slack >= -SLACK_TOL;
        self
    }
}

fn same_dims(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dims() != sigma.dims() {
        return Err(Error::DimensionMismatch(format!(
            "states have dims {:?} and {:?}",
            rho.dims(),
            sigma.dims()
        )));
    }
    Ok(())
}

fn rank(m: &ComplexMatrix) -> Result<usize> {
    Ok(rank_psd(&psd_eig(m)?, RANK_TOL))
}

/// `rank(rho) >= gmax^2 + (d1 d2 - 1) gmin^2 >= 1`, where `gmax` is taken
/// against `sigma` and `gmin` against its complement
/// `(1 - sigma) / (d1 d2 - 1)`.
pub fn prop1_check(rho: &DensityMatrix, sigma: &DensityMatrix, gmax_val: f64, gmin_val: f64) -> Result<BoundReport> {
    same_dims(rho, sigma)?;
    let n = rho.order() as f64;
    let r = rank(rho.matrix())? as f64;
    let middle = gmax_val * gmax_val + (n - 1.0) * gmin_val * gmin_val;
    let mut rep = BoundReport::new("prop1");
    rep.lower = Some(1.0);
    rep.upper = Some(r);
    rep.parts = vec![
        BoundPart { name: "rank - middle".into(), value: r - middle, sound: true },
        BoundPart { name: "middle - 1".into(), value: middle - 1.0, sound: true },
    ];
    rep.notes.push(format!("rank(rho) = {r}"));
    Ok(rep.check_against(middle))
}

/// The three inequalities between `G_max(rho, sigma)`, `G_min(rho, sigma')`
/// and `F(sigma_hat, sigma_hat')`, evaluated at the optimizers' witnesses
/// `sigma_hat = W sigma W^H` and `sigma_hat' = V sigma' V^H`.
pub fn prop2_check(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    gmax_report: Option<&OptimizationReport>,
    gmin_complement_report: Option<&OptimizationReport>,
) -> Result<BoundReport> {
    same_dims(rho, sigma)?;
    let w = gmax_report
        .ok_or_else(|| Error::MissingWitness("G_max report".into()))?
        .local_unitary
        .clone();
    let v = gmin_complement_report
        .ok_or_else(|| Error::MissingWitness("G_min report against the complement".into()))?
        .local_unitary
        .clone();
    if w.dims() != rho.dims() || v.dims() != rho.dims() {
        return Err(Error::MissingWitness("witness dimensions do not match the states".into()));
    }
    let comp = sigma.complement()?;
    let s_hat = conjugate(&w, sigma.matrix());
    let s_hat_c = conjugate(&v, comp.matrix());
    let gmax = fidelity(rho.matrix(), &s_hat)?;
    let gmin = fidelity(rho.matrix(), &s_hat_c)?;
    let f = fidelity(&s_hat, &s_hat_c)?.min(1.0);
    let sine = (1.0 - f * f).max(0.0).sqrt();
    let parts = vec![
        BoundPart {
            name: "sqrt(2 + 2F) - (gmax + gmin)".into(),
            value: (2.0 + 2.0 * f).sqrt() - (gmax + gmin),
            sound: true,
        },
        BoundPart {
            name: "sqrt(1 - F^2) - |gmax^2 - gmin^2|".into(),
            value: sine - (gmax * gmax - gmin * gmin).abs(),
            sound: true,
        },
        BoundPart {
            name: "sqrt(1 - F^2) - |gmax - gmin|".into(),
            value: sine - (gmax - gmin).abs(),
            sound: true,
        },
    ];
    let slack = parts.iter().map(|p| p.value).fold(f64::INFINITY, f64::min);
    let mut rep = BoundReport::new("prop2");
    rep.value = Some(f);
    rep.witness = Some(Witness::Local(w));
    rep.notes.push(format!("gmax = {gmax}, gmin(sigma') = {gmin}, F(sigma_hat, sigma_hat') = {f}"));
    rep.parts = parts;
    Ok(rep.with_slack(slack))
}

/// Minimum of the global-unitary maxima on the two marginals and on the
/// full state.
pub fn gmax_upper_bound(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<BoundReport> {
    same_dims(rho, sigma)?;
    let spec = |m: &ComplexMatrix| -> Result<Vec<f64>> { Ok(psd_eig(m)?.eigenvalues) };
    let mut parts = Vec::new();
    for (name, a, b) in [
        ("first marginal", rho.reduced(Subsystem::First), sigma.reduced(Subsystem::First)),
        ("second marginal", rho.reduced(Subsystem::Second), sigma.reduced(Subsystem::Second)),
        ("global", rho.matrix().clone(), sigma.matrix().clone()),
    ] {
        let (fmax, _) = global_unitary_extrema(&normalize(spec(&a)?), &normalize(spec(&b)?))?;
        parts.push(BoundPart { name: name.into(), value: fmax, sound: true });
    }
    let mut rep = BoundReport::new("gmax_upper");
    rep.upper = Some(parts.iter().map(|p| p.value).fold(f64::INFINITY, f64::min));
    rep.parts = parts;
    Ok(rep)
}

/// Rescales a spectrum to unit sum, absorbing roundoff in traces.
fn normalize(mut v: Vec<f64>) -> Vec<f64> {
    let s: f64 = v.iter().sum();
    if s > 0.0 {
        v.iter_mut().for_each(|x| *x /= s);
    }
    v
}

/// `max(Tr sqrt(rho) Tr sqrt(sigma) / (d1 d2), exp(-S/2))`, the second term
/// present when a relative entropy `S(rho || W sigma W^H)` at some local
/// unitary `W` is supplied. Any `W` gives a valid bound.
pub fn gmax_lower_bound(rho: &DensityMatrix, sigma: &DensityMatrix, rel_entropy_min: Option<f64>) -> Result<BoundReport> {
    same_dims(rho, sigma)?;
    let n = rho.order() as f64;
    let haar = trace_sqrt(rho.matrix())? * trace_sqrt(sigma.matrix())? / n;
    let mut rep = BoundReport::new("gmax_lower");
    rep.parts.push(BoundPart { name: "haar average of affine fidelity".into(), value: haar, sound: true });
    let mut lower = haar;
    match rel_entropy_min {
        Some(s) if s.is_finite() => {
            let b = (-0.5 * s).exp();
            rep.parts.push(BoundPart { name: "relative entropy".into(), value: b, sound: true });
            lower = lower.max(b);
        }
        Some(_) => rep.notes.push("relative entropy infinite at the supplied point".into()),
        None => rep.notes.push("relative entropy term not evaluated".into()),
    }
    rep.lower = Some(lower);
    Ok(rep)
}

/// `S(rho || W sigma W^H)`
pub fn relative_entropy_at(rho: &DensityMatrix, sigma: &DensityMatrix, w: &LocalUnitary) -> Result<f64> {
    relative_entropy(rho.matrix(), &conjugate(w, sigma.matrix()))
}

/// `min(Tr sqrt(rho), Tr sqrt(sigma)) / sqrt(d1 d2)`
pub fn gmin_upper_bound(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<BoundReport> {
    same_dims(rho, sigma)?;
    let n = rho.order() as f64;
    let a = trace_sqrt(rho.matrix())?;
    let b = trace_sqrt(sigma.matrix())?;
    let mut rep = BoundReport::new("gmin_upper");
    rep.upper = Some(a.min(b) / n.sqrt());
    rep.parts = vec![
        BoundPart { name: "Tr sqrt(rho) / sqrt(d1 d2)".into(), value: a / n.sqrt(), sound: true },
        BoundPart { name: "Tr sqrt(sigma) / sqrt(d1 d2)".into(), value: b / n.sqrt(), sound: true },
    ];
    Ok(rep)
}

/// `Tr sqrt(a) exp(1/2 sum_j lambda_j^down(a) log lambda_j^up(b))`
fn spectral_branch(a: &[f64], b: &[f64]) -> f64 {
    let mut up = b.to_vec();
    up.sort_by(|x, y| x.total_cmp(y));
    let mut down = a.to_vec();
    down.sort_by(|x, y| y.total_cmp(x));
    let tr_sqrt: f64 = down.iter().map(|x| x.sqrt()).sum();
    let e: f64 = down.iter().zip(&up).map(|(l, m)| l * m.ln()).sum();
    tr_sqrt * (0.5 * e).exp()
}

/// Spectral lower bounds. The two spectral branches need full-rank inputs.
/// The relative entropy branch `exp(-S_max / 2)` is sound when `S_max` is
/// the global-unitary maximum `-S(rho) - sum_j lambda_j^down(rho) log
/// lambda_j^up(sigma)`, available for full-rank `sigma`. A value supplied as
/// `rel_entropy_max` is a numerical estimate of the local maximum, so it is
/// reported for information only.
pub fn gmin_lower_bound(rho: &DensityMatrix, sigma: &DensityMatrix, rel_entropy_max: Option<f64>) -> Result<BoundReport> {
    same_dims(rho, sigma)?;
    let er = psd_eig(rho.matrix())?;
    let es = psd_eig(sigma.matrix())?;
    let full = |e: &crate::linalg::HermitianEig| e.min_eigenvalue() > RANK_TOL;
    let mut rep = BoundReport::new("gmin_lower");
    let mut lower: Option<f64> = None;
    if full(&er) && full(&es) {
        let a = spectral_branch(&er.eigenvalues, &es.eigenvalues);
        let b = spectral_branch(&es.eigenvalues, &er.eigenvalues);
        rep.parts.push(BoundPart { name: "spectral (rho, sigma)".into(), value: a, sound: true });
        rep.parts.push(BoundPart { name: "spectral (sigma, rho)".into(), value: b, sound: true });
        lower = Some(a.max(b));
    } else {
        rep.notes.push("spectral branches need full-rank inputs; skipped".into());
    }
    if full(&es) {
        let entropy: f64 = er.eigenvalues.iter().filter(|&&l| l > 0.0).map(|l| -l * l.ln()).sum();
        let mut up = es.eigenvalues.clone();
        up.sort_by(|x, y| x.total_cmp(y));
        let mut down = er.eigenvalues.clone();
        down.sort_by(|x, y| y.total_cmp(x));
        let cross: f64 = down.iter().zip(&up).map(|(l, m)| l * m.ln()).sum();
        let c = (0.5 * (entropy + cross)).exp();
        rep.parts.push(BoundPart { name: "relative entropy, global maximum".into(), value: c, sound: true });
        lower = Some(lower.map_or(c, |l| l.max(c)));
    } else {
        rep.notes.push("global relative entropy maximum is infinite for rank-deficient sigma".into());
    }
    if let Some(s) = rel_entropy_max {
        let c = if s.is_finite() { (-0.5 * s).exp() } else { 0.0 };
        rep.parts.push(BoundPart { name: "relative entropy, local estimate".into(), value: c, sound: false });
        rep.notes.push("local relative entropy estimate is unsound as a bound".into());
    }
    rep.lower = lower;
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineMatch {
    pub u0: ComplexMatrix,
    pub achieved: f64,
    pub fidelity: f64,
    /// Path parameter of `u0` on `s -> exp(i s H)`, `exp(i H) = U*`.
    pub path_parameter: f64,
    pub bisection_steps: usize,
}

/// Unitary `u0` with `A(rho, u0 sigma u0^H) = F(rho, sigma)`.
///
/// `g(U) = A(rho, U sigma U^H)` satisfies `g(1) <= F`, and at the
/// eigenbasis-aligning `U*` it reaches `sum_j sqrt(l_j m_j) >= F`. Bisection
/// on the path `exp(i s H)` between them locates a crossing.
pub fn find_affine_matching_unitary(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<AffineMatch> {
    rho.ensure_square("rho")?;
    sigma.ensure_square("sigma")?;
    if rho.rows() != sigma.rows() {
        return Err(Error::DimensionMismatch(format!(
            "orders {} and {} differ",
            rho.rows(),
            sigma.rows()
        )));
    }
    const TOL: f64 = 1e-11;
    const MAX_STEPS: usize = 200;
    let f = fidelity(rho, sigma)?;
    let sr = matrix_sqrt(rho)?;
    let ss = matrix_sqrt(sigma)?;
    let g = |u: &ComplexMatrix| sr.trace_of_product(&u.matmul(&ss).matmul(&u.adjoint())).re;
    let n = rho.rows();
    let id = ComplexMatrix::identity(n);
    let g0 = g(&id);
    if (g0 - f).abs() < TOL {
        return Ok(AffineMatch { u0: id, achieved: g0, fidelity: f, path_parameter: 0.0, bisection_steps: 0 });
    }
    let vr = psd_eig(rho)?.eigenvectors;
    let vs = psd_eig(sigma)?.eigenvectors;
    let u_star = vr.matmul(&vs.adjoint());
    let gen = unitary_generator(&u_star)?;
    let path = |s: f64| unitary_power(&gen, s);
    let g1 = g(&path(1.0));
    if g1 < f - 1e-9 {
        return Err(Error::NoConvergence(format!(
            "aligned affine fidelity {g1} below fidelity {f}"
        )));
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut best = (1.0, g1);
    for step in 1..=MAX_STEPS {
        let mid = 0.5 * (lo + hi);
        let gm = g(&path(mid));
        if (gm - f).abs() < (best.1 - f).abs() {
            best = (mid, gm);
        }
        if (gm - f).abs() < TOL {
            return Ok(AffineMatch { u0: path(mid), achieved: gm, fidelity: f, path_parameter: mid, bisection_steps: step });
        }
        if gm < f {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    if (best.1 - f).abs() < 1e-9 {
        let (s, a) = best;
        return Ok(AffineMatch { u0: path(s), achieved: a, fidelity: f, path_parameter: s, bisection_steps: MAX_STEPS });
    }
    Err(Error::NoConvergence(format!(
        "bisection ended at |A - F| = {:.3e}",
        (best.1 - f).abs()
    )))
}

/// `(sqrt(rank X Tr X), Tr sqrt X, sqrt(Tr X))`, nonincreasing for PSD `X`.
pub fn rank_trace_chain(x: &ComplexMatrix) -> Result<(f64, f64, f64)> {
    let e = psd_eig(x)?;
    let r = rank_psd(&e, RANK_TOL * e.max_eigenvalue().max(f64::MIN_POSITIVE)) as f64;
    let tr: f64 = e.eigenvalues.iter().sum();
    let ts: f64 = e.eigenvalues.iter().map(|l| l.sqrt()).sum();
    Ok(((r * tr).sqrt(), ts, tr.sqrt()))
}

/// `(sqrt(rank(A^1/2 B^1/2) Tr AB), F(A, B), sqrt(Tr AB))`, nonincreasing
/// for PSD `A`, `B`.
pub fn product_trace_chain(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<(f64, f64, f64)> {
    let p = matrix_sqrt(a)?.matmul(&matrix_sqrt(b)?);
    let sv = singular_values(&p)?;
    let top = sv.first().copied().unwrap_or(0.0);
    let r = sv.iter().filter(|&&s| s > RANK_TOL * top.max(f64::MIN_POSITIVE)).count() as f64;
    let tab = a.trace_of_product(b).re.max(0.0);
    let f = sv.iter().sum();
    Ok(((r * tab).sqrt(), f, tab.sqrt()))
}

/// Every bound for one pair of states, checked against optimizer values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundSuite {
    pub gmax: OptimizationReport,
    pub gmin: OptimizationReport,
    pub gmin_complement: OptimizationReport,
    pub reports: Vec<BoundReport>,
}

impl BoundSuite {
    pub fn all_satisfied(&self) -> bool {
        self.reports.iter().all(|r| r.satisfied)
    }
}

pub fn bound_suite(rho: &DensityMatrix, sigma: &DensityMatrix, cfg: &OptimizerConfig) -> Result<BoundSuite> {
    same_dims(rho, sigma)?;
    let gmax = orbit_opt::gmax_states(rho, sigma, cfg)?;
    let gmin = orbit_opt::gmin_states(rho, sigma, cfg)?;
    let comp = sigma.complement()?;
    let gmin_c = orbit_opt::gmin_states(rho, &comp, cfg)?;

    let s_min = relative_entropy_at(rho, sigma, &gmax.local_unitary)?;
    let s_max = relative_entropy_at(rho, sigma, &gmin.local_unitary)?;
    let mut reports = vec![
        gmax_upper_bound(rho, sigma)?.check_against(gmax.value),
        gmax_lower_bound(rho, sigma, Some(s_min))?.check_against(gmax.value),
        gmin_upper_bound(rho, sigma)?.check_against(gmin.value),
        gmin_lower_bound(rho, sigma, Some(s_max))?.check_against(gmin.value),
        prop1_check(rho, sigma, gmax.value, gmin_c.value)?,
        prop2_check(rho, sigma, Some(&gmax), Some(&gmin_c))?,
    ];
    reports[1].witness = Some(Witness::Local(gmax.local_unitary.clone()));
    reports[3].witness = Some(Witness::Local(gmin.local_unitary.clone()));
    Ok(BoundSuite { gmax, gmin, gmin_complement: gmin_c, reports })
}

/// `A(rho, sigma)` at the eigenbasis-aligning unitary, which dominates
/// `F(rho, sigma)`.
pub fn aligned_affine_fidelity(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    let vr = psd_eig(rho)?.eigenvectors;
    let vs = psd_eig(sigma)?.eigenvectors;
    let u = vr.matmul(&vs.adjoint());
    affine_fidelity(rho, &u.matmul(sigma).matmul(&u.adjoint()).hermitian_part())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::testing::random_psd;
    use crate::rng;
    use crate::states::{random_density, random_pure, PureState};

    fn quick() -> OptimizerConfig {
        OptimizerConfig {
            restarts: 8,
            ..OptimizerConfig::default()
        }
    }

    #[test]
    fn maximally_mixed_bounds_are_tight() {
        let m = DensityMatrix::maximally_mixed(2, 2);
        let gl = gmax_lower_bound(&m, &m, None).unwrap();
        assert!((gl.lower.unwrap() - 1.0).abs() < 1e-12);
        let gu = gmax_upper_bound(&m, &m).unwrap();
        assert!((gu.upper.unwrap() - 1.0).abs() < 1e-12);
        let mu = gmin_upper_bound(&m, &m).unwrap();
        assert!((mu.upper.unwrap() - 1.0).abs() < 1e-12);
        let ml = gmin_lower_bound(&m, &m, None).unwrap();
        assert!((ml.lower.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_pair_bounds() {
        let mut r = rng::stream(1, 0);
        let a = random_pure(2, 3, &mut r).to_density();
        let b = random_pure(2, 3, &mut r).to_density();
        let gl = gmax_lower_bound(&a, &b, None).unwrap();
        assert!((gl.lower.unwrap() - 1.0 / 6.0).abs() < 1e-10);
        let mu = gmin_upper_bound(&a, &b).unwrap();
        assert!((mu.upper.unwrap() - 1.0 / 6f64.sqrt()).abs() < 1e-10);
        let ml = gmin_lower_bound(&a, &b, None).unwrap();
        assert!(ml.lower.is_none() && ml.notes.len() == 2);
    }

    #[test]
    fn global_bound_equals_pure_closed_form() {
        let mut r = rng::stream(2, 0);
        let a = random_pure(3, 3, &mut r);
        let b = random_pure(3, 3, &mut r);
        let u = gmax_upper_bound(&a.to_density(), &b.to_density()).unwrap();
        let sa = a.schmidt().reduced_spectrum();
        let sb = b.schmidt().reduced_spectrum();
        let want: f64 = sa.iter().zip(&sb).map(|(x, y)| (x * y).sqrt()).sum();
        // the marginal bounds coincide with the global one for pure states
        assert!((u.upper.unwrap() - want).abs() < 1e-9);
    }

    #[test]
    fn global_entropy_branch_needs_only_full_rank_sigma() {
        let mut r = rng::stream(5, 0);
        let a = random_pure(2, 2, &mut r).to_density();
        let m = DensityMatrix::maximally_mixed(2, 2);
        // S(pure || 1/4) = log 4 for every unitary, so the bound is exactly 1/2
        let rep = gmin_lower_bound(&a, &m, None).unwrap();
        assert!((rep.lower.unwrap() - 0.5).abs() < 1e-12);
        let g = orbit_opt::gmin_states(&a, &m, &quick()).unwrap().value;
        assert!((g - 0.5).abs() < 1e-10);
    }

    #[test]
    fn check_against_slack() {
        let mut rep = BoundReport::new("t");
        rep.lower = Some(0.2);
        rep.upper = Some(0.5);
        let ok = rep.clone().check_against(0.3);
        assert!(ok.satisfied && (ok.slack - 0.1).abs() < 1e-15);
        let bad = rep.check_against(0.6);
        assert!(!bad.satisfied);
    }

    #[test]
    fn prop1_examples() {
        let p = PureState::basis(2, 2, 0, 0).unwrap().to_density();
        let rep = prop1_check(&p, &p, 1.0, 0.0).unwrap();
        assert!(rep.satisfied && rep.slack.abs() < 1e-12);
        let cfg = quick();
        let m = DensityMatrix::maximally_mixed(2, 2);
        let s = random_density(2, 2, 4, 3).unwrap();
        let hi = orbit_opt::gmax_states(&m, &s, &cfg).unwrap();
        let lo = orbit_opt::gmin_states(&m, &s.complement().unwrap(), &cfg).unwrap();
        let rep = prop1_check(&m, &s, hi.value, lo.value).unwrap();
        assert!(rep.satisfied && rep.upper == Some(4.0));
    }

    #[test]
    fn prop2_needs_witnesses() {
        let m = DensityMatrix::maximally_mixed(2, 2);
        assert!(matches!(prop2_check(&m, &m, None, None), Err(Error::MissingWitness(_))));
    }

    #[test]
    fn suite_on_random_pairs() {
        for seed in 0..3 {
            let a = random_density(2, 2, 4, 10 + seed).unwrap();
            let b = random_density(2, 2, 2 + seed as usize, 20 + seed).unwrap();
            let s = bound_suite(&a, &b, &quick()).unwrap();
            for r in &s.reports {
                assert!(r.satisfied, "{}: slack {}", r.name, r.slack);
            }
            let json = serde_json::to_string(&s.reports).unwrap();
            assert!(json.contains("gmax_upper"));
        }
    }

    #[test]
    fn affine_matching_examples() {
        let a = ComplexMatrix::from_real_diag(&[0.6, 0.4]);
        let b = ComplexMatrix::from_real_diag(&[0.3, 0.7]);
        let m = find_affine_matching_unitary(&a, &b).unwrap();
        assert_eq!(m.path_parameter, 0.0);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let zero = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        let plus = ComplexMatrix::from_fn(2, 2, |_, _| crate::linalg::C64::new(0.5, 0.0));
        let m = find_affine_matching_unitary(&zero, &plus).unwrap();
        assert!((m.fidelity - h).abs() < 1e-12);
        let got = affine_fidelity(&zero, &m.u0.matmul(&plus).matmul(&m.u0.adjoint())).unwrap();
        assert!((got - m.fidelity).abs() < 1e-8);

        for seed in 0..10 {
            let a = random_density(1, 3, 3, 30 + seed).unwrap();
            let b = random_density(1, 3, 3, 40 + seed).unwrap();
            let m = find_affine_matching_unitary(a.matrix(), b.matrix()).unwrap();
            assert!((m.achieved - m.fidelity).abs() < 1e-8);
            assert!(m.u0.unitarity_error() < 1e-10);
            let f = fidelity(a.matrix(), b.matrix()).unwrap();
            assert!(aligned_affine_fidelity(a.matrix(), b.matrix()).unwrap() >= f - 1e-12);
        }
    }

    #[test]
    fn appendix_chains() {
        for seed in 0..30 {
            let n = 2 + seed as usize % 5;
            let x = random_psd(n, 300 + seed);
            let (hi, mid, lo) = rank_trace_chain(&x).unwrap();
            assert!(hi >= mid - 1e-12 && mid >= lo - 1e-12);
            let y = random_psd(n, 400 + seed);
            let (hi, mid, lo) = product_trace_chain(&x, &y).unwrap();
            assert!(hi >= mid - 1e-12 && mid >= lo - 1e-12);
        }
        let flat = ComplexMatrix::identity(4).scale(0.25);
        let (hi, mid, _) = rank_trace_chain(&flat).unwrap();
        assert!((hi - mid).abs() < 1e-12);
        let v = [crate::linalg::C64::new(0.6, 0.0), crate::linalg::C64::new(0.0, 0.8)];
        let one = ComplexMatrix::outer(&v, &v);
        let (hi, mid, lo) = rank_trace_chain(&one).unwrap();
        assert!((hi - mid).abs() < 1e-12 && (mid - lo).abs() < 1e-12);
    }
}
