//! Analytic values of extremal fidelities.

use crate::error::{Error, Result};
use crate::orbit_opt::{self, OptimizerConfig};
use crate::states::{max_entangled, DensityMatrix};

const SPECTRUM_TOL: f64 = 1e-10;

/// Spectrum of a reduced state of a pure bipartite state: the squared
/// Schmidt coefficients, nonnegative, summing to one, kept descending.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtSpectrum {
    values: Vec<f64>,
}

impl SchmidtSpectrum {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        check_spectrum(&values)?;
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { values })
    }

    /// From Schmidt coefficients `c_j` (whose squares sum to one).
    pub fn from_coefficients(coefficients: &[f64]) -> Result<Self> {
        Self::new(coefficients.iter().map(|c| c * c).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

fn check_spectrum(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::BadSpectrum("empty spectrum".into()));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < -SPECTRUM_TOL) {
        return Err(Error::BadSpectrum(format!("entry {v} is negative or not finite")));
    }
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > SPECTRUM_TOL {
        return Err(Error::BadSpectrum(format!("entries sum to {sum}, not 1")));
    }
    Ok(())
}

fn sorted_desc(v: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = v.iter().map(|x| x.max(0.0)).collect();
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

/// `sum_j sqrt(a_j b_j)` over descending spectra, the shorter one padded
/// with zeros.
pub fn gmax_pure_pure(a: &SchmidtSpectrum, b: &SchmidtSpectrum) -> f64 {
    a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x * y).sqrt())
        .sum::<f64>()
        .min(1.0)
}

/// Minimal fidelity between the local-unitary orbits of two pure states.
pub fn gmin_pure_pure(d1: usize, d2: usize) -> Result<f64> {
    if d1 < 2 || d2 < 2 {
        return Err(Error::BadParameter(format!(
            "both local dimensions must be at least 2, got ({d1},{d2})"
        )));
    }
    Ok(0.0)
}

fn check_werner(d: usize, t: f64) -> Result<()> {
    if d < 2 || !(-1.0..=1.0).contains(&t) {
        return Err(Error::BadParameter(format!("werner needs d >= 2 and t in [-1,1], got d={d}, t={t}")));
    }
    Ok(())
}

/// Maximal fidelity between the Werner state `sigma(t)` and a pure product state.
pub fn gmax_werner_vs_pure_product(d: usize, t: f64) -> Result<f64> {
    check_werner(d, t)?;
    let d = d as f64;
    Ok(((1.0 + (-t).max(0.0)) / (d * (d - t))).sqrt())
}

/// `(G_max, G_min)` between the isotropic state and a pure product state.
pub fn iso_extrema_vs_pure_product(d: usize, lam: f64) -> Result<(f64, f64)> {
    if d < 2 || !(0.0..=1.0).contains(&lam) {
        return Err(Error::BadParameter(format!(
            "isotropic needs d >= 2 and lam in [0,1], got d={d}, lam={lam}"
        )));
    }
    let df = d as f64;
    let high = ((df * lam + 1.0) / (df * (df + 1.0))).sqrt();
    let low = ((1.0 - lam) / (df * df - 1.0)).sqrt();
    Ok((high.max(low), high.min(low)))
}

/// `(max_U F(rho, U sigma U^H), min_U F(rho, U sigma U^H))` over all
/// unitaries, from the two spectra.
pub fn global_unitary_extrema(rho_spec: &[f64], sigma_spec: &[f64]) -> Result<(f64, f64)> {
    check_spectrum(rho_spec)?;
    check_spectrum(sigma_spec)?;
    let n = rho_spec.len().max(sigma_spec.len());
    let mut r = sorted_desc(rho_spec);
    let mut s = sorted_desc(sigma_spec);
    r.resize(n, 0.0);
    s.resize(n, 0.0);
    let fmax: f64 = r.iter().zip(&s).map(|(a, b)| (a * b).sqrt()).sum();
    let fmin: f64 = r.iter().zip(s.iter().rev()).map(|(a, b)| (a * b).sqrt()).sum();
    Ok((fmax.min(1.0), fmin.min(fmax)))
}

/// Fully entangled fraction `G_max(rho, |Omega><Omega|)^2`, computed by the
/// orbit optimizer.
pub fn fef(rho: &DensityMatrix, cfg: &OptimizerConfig) -> Result<f64> {
    let (d1, d2) = rho.dims();
    if d1 != d2 {
        return Err(Error::DimensionMismatch(format!(
            "fully entangled fraction needs d1 = d2, got ({d1},{d2})"
        )));
    }
    let omega = max_entangled(d1)?.to_density();
    let rep = orbit_opt::gmax(rho.matrix(), omega.matrix(), (d1, d2), cfg)?;
    Ok((rep.value * rep.value).min(1.0))
}
