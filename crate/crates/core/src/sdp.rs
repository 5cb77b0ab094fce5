//! The semidefinite program whose optimal value is the fidelity:
//!
//! ```text
//! maximize   (Tr X + Tr X^H) / 2
//! subject to [[rho, X], [X^H, tau]] >= 0
//! ```
//!
//! with dual
//!
//! ```text
//! minimize   (<rho, Y> + <tau, Z>) / 2
//! subject to [[Y, -1], [-1, Z]] >= 0.
//! ```
//!
//! No solver is included. Optimality is certified by the analytic primal
//! point `X* = sqrt(rho) Q sqrt(tau)` together with weak duality, and, for
//! full-rank inputs, by an analytic dual point with the same objective.
//! The outer optimization over local unitaries is not part of this program:
//! `tau` is a fixed state, typically the optimizer's `W sigma W^H`.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fidelity::fidelity;
use crate::linalg::{herm_eig_trusted, matrix_sqrt, polar_isometry, psd_eig, ComplexMatrix, C64};

/// Minimum block eigenvalue accepted as PSD.
pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdpProblem {
    pub rho: ComplexMatrix,
    pub tau: ComplexMatrix,
    pub order: usize,
    pub primal_candidate: Option<ComplexMatrix>,
    pub dual_candidate: Option<(ComplexMatrix, ComplexMatrix)>,
}

pub fn build_problem(rho: &ComplexMatrix, tau: &ComplexMatrix) -> Result<SdpProblem> {
    rho.ensure_square("rho")?;
    tau.ensure_square("tau")?;
    if rho.rows() != tau.rows() {
        return Err(Error::DimensionMismatch(format!(
            "rho has order {}, tau has order {}",
            rho.rows(),
            tau.rows()
        )));
    }
    psd_eig(rho)?;
    psd_eig(tau)?;
    Ok(SdpProblem {
        rho: rho.hermitian_part(),
        tau: tau.hermitian_part(),
        order: rho.rows(),
        primal_candidate: None,
        dual_candidate: None,
    })
}

/// `[[a, b], [c, d]]` from four `n x n` blocks.
fn block2(a: &ComplexMatrix, b: &ComplexMatrix, c: &ComplexMatrix, d: &ComplexMatrix) -> ComplexMatrix {
    let n = a.rows();
    ComplexMatrix::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
        (true, true) => a[(i, j)],
        (true, false) => b[(i, j - n)],
        (false, true) => c[(i - n, j)],
        (false, false) => d[(i - n, j - n)],
    })
}

fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(herm_eig_trusted(m)?.min_eigenvalue())
}

/// `X* = sqrt(rho) Q sqrt(tau)` with `Q` the adjoint of the polar isometry of
/// `sqrt(tau) sqrt(rho)`.
pub fn optimal_primal(p: &SdpProblem) -> Result<ComplexMatrix> {
    let sr = matrix_sqrt(&p.rho)?;
    let st = matrix_sqrt(&p.tau)?;
    let q = polar_isometry(&st.matmul(&sr))?.adjoint();
    Ok(sr.matmul(&q).matmul(&st))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Feasibility {
    pub feasible: bool,
    pub objective: f64,
    pub min_eigenvalue: f64,
}

pub fn check_primal_feasible(p: &SdpProblem, x: &ComplexMatrix) -> Result<Feasibility> {
    if x.rows() != p.order || x.cols() != p.order {
        return Err(Error::DimensionMismatch(format!(
            "primal candidate is {}x{}, problem order {}",
            x.rows(),
            x.cols(),
            p.order
        )));
    }
    x.ensure_finite()?;
    let min = min_eigenvalue(&block2(&p.rho, x, &x.adjoint(), &p.tau))?;
    Ok(Feasibility {
        feasible: min >= -FEASIBILITY_TOL,
        objective: x.trace().re,
        min_eigenvalue: min,
    })
}

pub fn check_dual_feasible(p: &SdpProblem, y: &ComplexMatrix, z: &ComplexMatrix) -> Result<Feasibility> {
    for (name, m) in [("y", y), ("z", z)] {
        if m.rows() != p.order || m.cols() != p.order {
            return Err(Error::DimensionMismatch(format!(
                "dual candidate {name} is {}x{}, problem order {}",
                m.rows(),
                m.cols(),
                p.order
            )));
        }
        m.ensure_finite()?;
        let err = m.hermiticity_error();
        if err > 1e-12 * m.max_abs().max(1.0) {
            return Err(Error::NotHermitian(err));
        }
    }
    let minus = ComplexMatrix::identity(p.order).scale(-1.0);
    let min = min_eigenvalue(&block2(y, &minus, &minus, z))?;
    let objective = 0.5 * (p.rho.trace_of_product(y).re + p.tau.trace_of_product(z).re);
    Ok(Feasibility {
        feasible: min >= -FEASIBILITY_TOL,
        objective,
        min_eigenvalue: min,
    })
}

/// Dual point with objective `F(rho, tau)` for full-rank inputs:
/// `Y = rho^-1/2 M^1/2 rho^-1/2`, `Z = Y^-1`, `M = rho^1/2 tau rho^1/2`.
/// Returns `None` if `rho` or `tau` is numerically singular.
pub fn optimal_dual(p: &SdpProblem) -> Result<Option<(ComplexMatrix, ComplexMatrix)>> {
    let er = psd_eig(&p.rho)?;
    let et = psd_eig(&p.tau)?;
    let singular = |e: &crate::linalg::HermitianEig| e.min_eigenvalue() <= 1e-10 * e.max_eigenvalue();
    if singular(&er) || singular(&et) {
        return Ok(None);
    }
    let sr = er.apply(f64::sqrt);
    let sr_inv = er.apply(|l| 1.0 / l.sqrt());
    let m = sr.matmul(&p.tau).matmul(&sr).hermitian_part();
    let em = psd_eig(&m)?;
    let y = sr_inv.matmul(&em.apply(f64::sqrt)).matmul(&sr_inv).hermitian_part();
    let z = sr.matmul(&em.apply(|l| 1.0 / l.sqrt())).matmul(&sr).hermitian_part();
    Ok(Some((y, z)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub fidelity: f64,
    pub primal: Feasibility,
    /// `Y = Z = 1`.
    pub trivial_dual: Feasibility,
    /// Analytic dual point, present for full-rank inputs.
    pub optimal_dual: Option<Feasibility>,
    /// Best certified upper bound minus primal objective.
    pub gap: f64,
}

/// Fills the candidates and checks both sides.
pub fn certify(p: &mut SdpProblem) -> Result<Certificate> {
    let f = fidelity(&p.rho, &p.tau)?;
    let x = optimal_primal(p)?;
    let primal = check_primal_feasible(p, &x)?;
    let id = ComplexMatrix::identity(p.order);
    let trivial_dual = check_dual_feasible(p, &id, &id)?;
    let dual = optimal_dual(p)?;
    let optimal = match &dual {
        Some((y, z)) => Some(check_dual_feasible(p, y, z)?),
        None => None,
    };
    let mut upper = trivial_dual.objective;
    if let Some(o) = optimal.filter(|o| o.feasible) {
        upper = upper.min(o.objective);
    }
    p.primal_candidate = Some(x);
    p.dual_candidate = dual.or(Some((id.clone(), id)));
    Ok(Certificate {
        fidelity: f,
        primal,
        trivial_dual,
        optimal_dual: optimal,
        gap: upper - primal.objective,
    })
}

/// Real symmetric embedding `[[Re H, -Im H], [Im H, Re H]]`.
pub fn real_embedding(h: &ComplexMatrix) -> ComplexMatrix {
    let n = h.rows();
    ComplexMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = h[(i % n, j % n)];
        let v = match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        };
        C64::new(v, 0.0)
    })
}

fn push_entries(out: &mut String, matno: usize, h: &ComplexMatrix) {
    let e = real_embedding(h);
    let n = e.rows();
    for i in 0..n {
        for j in i..n {
            let v = e[(i, j)].re;
            if v != 0.0 {
                let _ = writeln!(out, "{matno} 1 {} {} {v:.16e}", i + 1, j + 1);
            }
        }
    }
}

/// SDPA sparse text of the problem in the standard primal form
/// `min c^T x  s.t.  sum_i F_i x_i - F_0 >= 0`.
pub fn to_sdpa_string(p: &SdpProblem) -> String {
    let n = p.order;
    let m = 2 * n * n;
    let mut out = String::new();
    let _ = writeln!(out, "* fidelity SDP: maximize Re Tr X s.t. [[rho, X], [X^H, tau]] >= 0");
    let _ = writeln!(
        out,
        "* complex {0}x{0} block embedded as the real {1}x{1} block [[Re, -Im], [Im, Re]]",
        2 * n,
        4 * n
    );
    let _ = writeln!(
        out,
        "* variable 2(j*{n}+k)+1 is Re X[j][k], 2(j*{n}+k)+2 is Im X[j][k] (j, k from 0)"
    );
    let _ = writeln!(out, "{m}");
    let _ = writeln!(out, "1");
    let _ = writeln!(out, "{}", 4 * n);
    let c: Vec<String> = (0..n)
        .flat_map(|j| (0..n).map(move |k| (j, k)))
        .flat_map(|(j, k)| {
            let re = if j == k { "-1" } else { "0" };
            [re.to_string(), "0".to_string()]
        })
        .collect();
    let _ = writeln!(out, "{}", c.join(" "));

    let zero = ComplexMatrix::zeros(n, n);
    let f0 = block2(&p.rho, &zero, &zero, &p.tau).scale(-1.0);
    push_entries(&mut out, 0, &f0);
    for j in 0..n {
        for k in 0..n {
            let idx = 2 * (j * n + k) + 1;
            let mut re = ComplexMatrix::zeros(2 * n, 2 * n);
            re[(j, n + k)] = C64::new(1.0, 0.0);
            re[(n + k, j)] = C64::new(1.0, 0.0);
            push_entries(&mut out, idx, &re);
            let mut im = ComplexMatrix::zeros(2 * n, 2 * n);
            im[(j, n + k)] = C64::new(0.0, 1.0);
            im[(n + k, j)] = C64::new(0.0, -1.0);
            push_entries(&mut out, idx + 1, &im);
        }
    }
    out
}

pub fn export_sdpa(p: &SdpProblem, path: &Path) -> Result<()> {
    std::fs::write(path, to_sdpa_string(p))?;
    Ok(())
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// Recovers `rho` and `tau` from SDPA text written by [`to_sdpa_string`].
pub fn from_sdpa_str(text: &str) -> Result<SdpProblem> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('*') && !l.starts_with('"'));
    let mut next = |what: &str| lines.next().ok_or_else(|| parse_err(format!("missing {what}")));
    let m: usize = next("m")?.parse().map_err(|_| parse_err("bad m"))?;
    let blocks: usize = next("block count")?.parse().map_err(|_| parse_err("bad block count"))?;
    if blocks != 1 {
        return Err(parse_err(format!("expected 1 block, found {blocks}")));
    }
    let size: usize = next("block size")?
        .trim_matches(|c| c == '{' || c == '}' || c == '(' || c == ')')
        .parse()
        .map_err(|_| parse_err("bad block size"))?;
    if !size.is_multiple_of(4) || m != 2 * (size / 4) * (size / 4) {
        return Err(parse_err(format!("inconsistent sizes m={m}, block={size}")));
    }
    let _c = next("objective vector")?;
    let n = size / 4;
    let mut f0 = vec![vec![0.0f64; size]; size];
    for line in lines {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 5 {
            return Err(parse_err(format!("bad entry line '{line}'")));
        }
        let matno: usize = f[0].parse().map_err(|_| parse_err("bad matno"))?;
        if matno != 0 {
            continue;
        }
        let i: usize = f[2].parse().map_err(|_| parse_err("bad row"))?;
        let j: usize = f[3].parse().map_err(|_| parse_err("bad col"))?;
        let v: f64 = f[4].parse().map_err(|_| parse_err("bad value"))?;
        if i == 0 || j == 0 || i > size || j > size {
            return Err(parse_err(format!("index ({i},{j}) out of range")));
        }
        f0[i - 1][j - 1] = v;
        f0[j - 1][i - 1] = v;
    }
    let big = 2 * n;
    let h = ComplexMatrix::from_fn(big, big, |r, c| C64::new(-f0[r][c], -f0[big + r][c]));
    let rho = ComplexMatrix::from_fn(n, n, |r, c| h[(r, c)]);
    let tau = ComplexMatrix::from_fn(n, n, |r, c| h[(n + r, n + c)]);
    build_problem(&rho, &tau)
}

pub fn import_sdpa(path: &Path) -> Result<SdpProblem> {
    from_sdpa_str(&std::fs::read_to_string(path)?)
}
