//! `lufid` command-line front end.
//!
//! Exit codes: 0 on success, 2 on invalid input, 3 on numerical failure.

mod state_arg;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use lufid::bounds::bound_suite;
use lufid::closed_form::gmax_werner_vs_pure_product;
use lufid::fidelity::{affine_fidelity, fidelity, relative_entropy};
use lufid::orbit_opt::{gmax_states, gmin_states};
use lufid::probes::{commutativity_experiment, distill_probe, DistillReport};
use lufid::sdp::{build_problem, certify, export_sdpa, Certificate};
use lufid::states::werner;
use lufid::{DensityMatrix, Error, Execution, OptimizerConfig, PureState};

use state_arg::parse_state;

#[derive(Debug, Parser)]
#[command(name = "lufid", version, about = "Extremal fidelities under local unitary dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Base seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Optimizer restarts.
    #[arg(long, global = true)]
    restarts: Option<usize>,
    /// Iteration cap per restart.
    #[arg(long, global = true)]
    max_iters: Option<usize>,
    /// Riemannian gradient norm at which a restart stops.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output format; werner-curve defaults to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Run restarts and sweeps on one thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fidelity, affine fidelity and relative entropy of two states.
    Fidelity { a: String, b: String },
    /// Maximal fidelity between `a` and the local-unitary orbit of `b`.
    Gmax { a: String, b: String },
    /// Minimal fidelity between `a` and the local-unitary orbit of `b`.
    Gmin { a: String, b: String },
    /// Werner state against a pure product state: closed form and optimizer.
    WernerCurve {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 21)]
        t_steps: usize,
    },
    /// All analytic bounds, checked against optimizer values.
    Bounds { a: String, b: String },
    /// Writes the fidelity SDP in SDPA sparse format and certifies it.
    SdpExport {
        a: String,
        b: String,
        #[arg(long)]
        path: PathBuf,
    },
    /// Schmidt-rank-two distillability probe.
    Distill {
        state: Option<String>,
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Sweep Werner states of this local dimension over t in [-1, 1] instead.
        #[arg(long, conflicts_with = "state")]
        werner_sweep: Option<usize>,
        #[arg(long, default_value_t = 21)]
        t_steps: usize,
    },
    /// Searches for a local unitary making the two states commute.
    Commute { a: String, b: String },
}

struct Failure(Error);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e)
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure(Error::Json(e))
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure(Error::Io(e))
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn num(x: f64) -> String {
    format!("{x:.11e}")
}

fn json<T: Serialize>(v: &T) -> Res<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn grid(steps: usize) -> Res<Vec<f64>> {
    if steps < 2 {
        return Err(Error::BadParameter("t-steps must be at least 2".into()).into());
    }
    Ok((0..steps).map(|k| -1.0 + 2.0 * k as f64 / (steps - 1) as f64).collect())
}

fn pair(a: &str, b: &str) -> Res<(DensityMatrix, DensityMatrix)> {
    Ok((parse_state(a)?, parse_state(b)?))
}

#[derive(Serialize)]
struct FidelityOut {
    fidelity: f64,
    affine_fidelity: f64,
    /// `null` when infinite.
    relative_entropy: Option<f64>,
}

#[derive(Serialize)]
struct CurvePoint {
    t: f64,
    gmax_formula: f64,
    gmax_numeric: f64,
}

#[derive(Serialize)]
struct SdpOut<'a> {
    path: &'a str,
    order: usize,
    certificate: Certificate,
}

#[derive(Serialize)]
struct SweepPoint {
    t: f64,
    report: DistillReport,
}

impl Cli {
    fn config(&self) -> Res<OptimizerConfig> {
        let d = OptimizerConfig::default();
        let cfg = OptimizerConfig {
            seed: self.seed,
            restarts: self.restarts.unwrap_or(d.restarts),
            max_iters: self.max_iters.unwrap_or(d.max_iters),
            grad_tol: self.tol.unwrap_or(d.grad_tol),
            execution: if self.sequential { Execution::Sequential } else { Execution::Parallel },
            ..d
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn run(&self) -> Res<String> {
        let cfg = self.config()?;
        let csv = self.format == Some(Format::Csv);
        match &self.command {
            Command::Fidelity { a, b } => {
                let (a, b) = pair(a, b)?;
                let s = relative_entropy(a.matrix(), b.matrix())?;
                let out = FidelityOut {
                    fidelity: fidelity(a.matrix(), b.matrix())?,
                    affine_fidelity: affine_fidelity(a.matrix(), b.matrix())?,
                    relative_entropy: s.is_finite().then_some(s),
                };
                if csv {
                    Ok(format!(
                        "fidelity,affine_fidelity,relative_entropy\n{},{},{}\n",
                        num(out.fidelity),
                        num(out.affine_fidelity),
                        num(s)
                    ))
                } else {
                    json(&out)
                }
            }
            Command::Gmax { a, b } | Command::Gmin { a, b } => {
                let (a, b) = pair(a, b)?;
                let rep = if matches!(self.command, Command::Gmax { .. }) {
                    gmax_states(&a, &b, &cfg)?
                } else {
                    gmin_states(&a, &b, &cfg)?
                };
                if csv {
                    let mut s = String::from("restart,value\n");
                    for (k, v) in rep.per_restart_values.iter().enumerate() {
                        writeln!(s, "{k},{}", num(*v)).unwrap();
                    }
                    Ok(s)
                } else {
                    json(&rep)
                }
            }
            Command::WernerCurve { d, t_steps } => {
                let product = PureState::basis(*d, *d, 0, 0)?.to_density();
                let mut points = Vec::new();
                for t in grid(*t_steps)? {
                    let w = werner(*d, t)?;
                    points.push(CurvePoint {
                        t,
                        gmax_formula: gmax_werner_vs_pure_product(*d, t)?,
                        gmax_numeric: gmax_states(&w, &product, &cfg)?.value,
                    });
                }
                if self.format == Some(Format::Json) {
                    json(&points)
                } else {
                    let mut s = String::from("t,gmax_formula,gmax_numeric\n");
                    for p in &points {
                        writeln!(s, "{},{},{}", num(p.t), num(p.gmax_formula), num(p.gmax_numeric)).unwrap();
                    }
                    Ok(s)
                }
            }
            Command::Bounds { a, b } => {
                let (a, b) = pair(a, b)?;
                let suite = bound_suite(&a, &b, &cfg)?;
                if csv {
                    let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
                    let mut s = String::from("name,value,lower,upper,satisfied,slack\n");
                    for r in &suite.reports {
                        writeln!(s, "{},{},{},{},{},{}", r.name, opt(r.value), opt(r.lower), opt(r.upper), r.satisfied, num(r.slack))
                            .unwrap();
                    }
                    Ok(s)
                } else {
                    json(&suite)
                }
            }
            Command::SdpExport { a, b, path } => {
                let (a, b) = pair(a, b)?;
                let mut p = build_problem(a.matrix(), b.matrix())?;
                let certificate = certify(&mut p)?;
                export_sdpa(&p, path)?;
                if csv {
                    Ok(format!(
                        "fidelity,primal,dual,gap\n{},{},{},{}\n",
                        num(certificate.fidelity),
                        num(certificate.primal.objective),
                        num(certificate.trivial_dual.objective),
                        num(certificate.gap)
                    ))
                } else {
                    json(&SdpOut { path: &path.to_string_lossy(), order: p.order, certificate })
                }
            }
            Command::Distill { state, n, werner_sweep, t_steps } => {
                let header = "t,min_pt_eigenvalue,x_shift,best_lambda,witness_value,distillable,verdict\n";
                let row = |t: &str, r: &DistillReport| {
                    let verdict = serde_json::to_value(r.verdict).unwrap();
                    format!(
                        "{t},{},{},{},{},{},{}\n",
                        num(r.min_pt_eigenvalue),
                        num(r.x_shift),
                        num(r.best_lambda),
                        num(r.witness_value),
                        r.distillable_flag,
                        verdict.as_str().unwrap_or_default()
                    )
                };
                match (state, werner_sweep) {
                    (_, Some(d)) => {
                        let mut points = Vec::new();
                        for t in grid(*t_steps)? {
                            points.push(SweepPoint { t, report: distill_probe(&werner(*d, t)?, *n, &cfg)? });
                        }
                        if csv {
                            let mut s = String::from(header);
                            for p in &points {
                                s += &row(&num(p.t), &p.report);
                            }
                            Ok(s)
                        } else {
                            json(&points)
                        }
                    }
                    (Some(state), None) => {
                        let r = distill_probe(&parse_state(state)?, *n, &cfg)?;
                        if csv {
                            Ok(format!("{header}{}", row("", &r)))
                        } else {
                            json(&r)
                        }
                    }
                    (None, None) => Err(Error::BadParameter("distill needs a state or --werner-sweep".into()).into()),
                }
            }
            Command::Commute { a, b } => {
                let (a, b) = pair(a, b)?;
                let rep = commutativity_experiment(&a, &b, &cfg)?;
                if csv {
                    let mut s = String::from("restart,min_norm\n");
                    for (k, v) in rep.per_restart_minima.iter().enumerate() {
                        writeln!(s, "{k},{}", num(*v)).unwrap();
                    }
                    Ok(s)
                } else {
                    json(&rep)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = cli.run().and_then(|text| {
        match &cli.out {
            Some(path) => std::fs::write(path, text)?,
            None => print!("{text}"),
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_validation() {
        2
    } else {
        3
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::BadParameter("x".into())), 2);
        assert_eq!(exit_code(&Error::Parse("x".into())), 2);
        assert_eq!(exit_code(&Error::NoConvergence("x".into())), 3);
        assert_eq!(exit_code(&Error::SingularRetraction), 3);
        assert_eq!(exit_code(&Error::NonFinite), 3);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
