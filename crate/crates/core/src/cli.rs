//! Command-line front end. Data goes to stdout, diagnostics to stderr.
//!
//! Exit codes: `0` success, `1` generic failure or a `NotRadial` verdict,
//! `2` expression or usage error, `3` non-monotone perspective or missing
//! radiality, `4` inconclusive check, `5` solver budget exhausted.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::json;

use crate::calculus::SetOracle;
use crate::error::Error;
use crate::ext::ExtPos;
use crate::function::parse_function;
use crate::grid::{tabulate, Emit, GridSpec};
use crate::optimize::{
    map_dual_to_primal, solve_via_dual, solve_via_dual_constrained, SolverParams,
};
use crate::sets::{AnySet, RadialSet, SCHEMA};
use crate::transform::{
    check_radial, CheckConfig, DualHandle, Sense, TransformSettings, Verdict, DEFAULT_TOL,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_NON_MONOTONE: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;
pub const EXIT_BUDGET: i32 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "radial",
    version,
    about = "Radial transforms of sets and functions"
)]
struct Cli {
    /// Bisection tolerance (relative)
    #[arg(long, global = true, env = "RADIAL_TOL")]
    tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SenseArg {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the upper or lower transform at one point
    Eval {
        /// Function expression in x0, x1, ...
        #[arg(long = "f")]
        expr: String,
        /// Number of coordinates
        #[arg(long, default_value_t = 1)]
        dim: usize,
        /// Which transform to evaluate
        #[arg(long, value_enum, default_value = "upper")]
        sense: SenseArg,
        /// Comma-separated coordinates
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        /// Scan the whole v-range instead of assuming monotonicity
        #[arg(long)]
        global: bool,
    },
    /// Tabulate f, its transforms and the duality residual on a grid
    Grid {
        /// Function expression in x0, x1, ...
        #[arg(long = "f")]
        expr: String,
        /// Number of coordinates
        #[arg(long, default_value_t = 1)]
        dim: usize,
        /// lo:hi:count per axis, comma separated
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        /// Output file (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Columns: primal, dual, lower, bidual, graph
        #[arg(long, default_value = "primal,dual,bidual")]
        emit: String,
        /// Output format
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Scan the whole v-range instead of assuming monotonicity
        #[arg(long)]
        global: bool,
    },
    /// Apply the radial point transform to a halfspace, ellipsoid or polyhedron
    SetTransform {
        /// Set description in JSON
        #[arg(long = "in")]
        input: PathBuf,
        /// Output file (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample ray monotonicity of the perspective
    Check {
        /// Function expression in x0, x1, ...
        #[arg(long = "f")]
        expr: String,
        /// Number of coordinates
        #[arg(long, default_value_t = 1)]
        dim: usize,
        /// Number of sampled rays
        #[arg(long, default_value_t = 64)]
        rays: usize,
        /// Points sampled per ray
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// Seed for ray sampling
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sampling box lo:hi applied to every coordinate
        #[arg(long = "box", default_value = "-3:3", allow_hyphen_values = true)]
        region: String,
    },
    /// Maximize f by minimizing its upper transform
    Solve {
        /// Function expression in x0, x1, ...
        #[arg(long = "f")]
        expr: String,
        /// Number of coordinates
        #[arg(long, default_value_t = 1)]
        dim: usize,
        /// JSON constraint set: ball, box or polytope
        #[arg(long)]
        constraint: Option<PathBuf>,
        /// Comma-separated starting point in the dual space
        #[arg(long, allow_hyphen_values = true)]
        y0: String,
        /// Maximum number of solver iterations
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        /// Stop when the dual gradient norm falls below this
        #[arg(long, default_value_t = 1e-8)]
        tol_grad: f64,
    },
}

/// Runs the CLI on the process streams and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_PARSE;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if matches!(e, Error::NonMonotonePerspective { .. }) {
                let _ = writeln!(err, "hint: retry with --global");
            }
            exit_code(&e)
        }
    }
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::UnknownIdentifier { .. } | Error::Arity { .. } => EXIT_PARSE,
        Error::NonMonotonePerspective { .. } | Error::RadialityRequired => EXIT_NON_MONOTONE,
        Error::BudgetExhausted { .. } => EXIT_BUDGET,
        _ => EXIT_FAILURE,
    }
}

fn parse_vector(s: &str) -> Result<Vec<f64>, Error> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("bad coordinate `{t}` in `{s}`")))
        })
        .collect()
}

fn settings(tol: Option<f64>, global: bool) -> Result<TransformSettings, Error> {
    let s = TransformSettings::default().with_tol(tol.unwrap_or(DEFAULT_TOL))?;
    Ok(if global { s.global() } else { s })
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

fn emit_text(path: &Option<PathBuf>, text: &str, out: &mut dyn Write) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(io),
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Error> {
    match cli.command {
        Command::Eval {
            expr,
            dim,
            sense,
            at,
            global,
        } => {
            let f = parse_function(&expr, dim)?;
            let y = parse_vector(&at)?;
            let sense = match sense {
                SenseArg::Upper => Sense::Upper,
                SenseArg::Lower => Sense::Lower,
            };
            let s = settings(cli.tol, global)?;
            let h = DualHandle::new(f, sense, s)?;
            let ev = h.evaluate(&y)?;
            match ev.value {
                ExtPos::Finite(v) => {
                    let mid = ev.bracket.map_or(v.get(), |(lo, hi)| 0.5 * (lo + hi));
                    writeln!(out, "{mid:.10} ± {:e}", s.tol)
                }
                tag => writeln!(out, "{tag}"),
            }
            .map_err(io)?;
            match ev.bracket {
                Some((lo, hi)) => writeln!(
                    out,
                    "bracket [{lo:.16e}, {hi:.16e}] after {} evaluations",
                    ev.evals
                ),
                None => writeln!(out, "decided at search cap after {} evaluations", ev.evals),
            }
            .map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Grid {
            expr,
            dim,
            grid,
            out: path,
            emit,
            format,
            global,
        } => {
            let f = parse_function(&expr, dim)?;
            let spec: GridSpec = grid.parse()?;
            let emit: Emit = emit.parse()?;
            let table = tabulate(&f, &spec, emit, &settings(cli.tol, global)?)?;
            let text = match format {
                Format::Csv => table.to_csv(),
                Format::Json => table.to_json() + "\n",
            };
            emit_text(&path, &text, out)?;
            Ok(EXIT_OK)
        }
        Command::SetTransform { input, out: path } => {
            let text = std::fs::read_to_string(&input)
                .map_err(|e| Error::Io(format!("{}: {e}", input.display())))?;
            let set = AnySet::from_json(&text)?;
            let image = set.transform()?;
            emit_text(&path, &(image.to_json() + "\n"), out)?;
            Ok(EXIT_OK)
        }
        Command::Check {
            expr,
            dim,
            rays,
            points,
            seed,
            region,
        } => {
            let f = parse_function(&expr, dim)?;
            let bounds = region
                .split(':')
                .map(|t| t.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .ok()
                .filter(|b| b.len() == 2)
                .ok_or_else(|| {
                    Error::InvalidArgument(format!("bad box `{region}`; expected lo:hi"))
                })?;
            let cfg = CheckConfig {
                rays,
                points_per_ray: points,
                lo: vec![bounds[0]; dim],
                hi: vec![bounds[1]; dim],
                seed,
                ..CheckConfig::new(dim)
            };
            let report = check_radial(&f, &cfg)?;
            writeln!(out, "{}", report.describe()).map_err(io)?;
            writeln!(
                out,
                "checked {} rays x {} points per ray",
                report.checked_rays, report.checked_points_per_ray
            )
            .map_err(io)?;
            for w in &report.witnesses {
                writeln!(
                    out,
                    "witness: y={:?} v={:e} v'={:e} p(v)={:e} p(v')={:e}",
                    w.y, w.v, w.v_next, w.p, w.p_next
                )
                .map_err(io)?;
            }
            if report.gradient_flags > 0 {
                writeln!(
                    err,
                    "{} point(s) with positive (grad f, -1).(x, f) and no sampled decrease",
                    report.gradient_flags
                )
                .map_err(io)?;
            }
            if report.errors > 0 {
                writeln!(
                    err,
                    "{} evaluation(s) failed and were skipped",
                    report.errors
                )
                .map_err(io)?;
            }
            Ok(match report.verdict {
                Verdict::Radial => EXIT_OK,
                Verdict::NotRadial => EXIT_FAILURE,
                Verdict::Inconclusive => EXIT_INCONCLUSIVE,
            })
        }
        Command::Solve {
            expr,
            dim,
            constraint,
            y0,
            budget,
            tol_grad,
        } => {
            let f = parse_function(&expr, dim)?;
            let y0 = parse_vector(&y0)?;
            let set = match &constraint {
                Some(p) => Some(load_constraint(p, dim)?),
                None => None,
            };
            let params = SolverParams {
                budget,
                tol_grad,
                ..SolverParams::default()
            };
            let result = match &set {
                Some(s) => solve_via_dual_constrained(&f, s, &y0, &params),
                None => solve_via_dual(&f, &y0, &params),
            };
            let (dual, primal, converged) = match result {
                Ok((d, p)) => (d, Some(p), true),
                Err(Error::BudgetExhausted { best, .. }) => {
                    let p = map_dual_to_primal(&best).ok();
                    (*best, p, false)
                }
                Err(e) => return Err(e),
            };
            let doc = json!({
                "schema": SCHEMA,
                "y_star": dual.y_star,
                "d_star": dual.d_star,
                "x_star": primal.as_ref().map(|p| p.x_star.clone()),
                "p_star": primal.as_ref().map(|p| p.p_star),
                "iterations": dual.iterations,
                "grad_norm": dual.grad_norm,
                "converged": converged,
            });
            writeln!(
                out,
                "{}",
                serde_json::to_string_pretty(&doc).map_err(|e| Error::Io(e.to_string()))?
            )
            .map_err(io)?;
            if converged {
                Ok(EXIT_OK)
            } else {
                writeln!(
                    err,
                    "error: iteration budget exhausted; best iterate printed"
                )
                .map_err(io)?;
                Ok(EXIT_BUDGET)
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum ConstraintBody {
    Ball { radius: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Polytope { a: Vec<Vec<f64>>, b: Vec<f64> },
}

#[derive(Debug, Deserialize)]
struct ConstraintDoc {
    schema: String,
    #[serde(flatten)]
    body: ConstraintBody,
}

/// Reads a constraint document:
/// `{"schema": "radial/v1", "kind": "ball", "radius": r}`,
/// `{"kind": "box", "lo": [..], "hi": [..]}` or
/// `{"kind": "polytope", "a": [[..]], "b": [..]}` for `Ax ≤ b`.
pub fn load_constraint(path: &std::path::Path, dim: usize) -> Result<SetOracle, Error> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_constraint(&text, dim)
}

pub fn parse_constraint(text: &str, dim: usize) -> Result<SetOracle, Error> {
    let doc: ConstraintDoc =
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    if doc.schema != SCHEMA {
        return Err(Error::Schema(format!(
            "unsupported schema `{}`",
            doc.schema
        )));
    }
    let set = match doc.body {
        ConstraintBody::Ball { radius } => {
            if !(radius > 0.0) {
                return Err(Error::NotPositive(radius));
            }
            SetOracle::ball(dim, radius)
        }
        ConstraintBody::Box { lo, hi } => SetOracle::boxed(lo, hi)?,
        ConstraintBody::Polytope { a, b } => SetOracle::polytope(a, b)?,
    };
    if set.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: set.dim(),
        });
    }
    if !set.contains_origin() {
        return Err(Error::OriginNotInSet);
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(
            std::iter::once("radial").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn eval_prints_value_and_bracket() {
        let (code, out, _) = call(&["eval", "--f", "pos(sqrt(1-x0^2))", "--at", "1"]);
        assert_eq!(code, 0);
        let first = out.lines().next().unwrap();
        assert!(first.ends_with(" ± 1e-10"), "{first}");
        let v: f64 = first.split(' ').next().unwrap().parse().unwrap();
        assert!((v - 2f64.sqrt()).abs() < 2e-10);
        assert!(out.lines().nth(1).unwrap().starts_with("bracket ["));
        let (code, out, _) = call(&["eval", "--f", "abs(x0)", "--at", "2", "--sense", "upper"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().next().unwrap(), "0");
    }

    #[test]
    fn exit_codes() {
        let (code, _, err) = call(&["eval", "--f", "max(", "--at", "0"]);
        assert_eq!(code, EXIT_PARSE);
        assert!(err.contains("offset 4"), "{err}");
        let (code, _, err) = call(&["eval", "--f", "(x0+1)^2 + 0.5", "--at", "-2"]);
        assert_eq!(code, EXIT_NON_MONOTONE);
        assert!(err.contains("--global"));
        let (code, out, _) = call(&["eval", "--f", "(x0+1)^2 + 0.5", "--at", "-2", "--global"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("2.0000000000"), "{out}");
        let (code, _, _) = call(&["eval", "--f", "x0", "--at", "zz"]);
        assert_eq!(code, EXIT_FAILURE);
    }

    #[test]
    fn check_verdicts() {
        let (code, out, _) = call(&["check", "--f", "pos(sqrt(1-x0^2))"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("strictly radial (sampled)"));
        let (code, out, _) = call(&["check", "--f", "(x0+1)^2 + 0.5"]);
        assert_eq!(code, 1);
        assert!(out.contains("witness:"));
        let (code, _, _) = call(&["check", "--f", "exp(-abs(x0)) + 0.5"]);
        assert_eq!(code, 0);
    }

    #[test]
    fn solve_json() {
        let (code, out, _) = call(&["solve", "--f", "pos(sqrt(1-x0^2))", "--y0", "5"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v["x_star"][0].as_f64().unwrap().abs() < 1e-6);
        assert!((v["p_star"].as_f64().unwrap() - 1.0).abs() < 1e-6);
        let (code, _, _) = call(&["solve", "--f", "(x0+1)^2 + 0.5", "--y0", "0"]);
        assert_eq!(code, EXIT_NON_MONOTONE);
        let (code, out, _) = call(&[
            "solve",
            "--f",
            "pos(2-(x0-1)^2)",
            "--y0",
            "5",
            "--budget",
            "1",
        ]);
        assert_eq!(code, EXIT_BUDGET);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["converged"], false);
    }

    #[test]
    fn constraint_documents() {
        let s =
            parse_constraint(r#"{"schema":"radial/v1","kind":"ball","radius":0.5}"#, 2).unwrap();
        assert!(s.contains(&[0.3, 0.3]));
        let b = parse_constraint(
            r#"{"schema":"radial/v1","kind":"box","lo":[-1],"hi":[0.5]}"#,
            1,
        )
        .unwrap();
        assert!(!b.contains(&[0.6]));
        let p = parse_constraint(
            r#"{"schema":"radial/v1","kind":"polytope","a":[[1,1]],"b":[1]}"#,
            2,
        )
        .unwrap();
        assert!(p.contains(&[0.5, 0.5]));
        assert!(matches!(
            parse_constraint(
                r#"{"schema":"radial/v1","kind":"box","lo":[1],"hi":[2]}"#,
                1
            ),
            Err(Error::OriginNotInSet)
        ));
        assert!(parse_constraint(
            r#"{"schema":"radial/v1","kind":"box","lo":[-1],"hi":[1]}"#,
            2
        )
        .is_err());
    }
}
