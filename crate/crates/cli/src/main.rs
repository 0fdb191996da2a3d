//! `equiball` command-line tool.
//!
//! Exit codes: 0 success (or a consistent weight), 1 a verification suite
//! failed, 2 input error, 3 a candidate weight was disproved, 4 a
//! certificate was rejected.

mod expr;

use std::f64::consts::TAU;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

use equiball::certify::{check_certificate, default_epsilon, generate_with, Certificate, GeneratorConfig};
use equiball::enlargement::enlarge_to_maximal;
use equiball::geometry::{section2d, Point};
use equiball::json::{format_f64, to_string};
use equiball::simplex::is_standard_equilateral;
use equiball::verify::{verify_all, Suite, VerifyConfig};
use equiball::weights::{corner_norm, eta, falsify, lambda_shell, nu, shell_circuit, Verdict, WeightFn};
use equiball::{alpha, beta, EquilateralSet, Error, Tolerance};

const EXIT_SUITE_FAILED: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_DISPROVED: u8 = 3;
const EXIT_REJECTED: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "equiball", version, about = "Standard equilateral sets in the unit ball and equality certificates")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Ambient dimension (inferred from the input where there is one).
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of sampled sets for `falsify`.
    #[arg(long, global = true, default_value_t = 1000)]
    samples: usize,
    /// Override of the distance/norm equality tolerance.
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// No summary line on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    /// Omit the timestamp and timing fields, making output byte-identical
    /// across runs.
    #[arg(long, global = true)]
    no_timestamp: bool,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Print the constants beta_k, alpha_k, lambda_n and nu_n(lambda_n).
    Constants,
    /// Enlarge a standard equilateral set, read as a JSON array of
    /// coordinate arrays, to a maximal one.
    Enlarge { points: PathBuf },
    /// Sample maximal sets and test whether an expression is an equilateral
    /// weight. See the `expr` module for the grammar.
    Falsify {
        expr: String,
        /// Evaluate on the sphere of radius 1/sqrt2 over orthonormal frames.
        #[arg(long)]
        sphere: bool,
        /// Declared weight W to compare every sum against.
        #[arg(long)]
        weight: Option<f64>,
    },
    /// Generate a certificate that f(x) = f(y) for every equilateral weight.
    Certify {
        /// Comma-separated coordinates of x.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Comma-separated coordinates of y.
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// Check a certificate file.
    Check { certificate: PathBuf },
    /// Emit the shell circuit as CSV.
    EmitCircuit {
        /// Rotation of the quadruple, in radians.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        angle: f64,
    },
    /// Run every property suite.
    VerifyAll {
        /// Small sample counts.
        #[arg(long)]
        quick: bool,
        /// Tighten every bound of the named suite so that it fails.
        #[arg(long)]
        inject: Option<String>,
    },
}

struct Fail {
    code: u8,
    msg: String,
}

impl Fail {
    fn input(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            msg: msg.into(),
        }
    }
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::input(e.to_string())
    }
}

type Outcome = Result<u8, Fail>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    match &cli.cmd {
        Cmd::Constants => cmd_constants(cli),
        Cmd::Enlarge { points } => cmd_enlarge(cli, points),
        Cmd::Falsify { expr, sphere, weight } => cmd_falsify(cli, expr, *sphere, *weight),
        Cmd::Certify { x, y } => cmd_certify(cli, x, y),
        Cmd::Check { certificate } => cmd_check(cli, certificate),
        Cmd::EmitCircuit { angle } => cmd_emit_circuit(cli, *angle),
        Cmd::VerifyAll { quick, inject } => cmd_verify_all(cli, *quick, inject.as_deref()),
    }
}

fn check_n(n: usize) -> Result<usize, Fail> {
    if n < 2 {
        return Err(Fail::input(format!(
            "n = {n} is not supported: the geometry lives in the unit ball B^n with n >= 2"
        )));
    }
    Ok(n)
}

/// Dimension from the input, checked against `--n` when both are present.
fn resolve_n(cli: &Cli, found: usize) -> Result<usize, Fail> {
    if let Some(n) = cli.n {
        if n != found {
            return Err(Fail::input(format!("--n {n} does not match input dimension {found}")));
        }
    }
    check_n(found)
}

fn tolerance(cli: &Cli, base: Tolerance) -> Result<Tolerance, Fail> {
    match cli.eps {
        Some(e) => Ok(base.with_eps(e)?),
        None => Ok(base),
    }
}

fn write_out(cli: &Cli, text: &str) -> Result<(), Fail> {
    match &cli.out {
        Some(path) => fs::write(path, text).map_err(|e| Fail::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(cli: &Cli, command: &str, body: Value) -> Result<(), Fail> {
    let mut obj = match body {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("result".into(), other);
            m
        }
    };
    obj.insert("command".into(), json!(command));
    if !cli.no_timestamp {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        obj.insert("timestamp".into(), json!(secs));
    }
    write_out(cli, &to_string(&Value::Object(obj))?)
}

fn note(cli: &Cli, msg: &str) {
    if !cli.quiet {
        eprintln!("{msg}");
    }
}

fn read(path: &PathBuf) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail::input(format!("cannot read {}: {e}", path.display())))
}

fn cmd_constants(cli: &Cli) -> Outcome {
    let n = check_n(cli.n.unwrap_or(2))?;
    let mut obj = Map::new();
    obj.insert("n".into(), json!(n));
    for k in 1..=n + 2 {
        obj.insert(format!("beta{k}"), json!(beta(k)?));
    }
    for k in 2..=n + 2 {
        obj.insert(format!("alpha{k}"), json!(alpha(k)?));
    }
    let b = beta(n + 1)?;
    let lam = lambda_shell(n)?;
    obj.insert("beta_fixed_point_residual".into(), json!((eta(n, b)? - b).abs()));
    obj.insert("eta_at_beta_n".into(), json!(eta(n, beta(n)?)?));
    obj.insert("eta_at_1".into(), json!(eta(n, 1.0)?));
    obj.insert("lambda".into(), json!(lam));
    obj.insert("nu_lambda".into(), json!(nu(n, lam)?));
    obj.insert("corner_norm".into(), json!(corner_norm(n)));
    obj.insert("epsilon_default".into(), json!(default_epsilon(n)?));
    emit_json(cli, "constants", Value::Object(obj))?;
    note(cli, &format!("n = {n}: lambda = {}", format_f64(lam)));
    Ok(0)
}

fn cmd_enlarge(cli: &Cli, path: &PathBuf) -> Outcome {
    let coords: Vec<Vec<f64>> =
        serde_json::from_str(&read(path)?).map_err(|e| Fail::input(format!("points file: {e}")))?;
    let first = coords.first().ok_or_else(|| Fail::input("points file is empty"))?;
    let n = resolve_n(cli, first.len())?;
    let tol = tolerance(cli, Tolerance::default())?;
    let set = EquilateralSet::new(coords.into_iter().map(Point::new).collect(), &tol)?;
    let input_size = set.len();
    let (full, trace) = enlarge_to_maximal(&set, &tol)?;
    let verification = json!({
        "max_distance_error": full.max_distance_error(),
        "max_norm": full.max_norm(),
        "standard_equilateral": is_standard_equilateral(full.points(), true, &tol)?,
        "maximal": full.len() == n + 1,
    });
    let body = json!({
        "n": n,
        "input_size": input_size,
        "set": full.points(),
        "trace": trace,
        "verification": verification,
    });
    emit_json(cli, "enlarge", body)?;
    note(cli, &format!("enlarged {input_size} -> {} points", full.len()));
    Ok(0)
}

fn cmd_falsify(cli: &Cli, src: &str, sphere: bool, weight: Option<f64>) -> Outcome {
    let n = check_n(cli.n.unwrap_or(2))?;
    let e = expr::parse(src, n).map_err(|e| Fail::input(format!("{e}\n  {src}\n  {}^", " ".repeat(e.pos))))?;
    let mut f = WeightFn::new(move |p: &Point| e.eval(p.coords()));
    if sphere {
        f = f.on_sphere();
    }
    if let Some(w) = weight {
        f = f.with_weight(w);
    }
    let report = falsify(&f, n, cli.samples, cli.seed)?;
    let mut body = serde_json::to_value(&report).map_err(|e| Fail::input(e.to_string()))?;
    body["expression"] = json!(src);
    emit_json(cli, "falsify", body)?;
    note(cli, &format!("{:?}: spread {}", report.verdict, format_f64(report.spread)));
    Ok(match report.verdict {
        Verdict::Consistent => 0,
        Verdict::Disproved => EXIT_DISPROVED,
    })
}

fn parse_coords(name: &str, s: &str) -> Result<Point, Fail> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Fail::input(format!("--{name}: '{}' is not a number", t.trim())))
        })
        .collect::<Result<Vec<f64>, Fail>>()
        .map(Point::new)
}

fn cmd_certify(cli: &Cli, xs: &str, ys: &str) -> Outcome {
    let x = parse_coords("x", xs)?;
    let y = parse_coords("y", ys)?;
    let n = resolve_n(cli, x.dim())?;
    if y.dim() != n {
        return Err(Fail::input(format!("x has {n} coordinates but y has {}", y.dim())));
    }
    let config = GeneratorConfig {
        epsilon: None,
        tolerance: tolerance(cli, Tolerance::default())?,
    };
    let cert = generate_with(&x, &y, n, &config)?;
    let body = serde_json::to_value(&cert).map_err(|e| Fail::input(e.to_string()))?;
    emit_json(cli, "certify", body)?;
    note(cli, &format!("{} sets over {} points", cert.sets.len(), cert.points.len()));
    Ok(0)
}

fn cmd_check(cli: &Cli, path: &PathBuf) -> Outcome {
    let cert = Certificate::from_json(&read(path)?)?;
    let tol = tolerance(cli, cert.tolerance)?;
    let (code, body) = match check_certificate(&cert, &tol) {
        Ok(report) => (0, serde_json::to_value(&report).map_err(|e| Fail::input(e.to_string()))?),
        Err(Error::SetInvalid { index, violation }) => (
            EXIT_REJECTED,
            json!({"accepted": false, "reason": "set_invalid", "set_index": index, "violation": violation}),
        ),
        Err(Error::ClaimNotImplied { residual }) => (
            EXIT_REJECTED,
            json!({"accepted": false, "reason": "claim_not_implied", "residual": residual}),
        ),
        Err(e) => return Err(e.into()),
    };
    emit_json(cli, "check", body)?;
    note(cli, if code == 0 { "certificate accepted" } else { "certificate rejected" });
    Ok(code)
}

fn cmd_emit_circuit(cli: &Cli, angle: f64) -> Outcome {
    let n = check_n(cli.n.unwrap_or(2))?;
    let section = section2d(&Point::axis(n, 0), &Point::axis(n, 1))?;
    let plan = shell_circuit(n, &section, angle)?;
    let f = format_f64;
    let mut out = String::from("label,cx,cy,radius,theta_start,theta_end\n");
    out.push_str(&format!("D,{},{},{},{},{}\n", f(0.0), f(0.0), f(1.0), f(0.0), f(TAU)));
    for arc in &plan.arcs {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            arc.label,
            f(arc.center[0]),
            f(arc.center[1]),
            f(arc.radius),
            f(arc.theta_start),
            f(arc.theta_end)
        ));
    }
    let points = ["w", "x", "y", "z"].iter().zip(&plan.quadruple).chain(["a", "b", "c", "d"].iter().zip(&plan.corners));
    for (label, p) in points {
        out.push_str(&format!("{label},{},{},{},{},{}\n", f(p[0]), f(p[1]), f(0.0), f(0.0), f(0.0)));
    }
    write_out(cli, &out)?;
    note(cli, &format!("circuit for n = {n}: {} arcs", plan.arcs.len()));
    Ok(0)
}

fn cmd_verify_all(cli: &Cli, quick: bool, inject: Option<&str>) -> Outcome {
    let mut cfg = if quick { VerifyConfig::quick(cli.seed) } else { VerifyConfig { seed: cli.seed, ..VerifyConfig::default() } };
    if let Some(n) = cli.n {
        cfg.n_max = check_n(n)?;
    }
    if let Some(name) = inject {
        let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
        cfg.inject_violation = Some(
            Suite::from_name(name)
                .ok_or_else(|| Fail::input(format!("unknown suite '{name}'; expected one of {}", names.join(", "))))?,
        );
    }
    let report = verify_all(&cfg);
    let mut body = serde_json::to_value(&report).map_err(|e| Fail::input(e.to_string()))?;
    if cli.no_timestamp {
        for s in body["suites"].as_array_mut().into_iter().flatten() {
            s.as_object_mut().map(|o| o.remove("elapsed_secs"));
        }
    }
    emit_json(cli, "verify-all", body)?;
    if !cli.quiet {
        for s in &report.suites {
            eprintln!(
                "{:<17} {}  checks={} failures={} worst_slack={}",
                s.name,
                if s.passed { "PASS" } else { "FAIL" },
                s.checks,
                s.failures,
                format_f64(s.worst_slack)
            );
        }
    }
    Ok(if report.passed { 0 } else { EXIT_SUITE_FAILED })
}
