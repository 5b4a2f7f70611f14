//! The `liouville` command line: model files in, JSON or CSV out.
//!
//! Failures are reported on stderr as
//! `{"error": {"kind": ..., "message": ..., "path": ...}}` with a distinct
//! exit code per error kind.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use liouville_core::io::{read_model, write_atomic, Format, ModelSpec, TrajectoryRecord};
use liouville_core::regression::{tls_checks, CheckOutcome};
use liouville_core::{
    analyze, channel_superop, channels_equal, completeness_defect, dyson_propagator, kraus_from_superop, mho,
    propagate_expm_oracle, purity, random, stability_report, steady_state, triple_superop,
    unitary_liouvillian, AnalyzeOptions, CMatrix, DensityMatrix, Error, KrausSet, SpectralClass, Trajectory,
    C64,
};
use rand::rngs::StdRng;
use rand::SeedableRng;
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_SCHEMA: i32 = 4;
pub const EXIT_SHAPE: i32 = 5;
pub const EXIT_NON_HERMITIAN: i32 = 6;
pub const EXIT_NUMERICAL: i32 = 7;
pub const EXIT_UNSTABLE: i32 = 8;
pub const EXIT_NON_UNIQUE: i32 = 9;
pub const EXIT_NOT_CP: i32 = 10;

#[derive(Debug, Parser)]
#[command(
    name = "liouville",
    version,
    about = "Liouville-space analysis of open quantum systems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Tolerances {
    /// Eigenvalue clustering tolerance.
    #[arg(long)]
    pub tol_cluster: Option<f64>,
    /// Relative conditioning threshold for the eigenvector matrix.
    #[arg(long)]
    pub tol_diag: Option<f64>,
    /// Threshold on |Re lambda| for zero modes.
    #[arg(long)]
    pub tol_zero: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Spectral,
    Expm,
    Dyson,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues, classification and stability of the model generator.
    Spectrum {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tol: Tolerances,
    },
    /// Trajectory table on the model's time grid.
    Propagate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutputFormat,
        #[arg(long, value_enum, default_value = "spectral")]
        method: Method,
        /// Dyson series order (1 to 3).
        #[arg(long, default_value_t = 2)]
        order: usize,
        /// Quadrature steps for the Dyson route.
        #[arg(long, default_value_t = 64)]
        steps: usize,
        #[command(flatten)]
        tol: Tolerances,
    },
    /// The unique stationary density matrix.
    SteadyState {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tol: Tolerances,
    },
    /// Kraus operators of the channel `e^{tL}`.
    Kraus {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        time: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Choi eigenvalues at or below this are dropped.
        #[arg(long)]
        tol_kraus: Option<f64>,
    },
    /// Two-level regression checks, plus seeded randomized checks.
    DemoTls {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parses and validates a model file.
    Validate {
        #[arg(long)]
        model: PathBuf,
    },
}

fn error_kind(e: &Error) -> (&'static str, i32) {
    match e {
        Error::Io(_) => ("io", EXIT_IO),
        Error::Schema { .. } | Error::NegativeRate { .. } | Error::InvalidDensityMatrix(_) => {
            ("schema", EXIT_SCHEMA)
        }
        Error::ShapeMismatch { .. }
        | Error::DimensionMismatch { .. }
        | Error::NotSquare { .. }
        | Error::BadSuperKetLength { .. }
        | Error::NotPerfectSquare(_) => ("shape_mismatch", EXIT_SHAPE),
        Error::NonHermitianHamiltonian { .. } => ("non_hermitian_hamiltonian", EXIT_NON_HERMITIAN),
        Error::Unstable { .. } => ("unstable", EXIT_UNSTABLE),
        Error::NonUniqueSteadyState { .. } => ("non_unique_steady_state", EXIT_NON_UNIQUE),
        Error::NotCompletelyPositive { .. } => ("not_completely_positive", EXIT_NOT_CP),
        _ => ("numerical", EXIT_NUMERICAL),
    }
}

/// The machine-readable error object and its exit code.
pub fn error_report(e: &Error) -> (Value, i32) {
    let (kind, code) = error_kind(e);
    let path = match e {
        Error::Schema { path, .. } | Error::ShapeMismatch { path, .. } => Value::from(path.as_str()),
        _ => Value::Null,
    };
    let mut body = json!({"kind": kind, "message": e.to_string(), "path": path});
    if let Error::NonUniqueSteadyState { basis } = e {
        body["modes"] = basis.iter().map(|op| matrix_json(op.matrix())).collect();
    }
    (json!({ "error": body }), code)
}

fn complex_json(z: C64) -> Value {
    json!([z.re, z.im])
}

fn matrix_json(m: &CMatrix) -> Value {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| complex_json(m[(i, j)])).collect::<Value>())
        .collect()
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn emit(text: &str, out_path: Option<&Path>, out: &mut dyn Write) -> Result<(), Error> {
    match out_path {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => out.write_all(text.as_bytes()).map_err(Error::from),
    }
}

fn load(model: &Path) -> Result<ModelSpec, Error> {
    read_model(model).map_err(|e| match e {
        Error::Io(io) => Error::Io(std::io::Error::new(
            io.kind(),
            format!("{}: {io}", model.display()),
        )),
        other => other,
    })
}

fn options(spec: &ModelSpec, tol: &Tolerances) -> AnalyzeOptions {
    let base = spec.analyze_options();
    AnalyzeOptions {
        tol_cluster: tol.tol_cluster.or(base.tol_cluster),
        tol_diag: tol.tol_diag.or(base.tol_diag),
        tol_zero: tol.tol_zero.or(base.tol_zero),
        ..base
    }
}

fn class_name(c: SpectralClass) -> &'static str {
    match c {
        SpectralClass::SkewHermitian => "skew_hermitian",
        SpectralClass::Diagonalizable => "diagonalizable",
        SpectralClass::Defective => "defective",
    }
}

fn spectrum(model: &Path, tol: &Tolerances) -> Result<String, Error> {
    let spec = load(model)?;
    let sys = analyze(&spec.liouvillian()?, &options(&spec, tol))?;
    let report = stability_report(&sys);
    let clusters: Vec<Value> = sys
        .clusters()
        .iter()
        .map(|c| {
            json!({
                "eigenvalue": complex_json(c.eigenvalue),
                "algebraic": c.algebraic,
                "geometric": c.geometric,
                "max_chain": c.max_chain,
            })
        })
        .collect();
    let v = json!({
        "dim": sys.dim(),
        "class": class_name(sys.class()),
        "eigenvalues": sys.eigenvalues().iter().map(|&z| complex_json(z)).collect::<Vec<_>>(),
        "clusters": clusters,
        "stability": {
            "max_real_part": report.max_real_part,
            "stable": report.stable,
            "flagged": report.flagged,
        },
        "biorthonormality_defect": sys.biorthonormality_defect(),
    });
    Ok(pretty(&v))
}

fn states(
    spec: &ModelSpec,
    tol: &Tolerances,
    method: Method,
    order: usize,
    steps: usize,
) -> Result<Trajectory, Error> {
    let l = spec.liouvillian()?;
    let rho0 = &spec.initial_state;
    let times = &spec.times;
    let states = match method {
        Method::Spectral => {
            let sys = analyze(&l, &options(spec, tol))?;
            return liouville_core::spectral::propagate_system(&sys, rho0, times);
        }
        Method::Expm => times
            .iter()
            .map(|&t| propagate_expm_oracle(&l, rho0, t))
            .collect::<Result<Vec<_>, _>>()?,
        Method::Dyson => {
            let l0 = unitary_liouvillian(&spec.hamiltonian)?;
            let lp = l.op() - l0.op();
            times
                .iter()
                .map(|&t| {
                    let u = dyson_propagator(&l0, |_| lp.clone(), t, order, steps)?.propagator;
                    let v = u.apply(&mho(rho0.operator()))?;
                    DensityMatrix::from_hermitized(&liouville_core::mho_inv(&v)?).map_err(|e| {
                        Error::InvalidParameter(format!(
                            "dyson series of order {order} is not converged at t = {t}: {e}"
                        ))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?
        }
    };
    Ok(Trajectory {
        times: times.clone(),
        states,
    })
}

fn steady(model: &Path, tol: &Tolerances) -> Result<String, Error> {
    let spec = load(model)?;
    let sys = analyze(&spec.liouvillian()?, &options(&spec, tol))?;
    let rho = steady_state(&sys)?;
    let v = json!({
        "rho": matrix_json(rho.matrix()),
        "trace": complex_json(rho.operator().trace()),
        "purity": purity(&rho),
    });
    Ok(pretty(&v))
}

fn kraus(model: &Path, t: f64, tol: Option<f64>) -> Result<String, Error> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "time {t} must be finite and non-negative"
        )));
    }
    let spec = load(model)?;
    let s = spec.liouvillian()?.op().scale(C64::new(t, 0.0)).expm()?;
    let set: KrausSet = kraus_from_superop(&s, tol)?;
    let v = json!({
        "time": t,
        "count": set.len(),
        "operators": set.ops().iter().map(|k| matrix_json(k.matrix())).collect::<Vec<_>>(),
        "completeness_defect": completeness_defect(&set),
    });
    Ok(pretty(&v))
}

/// Seeded checks on random instances: the triple-product identity and
/// Kraus extraction of random channels.
pub fn seeded_checks(seed: u64) -> Vec<CheckOutcome> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut triple: f64 = 0.0;
    let mut channels: f64 = 0.0;
    for k in 0..100 {
        let d = 2 + k % 3;
        let a = random::complex_operator(&mut rng, d);
        let b = random::complex_operator(&mut rng, d);
        let c = random::complex_operator(&mut rng, d);
        let lhs = mho(&(&(&a * &b) * &c));
        let rhs = triple_superop(&a, &c).and_then(|s| s.apply(&mho(&b)));
        triple = triple.max(rhs.map_or(f64::INFINITY, |r| (&lhs - &r).max_abs()));

        let set = KrausSet::new(random::kraus_ops(&mut rng, d, 1 + k % 4));
        let err = set.and_then(|set| {
            let s = channel_superop(&set);
            let back = channel_superop(&kraus_from_superop(&s, None)?);
            Ok(if channels_equal(&s, &back, 1e-10)? {
                (s - back).max_abs()
            } else {
                f64::INFINITY
            })
        });
        channels = channels.max(err.unwrap_or(f64::INFINITY));
    }
    let outcome = |name, error: f64, tolerance| CheckOutcome {
        name,
        passed: error <= tolerance,
        error,
        tolerance,
    };
    vec![
        outcome("random triple products", triple, 1e-12),
        outcome("random kraus extraction", channels, 1e-10),
    ]
}

fn demo(seed: u64) -> (String, bool) {
    let mut checks = tls_checks();
    checks.extend(seeded_checks(seed));
    let mut text = String::new();
    for c in &checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        text.push_str(&format!(
            "{verdict} {}: error {:.3e} (tol {:.0e})\n",
            c.name, c.error, c.tolerance
        ));
    }
    (text, checks.iter().all(|c| c.passed))
}

fn validate(model: &Path) -> Result<String, Error> {
    let spec = load(model)?;
    spec.liouvillian()?;
    let v = json!({
        "valid": true,
        "dim": spec.dim,
        "jumps": spec.jumps.len(),
        "times": spec.times.len(),
    });
    Ok(pretty(&v))
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<i32, Error> {
    match cmd {
        Command::Spectrum {
            model,
            out: path,
            tol,
        } => emit(&spectrum(&model, &tol)?, path.as_deref(), out)?,
        Command::Propagate {
            model,
            out: path,
            format,
            method,
            order,
            steps,
            tol,
        } => {
            let spec = load(&model)?;
            let tr = states(&spec, &tol, method, order, steps)?;
            let rec = TrajectoryRecord::from_trajectory(&tr, &spec.options.outputs)?;
            let format = match format {
                OutputFormat::Csv => Format::Csv,
                OutputFormat::Json => Format::Json,
            };
            emit(&rec.to_format(format)?, path.as_deref(), out)?;
        }
        Command::SteadyState {
            model,
            out: path,
            tol,
        } => emit(&steady(&model, &tol)?, path.as_deref(), out)?,
        Command::Kraus {
            model,
            time,
            out: path,
            tol_kraus,
        } => emit(&kraus(&model, time, tol_kraus)?, path.as_deref(), out)?,
        Command::DemoTls { seed, out: path } => {
            let (text, passed) = demo(seed);
            emit(&text, path.as_deref(), out)?;
            if !passed {
                return Ok(EXIT_CHECK_FAILED);
            }
        }
        Command::Validate { model } => emit(&validate(&model)?, None, out)?,
    }
    Ok(EXIT_OK)
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let (report, code) = error_report(&e);
            let _ = err.write_all(pretty(&report).as_bytes());
            code
        }
    }
}
