//! Command implementations for the `eigenphase` binary.
//!
//! Parsing is clap-derive; [`run`] executes a parsed [`Cli`] against caller
//! supplied output/error sinks and returns the process exit code, which keeps
//! every command testable without spawning processes. Errors are emitted on
//! the error sink as one machine-readable JSON object.

use clap::{Args, Parser, Subcommand};
use eigenphase::oracle::{charpoly_by_interpolation, det_at, exact_charpoly_small};
use eigenphase::{
    charpoly_conjugate, charpoly_continuant, fallback_roots, radius_lower_bound, sensitivity,
    solve_all_branches, solve_branch, solve_spectrum, Error as CoreError, ParameterSet,
    PhaseQuery, SpectrumReport, StructuredMatrix,
};
use num::BigRational;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Parser, Debug)]
#[command(
    name = "eigenphase",
    about = "Eigenvalues of triangular-product structured matrices via phase equations",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute the full spectrum with deflation, phase solving and fallback
    Spectrum(SpectrumArgs),
    /// Emit characteristic-polynomial coefficients as JSON
    Charpoly(CharpolyArgs),
    /// Solve phase-equation branches individually
    PhaseSolve(PhaseSolveArgs),
    /// Sweep one parameter and emit eigenvalue trajectories as CSV
    Locus(LocusArgs),
    /// Partial derivatives of one eigenvalue with respect to every parameter
    Sensitivity(SensitivityArgs),
    /// Newton lower bound on the spectral radius (all-positive sets)
    Bound(BoundArgs),
    /// Time the solver on growing all-equal parameter sets
    Bench(BenchArgs),
    /// Debugging access to the brute-force oracles
    #[command(hide = true)]
    Oracle(OracleArgs),
}

#[derive(Args, Debug)]
pub struct ParamsSource {
    /// Inline parameter list, comma separated (for `locus`, the swept
    /// position may hold the placeholder X)
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    pub params: Option<String>,
    /// Parameter file: one real per line, or a JSON array
    #[arg(long, value_name = "PATH", conflicts_with = "params")]
    pub params_file: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub source: ParamsSource,
    /// Absolute eigenvalue tolerance (relative to max(1, |lambda|))
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// JSON output (default)
    #[arg(long, conflicts_with = "csv")]
    pub json: bool,
    /// CSV output: re,im,mult,method,residual
    #[arg(long)]
    pub csv: bool,
}

#[derive(Args, Debug)]
pub struct CharpolyArgs {
    #[command(flatten)]
    pub source: ParamsSource,
    /// Which recursion to run: the monic conjugate-pair one or the
    /// continuant (determinant) one scaled by 1/prod(alpha)
    #[arg(long, value_parser = ["conjugate", "continuant"], default_value = "conjugate")]
    pub form: String,
}

#[derive(Args, Debug)]
pub struct PhaseSolveArgs {
    #[command(flatten)]
    pub source: ParamsSource,
    /// Branch index (1..n for all-positive sets; any integer otherwise)
    #[arg(long, allow_hyphen_values = true, conflicts_with = "all")]
    pub k: Option<i64>,
    /// Solve every branch
    #[arg(long)]
    pub all: bool,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct LocusArgs {
    #[command(flatten)]
    pub source: ParamsSource,
    /// Position of the swept parameter (0-based)
    #[arg(long)]
    pub index: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub from: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub to: f64,
    /// Number of uniform sweep points (>= 2); the grid is refined tenfold
    /// around every exact +/- pair value of the swept parameter
    #[arg(long)]
    pub steps: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct SensitivityArgs {
    #[command(flatten)]
    pub source: ParamsSource,
    /// Which eigenvalue, 1-based among the real eigenvalues sorted
    /// descending (1 = spectral radius for all-positive sets)
    #[arg(long)]
    pub eig: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[command(flatten)]
    pub source: ParamsSource,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Seed for the (reproducible) choice of the equal parameter value
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Problem sizes to time
    #[arg(long, value_name = "LIST", default_value = "100,1000,10000,100000")]
    pub sizes: String,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[command(subcommand)]
    pub command: OracleCommand,
}

#[derive(Subcommand, Debug)]
pub enum OracleCommand {
    /// det(xI - J) by pivoted elimination
    Det {
        #[command(flatten)]
        source: ParamsSource,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
    },
    /// Characteristic polynomial recovered from determinant samples
    Interp {
        #[command(flatten)]
        source: ParamsSource,
    },
    /// Exact-arithmetic scaling identity between the two recursions;
    /// parameters are fractions like 1/2,-1/3,2
    ExactCheck {
        #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
        params: String,
    },
}

#[derive(Debug)]
struct CliError {
    kind: String,
    message: String,
}

impl CliError {
    fn new(kind: &str, message: impl Into<String>) -> Self {
        CliError {
            kind: kind.to_string(),
            message: message.into(),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let kind = match &e {
            CoreError::EmptyParameterList => "empty-parameter-list",
            CoreError::NonFiniteParameter { .. } => "non-finite-parameter",
            CoreError::ZeroParameter { .. } => "zero-parameter",
            CoreError::DomainError { .. } => "domain-error",
            CoreError::NoSolutionOnBranch { .. } => "no-solution-on-branch",
            CoreError::ToleranceNotReached { .. } => "tolerance-not-reached",
            CoreError::NonConvergence { .. } => "non-convergence",
            CoreError::IncompleteSpectrum { .. } => "incomplete-spectrum",
            CoreError::CertificationFailure { .. } => "certification-failure",
            CoreError::SingularSensitivity { .. } => "singular-sensitivity",
            CoreError::ClassificationError { .. } => "classification-error",
            CoreError::ConditioningError { .. } => "conditioning-error",
            CoreError::InvalidPolynomial { .. } => "invalid-polynomial",
        };
        CliError::new(kind, e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new("io", e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Execute a parsed command line. Returns the process exit code; on failure
/// one JSON error object is written to `err`.
pub fn run<W: Write, E: Write>(cli: Cli, out: &mut W, err: &mut E) -> i32 {
    match dispatch(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let obj = serde_json::json!({"error": {"kind": e.kind, "message": e.message}});
            let _ = writeln!(err, "{obj}");
            1
        }
    }
}

fn dispatch<W: Write>(cli: Cli, out: &mut W) -> CliResult<()> {
    match cli.command {
        Command::Spectrum(args) => cmd_spectrum(args, out),
        Command::Charpoly(args) => cmd_charpoly(args, out),
        Command::PhaseSolve(args) => cmd_phase_solve(args, out),
        Command::Locus(args) => cmd_locus(args, out),
        Command::Sensitivity(args) => cmd_sensitivity(args, out),
        Command::Bound(args) => cmd_bound(args, out),
        Command::Bench(args) => cmd_bench(args, out),
        Command::Oracle(args) => cmd_oracle(args, out),
    }
}

// ---- parameter input ------------------------------------------------------

fn read_tokens(source: &ParamsSource) -> CliResult<Vec<String>> {
    if let Some(inline) = &source.params {
        return Ok(inline
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(str::to_string)
            .collect());
    }
    let path = source
        .params_file
        .as_ref()
        .ok_or_else(|| CliError::new("usage", "one of --params or --params-file is required"))?;
    let text = std::fs::read_to_string(path)?;
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        let values: Vec<f64> = serde_json::from_str(trimmed)
            .map_err(|e| CliError::new("parse", format!("invalid JSON parameter array: {e}")))?;
        return Ok(values.iter().map(|v| v.to_string()).collect());
    }
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect())
}

fn parse_params(source: &ParamsSource) -> CliResult<ParameterSet> {
    let tokens = read_tokens(source)?;
    let mut values = Vec::with_capacity(tokens.len());
    for (i, t) in tokens.iter().enumerate() {
        let v: f64 = t
            .parse()
            .map_err(|_| CliError::new("parse", format!("parameter {i} is not a number: {t:?}")))?;
        values.push(v);
    }
    Ok(ParameterSet::new(values)?)
}

/// Parse parameters for the locus sweep: the swept index may hold a
/// placeholder token (X, x or _) instead of a number.
fn parse_params_with_placeholder(source: &ParamsSource, index: usize) -> CliResult<Vec<f64>> {
    let tokens = read_tokens(source)?;
    let mut values = Vec::with_capacity(tokens.len());
    for (i, t) in tokens.iter().enumerate() {
        if t == "X" || t == "x" || t == "_" {
            if i != index {
                return Err(CliError::new(
                    "usage",
                    format!("placeholder at position {i} but --index is {index}"),
                ));
            }
            values.push(0.0); // overwritten at every sweep point
            continue;
        }
        let v: f64 = t
            .parse()
            .map_err(|_| CliError::new("parse", format!("parameter {i} is not a number: {t:?}")))?;
        values.push(v);
    }
    if index >= values.len() {
        return Err(CliError::new(
            "usage",
            format!("--index {index} out of range for {} parameters", values.len()),
        ));
    }
    Ok(values)
}

// ---- commands -------------------------------------------------------------

fn cmd_spectrum<W: Write>(args: SpectrumArgs, out: &mut W) -> CliResult<()> {
    let params = parse_params(&args.source)?;
    let report = solve_spectrum(&params, args.tol)?;
    if args.csv {
        writeln!(out, "re,im,mult,method,residual")?;
        for e in &report.eigenvalues {
            writeln!(
                out,
                "{},{},{},{},{:e}",
                fmt_float(e.value.re),
                fmt_float(e.value.im),
                e.multiplicity,
                method_name(e.method),
                e.residual
            )?;
        }
    } else {
        writeln!(out, "{}", serde_json::to_string(&report).unwrap())?;
    }
    Ok(())
}

fn cmd_charpoly<W: Write>(args: CharpolyArgs, out: &mut W) -> CliResult<()> {
    let params = parse_params(&args.source)?;
    let poly = match args.form.as_str() {
        "continuant" => charpoly_continuant(&params)?,
        _ => charpoly_conjugate(&params)?,
    };
    writeln!(out, "{}", serde_json::to_string(&poly).unwrap())?;
    Ok(())
}

#[derive(Serialize)]
struct BranchSolution<'a> {
    k: i64,
    #[serde(flatten)]
    solution: &'a eigenphase::PhaseSolution,
}

fn cmd_phase_solve<W: Write>(args: PhaseSolveArgs, out: &mut W) -> CliResult<()> {
    let params = parse_params(&args.source)?;
    if args.all {
        let all = solve_all_branches(&params, args.tol)?;
        let rows: Vec<BranchSolution> = all
            .iter()
            .map(|(k, s)| BranchSolution { k: *k, solution: s })
            .collect();
        writeln!(out, "{}", serde_json::to_string(&rows).unwrap())?;
        return Ok(());
    }
    let k = args
        .k
        .ok_or_else(|| CliError::new("usage", "either --k <int> or --all is required"))?;
    let query = PhaseQuery::new(&params, k).with_tol(args.tol);
    let solutions = solve_branch(&query)?;
    if solutions.len() == 1 {
        writeln!(out, "{}", serde_json::to_string(&solutions[0]).unwrap())?;
    } else {
        writeln!(out, "{}", serde_json::to_string(&solutions).unwrap())?;
    }
    Ok(())
}

fn cmd_locus<W: Write>(args: LocusArgs, out: &mut W) -> CliResult<()> {
    if args.steps < 2 {
        return Err(CliError::new("usage", "--steps must be at least 2"));
    }
    if !(args.to > args.from) {
        return Err(CliError::new("usage", "--to must exceed --from"));
    }
    let template = parse_params_with_placeholder(&args.source, args.index)?;
    let step = (args.to - args.from) / (args.steps - 1) as f64;

    let mut grid: Vec<f64> = (0..args.steps)
        .map(|i| args.from + step * i as f64)
        .collect();
    // Exact +/- pairs of the swept parameter happen on a measure-zero set a
    // uniform grid would miss; refine tenfold around each and insert the
    // exact pair value itself.
    for (j, &a) in template.iter().enumerate() {
        if j == args.index {
            continue;
        }
        let pinch = -a;
        if pinch >= args.from && pinch <= args.to {
            grid.push(pinch);
            for i in 1..=5 {
                let offset = step / 10.0 * i as f64;
                for candidate in [pinch - offset, pinch + offset] {
                    if candidate >= args.from && candidate <= args.to {
                        grid.push(candidate);
                    }
                }
            }
        }
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();

    writeln!(out, "alpha,re,im,mult,method,residual")?;
    for &alpha in &grid {
        let mut values = template.clone();
        values[args.index] = alpha;
        let params = ParameterSet::new(values)?;
        let report = solve_spectrum(&params, args.tol)?;
        for e in &report.eigenvalues {
            writeln!(
                out,
                "{},{},{},{},{},{:e}",
                fmt_float(alpha),
                fmt_float(e.value.re),
                fmt_float(e.value.im),
                e.multiplicity,
                method_name(e.method),
                e.residual
            )?;
        }
    }
    Ok(())
}

fn cmd_sensitivity<W: Write>(args: SensitivityArgs, out: &mut W) -> CliResult<()> {
    let params = parse_params(&args.source)?;
    let report = solve_spectrum(&params, args.tol)?;
    let reals = report.real_eigenvalues_desc();
    if args.eig == 0 || args.eig > reals.len() {
        return Err(CliError::new(
            "usage",
            format!(
                "--eig must be in 1..={} (1-based index into the descending real eigenvalues)",
                reals.len()
            ),
        ));
    }
    let lambda = reals[args.eig - 1];
    let row = sensitivity(&params, lambda)?;
    writeln!(out, "{}", serde_json::to_string(&row).unwrap())?;
    Ok(())
}

fn cmd_bound<W: Write>(args: BoundArgs, out: &mut W) -> CliResult<()> {
    let params = parse_params(&args.source)?;
    let bound = radius_lower_bound(&params)?;
    writeln!(out, "{}", fmt_float(bound))?;
    Ok(())
}

fn cmd_bench<W: Write>(args: BenchArgs, out: &mut W) -> CliResult<()> {
    let sizes: Vec<usize> = args
        .sizes
        .split(',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| CliError::new("parse", format!("invalid size {t:?}")))
        })
        .collect::<CliResult<_>>()?;
    let mut rng = StdRng::seed_from_u64(args.seed);
    // equal parameter away from the closed-form special values so the phase
    // solver actually runs
    let mut alpha = rng.gen_range(0.5..2.0);
    while alpha == 1.0 {
        alpha = rng.gen_range(0.5..2.0);
    }
    writeln!(out, "method,n,alpha,seconds,max_residual")?;
    for &n in &sizes {
        let params = ParameterSet::new(vec![alpha; n])?;
        let start = Instant::now();
        let report = solve_spectrum(&params, 1e-12)?;
        let seconds = start.elapsed().as_secs_f64();
        writeln!(
            out,
            "phase,{n},{},{seconds:.6},{:e}",
            fmt_float(alpha),
            report.max_residual
        )?;
    }
    // coefficient-route baseline, feasible only at the smallest size
    if let Some(&n) = sizes.iter().min() {
        if n <= 100 {
            let params = ParameterSet::new(vec![alpha; n])?;
            let start = Instant::now();
            let poly = charpoly_conjugate(&params)?;
            let roots = fallback_roots(&poly)?;
            let seconds = start.elapsed().as_secs_f64();
            let max_res = roots
                .iter()
                .map(|&z| poly.eval_complex(z).norm())
                .fold(0.0f64, f64::max);
            writeln!(out, "coefficients,{n},{},{seconds:.6},{max_res:e}", fmt_float(alpha))?;
        }
    }
    Ok(())
}

fn cmd_oracle<W: Write>(args: OracleArgs, out: &mut W) -> CliResult<()> {
    match args.command {
        OracleCommand::Det { source, x } => {
            let params = parse_params(&source)?;
            let m = StructuredMatrix::new(&params);
            let det = det_at(&m, x);
            writeln!(out, "{}", serde_json::json!({"x": x, "det": det}))?;
        }
        OracleCommand::Interp { source } => {
            let params = parse_params(&source)?;
            let poly = charpoly_by_interpolation(&StructuredMatrix::new(&params))?;
            writeln!(out, "{}", serde_json::to_string(&poly).unwrap())?;
        }
        OracleCommand::ExactCheck { params } => {
            let alphas = parse_rationals(&params)?;
            let coeffs = exact_charpoly_small(&alphas)?;
            let printable: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
            writeln!(
                out,
                "{}",
                serde_json::json!({"identity": "holds", "degree": alphas.len(), "coeffs": printable})
            )?;
        }
    }
    Ok(())
}

fn parse_rationals(list: &str) -> CliResult<Vec<BigRational>> {
    list.split(',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            let t = t.trim();
            let (num, den) = match t.split_once('/') {
                Some((n, d)) => (n, d),
                None => (t, "1"),
            };
            let n: i64 = num
                .parse()
                .map_err(|_| CliError::new("parse", format!("invalid rational {t:?}")))?;
            let d: i64 = den
                .parse()
                .map_err(|_| CliError::new("parse", format!("invalid rational {t:?}")))?;
            if d == 0 {
                return Err(CliError::new("parse", format!("zero denominator in {t:?}")));
            }
            Ok(BigRational::new(n.into(), d.into()))
        })
        .collect()
}

fn method_name(m: eigenphase::Method) -> &'static str {
    match m {
        eigenphase::Method::ClosedForm => "ClosedForm",
        eigenphase::Method::Deflation => "Deflation",
        eigenphase::Method::PhaseBranch => "PhaseBranch",
        eigenphase::Method::SubQuarterScan => "SubQuarterScan",
        eigenphase::Method::PolyFallback => "PolyFallback",
    }
}

/// Shortest round-trip decimal form, so identical runs emit identical bytes.
fn fmt_float(v: f64) -> String {
    let mut s = format!("{v}");
    if s == "-0" {
        s = "0".to_string();
    }
    s
}

/// Strip the timing fields from a spectrum report for determinism checks.
pub fn report_without_timings(report: &SpectrumReport) -> serde_json::Value {
    let mut v = serde_json::to_value(report).unwrap();
    v.as_object_mut().unwrap().remove("timings");
    v
}
