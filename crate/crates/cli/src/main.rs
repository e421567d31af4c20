use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use rough_hausdorff::bounds::{self, C5Variant};
use rough_hausdorff::harness::{self, config::parse_symbol, SuiteConfig, VerificationReport};
use rough_hausdorff::{
    AngularFn, AngularProfile, CommutatorOperator, DyadicWindow, Error, HausdorffOperator, NormConfig, RadialKernel, RadialProfile,
    SpaceKind, SpaceSpec, TestFunction, Weight,
};

#[derive(Parser)]
#[command(name = "rough-hausdorff", version, about = "Rough Hausdorff operators and weighted Herz/Morrey norms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the operator (or its commutator) at points.
    Apply(ApplyArgs),
    /// Evaluate a function-space norm.
    Norm(NormArgs),
    /// Evaluate a boundedness constant.
    Constant(ConstantArgs),
    /// Run a verification suite and write report artifacts.
    Verify(VerifyArgs),
    /// Re-render a stored report.
    Report(ReportArgs),
}

/// A separable function `g(|x|)·h(x/|x|)`.
#[derive(Args)]
struct FunctionArgs {
    /// Radial part, an expression in `r`.
    #[arg(long)]
    radial: String,
    /// Power-law exponent of the radial part at 0.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    radial_e0: f64,
    /// Power-law exponent of the radial part at infinity (`-inf` for compact support or faster decay).
    #[arg(long, default_value = "-inf", allow_hyphen_values = true)]
    radial_einf: String,
    /// Angular part, an expression in `theta`, `phi`, `x1`, `x2`, `x3`.
    #[arg(long, default_value = "1")]
    angular: String,
}

impl FunctionArgs {
    fn build(&self) -> Result<TestFunction, Error> {
        let einf = parse_f64(&self.radial_einf)?;
        let radial = RadialProfile::from_expr(&self.radial, self.radial_e0, einf)?;
        Ok(TestFunction::separable(radial, AngularFn::from_expr(&self.angular)?))
    }
}

#[derive(Args)]
struct ApplyArgs {
    /// Kernel preset: hardy:<n>, adjoint_hardy, gaussian, double_exponential, power:<a>:<lo>:<hi>.
    #[arg(long)]
    phi: String,
    /// Ω on the sphere.
    #[arg(long, default_value = "1")]
    omega: String,
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    f: FunctionArgs,
    /// Evaluation point as comma-separated coordinates; repeatable.
    #[arg(long = "x", required = true, allow_hyphen_values = true)]
    points: Vec<String>,
    /// Lipschitz symbol for the commutator: power:<β>, constant:<c>:<β>, linear:<e1>,….
    #[arg(long)]
    symbol: Option<String>,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args)]
struct NormArgs {
    /// lq, morrey, herz, morrey-herz, two-weight-morrey, two-weight-herz, two-weight-morrey-herz.
    #[arg(long)]
    space: String,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    gamma: f64,
    /// Angular factor of the weight.
    #[arg(long, default_value = "1")]
    weight_angular: String,
    /// Angular factor of a second weight (two-weight spaces); defaults to the first.
    #[arg(long)]
    weight2_angular: Option<String>,
    #[command(flatten)]
    f: FunctionArgs,
    #[arg(long, default_value_t = -24, allow_hyphen_values = true)]
    k_min: i32,
    #[arg(long, default_value_t = 24)]
    k_max: i32,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Report truncated values instead of failing on non-decaying tails.
    #[arg(long)]
    lenient: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstantKind {
    C1,
    #[value(name = "c1_1")]
    C1_1,
    C2,
    #[value(name = "c2_proof_alpha")]
    C2ProofAlpha,
    C3,
    C4,
    #[value(name = "c5_herz")]
    C5Herz,
    #[value(name = "c5_mherz")]
    C5Mherz,
}

#[derive(Args)]
struct ConstantArgs {
    #[arg(long, value_enum)]
    id: ConstantKind,
    #[arg(long)]
    phi: String,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    gamma: f64,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite configuration (JSON). Defaults to the bundled suite.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for report.json, report.csv, plot data and timing.json.
    #[arg(long, default_value = "report")]
    out: PathBuf,
    /// Print the report as a table.
    #[arg(long)]
    quiet: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Args)]
struct ReportArgs {
    /// A report.json written by `verify`.
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config { .. } | Error::Parameter(_) | Error::Expression { .. } => 2,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

fn io_failure(what: &str, e: std::io::Error) -> Failure {
    Failure { code: 2, message: format!("{what}: {e}") }
}

fn parse_f64(s: &str) -> Result<f64, Error> {
    match s.trim() {
        "inf" | "+inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        t => t.parse().map_err(|_| Error::Parameter(format!("not a number: '{s}'"))),
    }
}

fn parse_point(s: &str, n: usize) -> Result<Vec<f64>, Error> {
    let x = s.split(',').map(parse_f64).collect::<Result<Vec<_>, _>>()?;
    if x.len() != n {
        return Err(Error::Parameter(format!("point '{s}' has {} coordinates, expected {n}", x.len())));
    }
    Ok(x)
}

fn pretty(v: &serde_json::Value) -> String {
    format!("{}\n", serde_json::to_string_pretty(v).expect("JSON values serialise"))
}

/// Command output and exit status.
type Outcome = Result<(String, u8), Failure>;

fn apply(a: ApplyArgs) -> Outcome {
    rough_hausdorff::check_dim(a.n)?;
    let phi = RadialKernel::preset(&a.phi)?;
    let omega = AngularProfile::new(AngularFn::from_expr(&a.omega)?, a.n, false)?;
    let f = a.f.build()?;
    let op = HausdorffOperator::new(phi, omega);
    let symbol = a.symbol.as_deref().map(parse_symbol).transpose()?;
    let mut out = Vec::new();
    for s in &a.points {
        let x = parse_point(s, a.n)?;
        let value = match &symbol {
            Some(b) => CommutatorOperator::new(op.clone(), b.clone()).apply(&f, &x, a.tol)?,
            None => op.apply(&f, &x, a.tol)?,
        };
        out.push(json!({ "x": x, "value": value }));
    }
    Ok((pretty(&json!({ "operator": if symbol.is_some() { "commutator" } else { "hausdorff" }, "values": out })), 0))
}

fn norm(a: NormArgs) -> Outcome {
    let kind: SpaceKind = a.space.parse()?;
    let w1 = Weight::new(a.gamma, AngularFn::from_expr(&a.weight_angular)?, a.n, None)?;
    let two_weight = matches!(kind, SpaceKind::TwoWeightMorrey | SpaceKind::TwoWeightHerz | SpaceKind::TwoWeightMorreyHerz);
    let w2 = if two_weight {
        let ang = a.weight2_angular.as_deref().unwrap_or(&a.weight_angular);
        Some(Weight::new(a.gamma, AngularFn::from_expr(ang)?, a.n, None)?)
    } else {
        None
    };
    let spec = SpaceSpec::build(kind, a.p, a.q, a.alpha, a.lambda, w1, w2)?;
    let mut cfg = NormConfig { window: DyadicWindow { k_min: a.k_min, k_max: a.k_max }, tol: a.tol, ..NormConfig::default() };
    if a.lenient {
        cfg = cfg.lenient();
    }
    let f = a.f.build()?;
    Ok((pretty(&spec.norm(&f, &cfg)?.to_json()), 0))
}

fn need(v: Option<f64>, name: &str) -> Result<f64, Error> {
    v.ok_or_else(|| Error::Parameter(format!("--{name} is required for this constant")))
}

fn constant(a: ConstantArgs) -> Outcome {
    let phi = RadialKernel::preset(&a.phi)?;
    let (n, g, tol) = (a.n, a.gamma, a.tol);
    let c = match a.id {
        ConstantKind::C1 => bounds::c1(&phi, n, g, need(a.lambda, "lambda")?, tol)?,
        ConstantKind::C1_1 => bounds::c1_1(&phi, n, g, need(a.lambda, "lambda")?, tol)?,
        ConstantKind::C2 => bounds::c2(&phi, n, g, need(a.q, "q")?, None, tol)?,
        ConstantKind::C2ProofAlpha => bounds::c2(&phi, n, g, need(a.q, "q")?, Some(need(a.alpha, "alpha")?), tol)?,
        ConstantKind::C3 => bounds::c3(&phi, n, g, need(a.q, "q")?, need(a.lambda, "lambda")?, need(a.alpha, "alpha")?, tol)?,
        ConstantKind::C4 => {
            let (p, lambda, beta) = (need(a.p, "p")?, need(a.lambda, "lambda")?, need(a.beta, "beta")?);
            let l1 = bounds::lambda1(n, g, p, lambda, beta);
            bounds::c4(&phi, n, g, p, l1, beta, Some(lambda), tol)?
        }
        ConstantKind::C5Herz | ConstantKind::C5Mherz => {
            let (q, a2, beta) = (need(a.q, "q")?, need(a.alpha2, "alpha2")?, need(a.beta, "beta")?);
            let variant = match a.id {
                ConstantKind::C5Herz => C5Variant::Herz,
                _ => C5Variant::MorreyHerz { lambda: need(a.lambda, "lambda")? },
            };
            bounds::c5(&phi, n, g, q, bounds::alpha1(n, g, a2, beta), beta, Some(a2), variant, tol)?
        }
    };
    Ok((pretty(&c.to_json()), 0))
}

fn verify(a: VerifyArgs) -> Outcome {
    let cfg = match &a.config {
        Some(path) => SuiteConfig::from_file(path)?,
        None => SuiteConfig::bundled(),
    };
    let start = Instant::now();
    let report = harness::run_suite(&cfg)?;
    let elapsed = start.elapsed().as_secs_f64();
    std::fs::create_dir_all(&a.out).map_err(|e| io_failure("creating output directory", e))?;
    report.write_artifacts(&a.out).map_err(|e| io_failure("writing report", e))?;
    let timing = json!({ "runtime_seconds": elapsed, "cases": report.cases.len() });
    std::fs::write(a.out.join("timing.json"), format!("{}\n", serde_json::to_string_pretty(&timing).expect("JSON")))
        .map_err(|e| io_failure("writing timing", e))?;
    let mut text = if a.quiet { String::new() } else { report.to_text() };
    text.push_str(&format!("wrote {} in {elapsed:.2} s\n", a.out.display()));
    Ok((text, if report.has_failures() { 1 } else { 0 }))
}

fn report(a: ReportArgs) -> Outcome {
    let text = std::fs::read_to_string(&a.input).map_err(|e| io_failure(&a.input.display().to_string(), e))?;
    let r = VerificationReport::from_json_str(&text)?;
    let text = match a.format {
        Format::Text => r.to_text(),
        Format::Csv => r.to_csv(),
        Format::Json => r.to_json_string(),
    };
    Ok((text, if r.has_failures() { 1 } else { 0 }))
}

fn dispatch(cli: Cli) -> Outcome {
    match cli.command {
        Command::Apply(a) => apply(a),
        Command::Norm(a) => norm(a),
        Command::Constant(a) => constant(a),
        Command::Verify(a) => verify(a),
        Command::Report(a) => report(a),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok((text, code)) => {
            print!("{text}");
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
