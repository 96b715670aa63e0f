//! `rdlab`: seeded experiment runner.
//!
//! Every run prints one JSON document `{schema_version, manifest, result,
//! pass}`. Exit status is 0 when all checks pass, 1 when a check or
//! assertion fails, 2 for invalid arguments or configs.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use rdlab::cumulants::{gamma_split, haar_multiply, is_r_diagonal, moments_to_cumulants, MomentTable, WordTable};
use rdlab::entropy::{self, Law};
use rdlab::geometry::{jacobian_dp, jacobian_dp_fd, jacobian_ds_fd, limck_residual, push_measure_check, volume_ck};
use rdlab::microstates::{amplification_constant, chi_curve, Chart, EstimatorOptions, GammaConfig};
use rdlab::models::{freeness_defect_quantile, ginibre, haar_unitary, rdiag_sample, sample_to_csv};
use rdlab::spectral::DEFAULT_GRID_NODES;
use rdlab::suite::{self, SuiteOptions};
use rdlab::word::SYMBOL_NAMES;
use rdlab::{ComplexMatrix, RngStream};

const SCHEMA_VERSION: u32 = 1;
const JACOBIAN_TOL: f64 = 1e-4;
const LIMCK_TOL: f64 = 0.01;

#[derive(Parser)]
#[command(name = "rdlab", version, about = "Numerical free-probability experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Also write the JSON document here.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Command {
    /// One-variable entropy functionals of a catalog law.
    Entropy(EntropyArgs),
    /// Jacobians, the volume of U(k), and the singular-value fit.
    Geometry(GeometryArgs),
    /// Operations on a moment table read from CSV.
    Cumulants(CumulantArgs),
    /// Random matrix samplers and the freeness defect.
    Models(ModelArgs),
    /// Microstate volume estimates over a list of k.
    Microstates(MicrostateArgs),
    /// The amplification constant for d×d block matrices.
    Amplify(AmplifyArgs),
    /// A named acceptance suite with pinned seeds.
    Suite(SuiteArgs),
    /// Run a JSON experiment config.
    #[serde(skip)]
    Run(RunArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
enum EntropyOp {
    LogEnergy,
    ChiSa,
    ChiRdiag,
    IdentityDefect,
    UpperBound,
    Estimator,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntropyArgs {
    /// semicircle, quarter_circle, marchenko_pastur, arcsine, uniform, point, two_point
    #[arg(long)]
    law: String,
    /// Law parameters as name=value (variance, ratio, a, b, c, p).
    #[arg(long = "param", value_name = "NAME=VALUE")]
    #[serde(default)]
    params: Vec<String>,
    #[arg(long, value_enum)]
    op: EntropyOp,
    #[arg(long, default_value_t = DEFAULT_GRID_NODES)]
    #[serde(default = "default_nodes")]
    nodes: usize,
    /// Matrix size for the eigenvalue estimator.
    #[arg(long, default_value_t = 512)]
    #[serde(default = "default_estimator_k")]
    k: usize,
}

fn default_nodes() -> usize {
    DEFAULT_GRID_NODES
}

fn default_estimator_k() -> usize {
    512
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum GeometryCheck {
    Jacobian,
    Volume,
    Push,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeometryArgs {
    #[arg(long, value_enum)]
    check: GeometryCheck,
    #[arg(long, default_value_t = 2)]
    #[serde(default = "default_k")]
    k: usize,
    #[arg(long, value_parser = parse_count, default_value = "100000")]
    #[serde(default = "default_push_samples")]
    samples: usize,
    #[arg(long)]
    #[serde(default)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    #[serde(default = "one")]
    workers: usize,
}

fn default_k() -> usize {
    2
}

fn default_push_samples() -> usize {
    100_000
}

fn one() -> usize {
    1
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum CumulantOp {
    ToCumulants,
    RdiagTest,
    HaarMultiply,
    GammaSplit,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CumulantArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    op: CumulantOp,
    #[arg(long, default_value_t = 1e-9)]
    #[serde(default = "default_rdiag_tol")]
    tol: f64,
}

fn default_rdiag_tol() -> f64 {
    1e-9
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ModelKind {
    Haar,
    Ginibre,
    Rdiag,
    Freeness,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelArgs {
    #[arg(long, value_enum)]
    model: ModelKind,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    seed: u64,
    /// Law of the positive part for `rdiag` and `freeness`.
    #[arg(long, default_value = "quarter_circle")]
    #[serde(default = "default_law")]
    law: String,
    #[arg(long = "param", value_name = "NAME=VALUE")]
    #[serde(default)]
    params: Vec<String>,
    #[arg(long, value_parser = parse_count, default_value = "10000")]
    #[serde(default = "default_model_samples")]
    samples: usize,
    #[arg(long, default_value_t = 4)]
    #[serde(default = "default_order")]
    order: usize,
    #[arg(long, default_value_t = 1.0)]
    #[serde(default = "unit")]
    sigma2: f64,
    /// Write the sampled matrix as CSV.
    #[arg(long)]
    #[serde(default)]
    dump: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    #[serde(default = "one")]
    workers: usize,
}

fn default_law() -> String {
    "quarter_circle".into()
}

fn default_model_samples() -> usize {
    10_000
}

fn default_order() -> usize {
    4
}

fn unit() -> f64 {
    1.0
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MicrostateArgs {
    /// JSON file `{r, m, epsilon, targets: [{law, ...}], self_adjoint?}`.
    #[arg(long)]
    spec: PathBuf,
    /// Comma-separated matrix sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    k: Vec<usize>,
    #[arg(long, value_parser = parse_count, default_value = "10000")]
    #[serde(default = "default_model_samples")]
    samples: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    #[serde(default)]
    real_imaginary: bool,
    #[arg(long)]
    #[serde(default)]
    restrict_positive: bool,
    #[arg(long, default_value_t = 1)]
    #[serde(default = "one")]
    workers: usize,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AmplifyArgs {
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 1.0)]
    #[serde(default = "unit")]
    v: f64,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SuiteArgs {
    /// geometry, entropy, cumulants, models, microstates or amplify
    name: String,
    #[arg(long)]
    #[serde(default)]
    quick: bool,
    #[arg(long, default_value_t = suite::DEFAULT_SEED)]
    #[serde(default = "default_suite_seed")]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    #[serde(default = "one")]
    workers: usize,
}

fn default_suite_seed() -> u64 {
    suite::DEFAULT_SEED
}

#[derive(Args, Clone, Debug)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
}

/// A config file: one command plus assertions on its result.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentConfig {
    command: Command,
    #[serde(default)]
    output: Option<PathBuf>,
    #[serde(default)]
    assertions: Vec<Assertion>,
}

/// Check on the value at a JSON pointer into the result.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Assertion {
    pointer: String,
    #[serde(default)]
    equals: Option<Value>,
    #[serde(default)]
    approx: Option<f64>,
    #[serde(default)]
    tol: Option<f64>,
    #[serde(default)]
    less_than: Option<f64>,
    #[serde(default)]
    greater_than: Option<f64>,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<rdlab::Error> for Failure {
    fn from(e: rdlab::Error) -> Self {
        use rdlab::Error::*;
        match e {
            Domain(_) | InvalidInput(_) | OrderOverflow { .. } | InsufficientSamples { .. } | Parse(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

type Outcome = std::result::Result<(Value, bool), Failure>;

fn parse_count(s: &str) -> std::result::Result<usize, String> {
    let x: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if x < 0.0 || x.fract() != 0.0 || x > 1e15 {
        return Err(format!("not a sample count: {s}"));
    }
    Ok(x as usize)
}

fn law_from(name: &str, params: &[String]) -> std::result::Result<Law, Failure> {
    let mut obj = serde_json::Map::new();
    obj.insert("law".into(), Value::String(name.into()));
    for p in params {
        let (k, v) = p.split_once('=').ok_or_else(|| Failure::Usage(format!("parameter {p:?} is not NAME=VALUE")))?;
        let v: f64 = v.parse().map_err(|_| Failure::Usage(format!("parameter {k} is not a number")))?;
        obj.insert(k.into(), json!(v));
    }
    serde_json::from_value(Value::Object(obj)).map_err(|e| Failure::Usage(format!("law: {e}")))
}

fn to_json(x: &impl Serialize) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn table_json(t: &WordTable) -> Value {
    let entries: BTreeMap<String, [f64; 2]> =
        t.iter().map(|(w, c)| (w.to_string_with(SYMBOL_NAMES), [c.re, c.im])).collect();
    to_json(&entries)
}

fn entropy_cmd(a: &EntropyArgs) -> Outcome {
    let mu = law_from(&a.law, &a.params)?.measure(a.nodes)?;
    let v = match a.op {
        EntropyOp::LogEnergy => to_json(&entropy::log_energy(&mu)),
        EntropyOp::ChiSa => to_json(&entropy::chi_sa_one(&mu)),
        EntropyOp::ChiRdiag => to_json(&entropy::chi_rdiag(&mu)?),
        EntropyOp::UpperBound => to_json(&entropy::chi_upper_bound(&mu)?),
        EntropyOp::IdentityDefect => {
            json!({"value": entropy::chi_symmetric_identity_defect(&mu)?, "error_estimate": 0.0, "method": "quadrature"})
        }
        EntropyOp::Estimator => to_json(&entropy::log_energy_estimator(&entropy::quantile_spectrum(&mu, a.k))?),
    };
    Ok((v, true))
}

fn geometry_cmd(a: &GeometryArgs) -> Outcome {
    match a.check {
        GeometryCheck::Volume => {
            let r = limck_residual(a.k)?;
            let pass = r.abs() < LIMCK_TOL;
            Ok((json!({"log_volume": volume_ck(a.k)?, "statistic": r, "threshold": LIMCK_TOL, "pass": pass}), pass))
        }
        GeometryCheck::Jacobian => {
            let seed = a.seed.ok_or_else(|| Failure::Usage("--seed is required for the jacobian check".into()))?;
            let mut worst = 0.0f64;
            for i in 0..20 {
                let g = ginibre(a.k, 1.0, RngStream::new(seed, i))?;
                let p = g.adjoint().mul(&g).add(&ComplexMatrix::identity(a.k).scale_real(0.1)).hermitian_part();
                let exact = jacobian_dp(&p)?;
                for fd in [jacobian_dp_fd(&p), jacobian_ds_fd(&p)] {
                    worst = worst.max((exact - fd).abs() / exact.abs());
                }
            }
            let pass = worst < JACOBIAN_TOL;
            Ok((json!({"statistic": worst, "threshold": JACOBIAN_TOL, "pass": pass}), pass))
        }
        GeometryCheck::Push => {
            let seed = a.seed.ok_or_else(|| Failure::Usage("--seed is required for the push check".into()))?;
            let r = push_measure_check(a.k, a.samples, RngStream::new(seed, 0), a.workers)?;
            let pass = r.fit.pass && r.negative_control.as_ref().map_or(true, |c| !c.pass);
            let mut v = to_json(&r);
            v["statistic"] = json!(r.fit.statistic);
            v["threshold"] = json!(r.fit.threshold);
            v["pass"] = json!(pass);
            Ok((v, pass))
        }
    }
}

fn cumulants_cmd(a: &CumulantArgs) -> Outcome {
    let text = fs::read_to_string(&a.input).map_err(|e| Failure::Usage(format!("{}: {e}", a.input.display())))?;
    let m = MomentTable::from_csv(&text)?;
    Ok(match a.op {
        CumulantOp::ToCumulants => (json!({"cumulants": table_json(moments_to_cumulants(&m).table())}), true),
        CumulantOp::HaarMultiply => (json!({"moments": table_json(haar_multiply(&m)?.table())}), true),
        CumulantOp::RdiagTest => {
            let r = is_r_diagonal(&m, a.tol)?;
            let pass = r.consistent;
            (to_json(&r), pass)
        }
        CumulantOp::GammaSplit => (to_json(&gamma_split(&m, None)?), true),
    })
}

fn models_cmd(a: &ModelArgs) -> Outcome {
    let rng = RngStream::new(a.seed, 0);
    let sample = |m: ComplexMatrix| -> Outcome {
        if let Some(path) = &a.dump {
            fs::write(path, sample_to_csv(&m, rng)).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
        }
        let s = m.singular_values()?;
        Ok((
            json!({"k": a.k, "normalized_trace": [m.normalized_trace().re, m.normalized_trace().im], "singular_values": s}),
            true,
        ))
    };
    match a.model {
        ModelKind::Haar => sample(haar_unitary(a.k, rng)?),
        ModelKind::Ginibre => sample(ginibre(a.k, a.sigma2, rng)?),
        ModelKind::Rdiag => sample(rdiag_sample(&law_from(&a.law, &a.params)?.measure(DEFAULT_GRID_NODES)?, a.k, rng)?),
        ModelKind::Freeness => {
            let mu = law_from(&a.law, &a.params)?.measure(DEFAULT_GRID_NODES)?;
            let r = freeness_defect_quantile(&mu, a.k, a.samples, a.order, rng, a.workers)?;
            Ok((to_json(&r), true))
        }
    }
}

fn microstates_cmd(a: &MicrostateArgs) -> Outcome {
    let text = fs::read_to_string(&a.spec).map_err(|e| Failure::Usage(format!("{}: {e}", a.spec.display())))?;
    let cfg: GammaConfig = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("spec: {e}")))?;
    let spec = cfg.build()?;
    let opts = EstimatorOptions {
        chart: if a.real_imaginary { Chart::RealImaginary } else { Chart::Direct },
        restrict_positive: a.restrict_positive,
        workers: a.workers,
        ..Default::default()
    };
    let records = chi_curve(&spec, &a.k, a.samples, RngStream::new(a.seed, 0), &opts)?;
    Ok((json!({"spec": cfg, "estimates": records}), true))
}

fn amplify_cmd(a: &AmplifyArgs) -> Outcome {
    let r = amplification_constant(a.d, a.v)?;
    let pass = r.magnitude_matches;
    Ok((to_json(&r), pass))
}

fn suite_cmd(a: &SuiteArgs) -> Outcome {
    let opts = SuiteOptions { quick: a.quick, seed: a.seed, workers: a.workers };
    let r = suite::run_suite(&a.name, &opts)?;
    for c in &r.criteria {
        eprintln!("{}", c.summary());
    }
    let pass = r.pass;
    Ok((to_json(&r), pass))
}

fn execute(cmd: &Command) -> Outcome {
    match cmd {
        Command::Entropy(a) => entropy_cmd(a),
        Command::Geometry(a) => geometry_cmd(a),
        Command::Cumulants(a) => cumulants_cmd(a),
        Command::Models(a) => models_cmd(a),
        Command::Microstates(a) => microstates_cmd(a),
        Command::Amplify(a) => amplify_cmd(a),
        Command::Suite(a) => suite_cmd(a),
        Command::Run(_) => Err(Failure::Usage("a config cannot run another config".into())),
    }
}

fn check(result: &Value, a: &Assertion) -> std::result::Result<bool, Failure> {
    let v = result
        .pointer(&a.pointer)
        .ok_or_else(|| Failure::Usage(format!("assertion pointer {:?} matches nothing", a.pointer)))?;
    let num = || v.as_f64().ok_or_else(|| Failure::Usage(format!("{:?} is not a number", a.pointer)));
    let mut ok = true;
    if let Some(want) = &a.equals {
        ok &= v == want;
    }
    if let Some(want) = a.approx {
        ok &= (num()? - want).abs() <= a.tol.unwrap_or(0.0);
    }
    if let Some(bound) = a.less_than {
        ok &= num()? < bound;
    }
    if let Some(bound) = a.greater_than {
        ok &= num()? > bound;
    }
    if a.equals.is_none() && a.approx.is_none() && a.less_than.is_none() && a.greater_than.is_none() {
        return Err(Failure::Usage(format!("assertion on {:?} checks nothing", a.pointer)));
    }
    Ok(ok)
}

fn seed_of(cmd: &Command) -> Option<u64> {
    match cmd {
        Command::Geometry(a) => a.seed,
        Command::Models(a) => Some(a.seed),
        Command::Microstates(a) => Some(a.seed),
        Command::Suite(a) => Some(a.seed),
        _ => None,
    }
}

fn document(cmd: &Command, config: &Value, result: Value, assertions: Value, pass: bool) -> Value {
    let canonical = serde_json::to_string(config).expect("configs serialize");
    let hash = Sha256::digest(canonical.as_bytes());
    let hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
    json!({
        "schema_version": SCHEMA_VERSION,
        "manifest": {
            "config_sha256": hex,
            "config": config,
            "seed": seed_of(cmd),
            "version": env!("CARGO_PKG_VERSION"),
        },
        "result": result,
        "assertions": assertions,
        "pass": pass,
    })
}

fn run(cli: Cli) -> std::result::Result<bool, Failure> {
    let (cmd, assertions, output) = match cli.command {
        Command::Run(r) => {
            let text = fs::read_to_string(&r.config).map_err(|e| Failure::Usage(format!("{}: {e}", r.config.display())))?;
            let cfg: ExperimentConfig =
                serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("invalid config: {e}")))?;
            (cfg.command, cfg.assertions, cli.output.or(cfg.output))
        }
        cmd => (cmd, Vec::new(), cli.output),
    };
    let config = json!({"command": to_json(&cmd), "assertions": to_json(&assertions)});
    let (result, mut pass) = execute(&cmd)?;
    let mut checked = Vec::new();
    for a in &assertions {
        let ok = check(&result, a)?;
        pass &= ok;
        checked.push(json!({"pointer": a.pointer, "pass": ok}));
    }
    let doc = document(&cmd, &config, result, Value::Array(checked), pass);
    let text = serde_json::to_string_pretty(&doc).expect("documents serialize");
    // a closed pipe (e.g. `| head`) is not an error
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    if let Some(path) = output {
        fs::write(&path, format!("{text}\n")).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
    }
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
