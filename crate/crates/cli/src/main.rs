mod commands;
mod config;
mod error;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Map, Value};

use rigid_core::experiments::Model;

use crate::commands::Outcome;
use crate::config::{resolve, Common, SCHEMA_VERSION};
use crate::error::CliError;

const THREADS_ENV: &str = "RIGIDPOINTS_THREADS";

#[derive(Parser)]
#[command(name = "rigid-points", version, about = "Rigidity and tolerance experiments for Ginibre and GAF zero sets")]
struct Cli {
    /// JSON config file; command-line flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    replicas: Option<usize>,
    /// Worker threads (falls back to the config, then RIGIDPOINTS_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ginibre eigenvalues (or the small-n Metropolis oracle).
    SampleGinibre(SampleGinibreArgs),
    /// Zeros of the degree-n truncated GAF.
    SampleGaf(SampleGafArgs),
    /// Recover the inside count from outside points.
    RigidityCount(RigidityCountArgs),
    /// Recover the inside sum from outside GAF zeros.
    RigiditySum(RigiditySumArgs),
    /// Tail decay of inverse power sums over outside points.
    PowerTails(PowerTailsArgs),
    /// Linear-statistic variance quadrature and its Monte Carlo check.
    VarianceQuadrature(VarianceArgs),
    /// Coefficient ratios from exact roots.
    VietaCheck(VietaArgs),
    /// Reconstruct the GAF from its zeros up to a phase.
    Reconstruct(ReconstructArgs),
    /// Metropolis chain on the conditional inside law.
    ToleranceMcmc(ToleranceArgs),
    /// Conditional density ratios against the truncation envelope.
    RatioEnvelope(EnvelopeArgs),
    /// Growth of the GAF denominator ratios with n.
    DiagnosticsGaf(DiagnosticsArgs),
}

#[derive(Args, Serialize)]
struct SampleGinibreArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    r0: Option<f64>,
    /// eigen or mcmc-oracle.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    method: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    steps: Option<usize>,
}

#[derive(Args, Serialize)]
struct SampleGafArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    r0: Option<f64>,
}

#[derive(Args, Serialize)]
struct RigidityCountArgs {
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    eps: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    r0: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
}

#[derive(Args, Serialize)]
struct RigiditySumArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    eps: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    r0: Option<f64>,
}

#[derive(Args, Serialize)]
struct PowerTailsArgs {
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<ModelArg>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    r0: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    l: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    scales: Option<Vec<u32>>,
}

#[derive(Args, Serialize)]
struct VarianceArgs {
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    radii: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    sizes: Option<Vec<usize>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    reference_radius: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    reference_n: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    mc_n: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    mc_radius: Option<f64>,
}

#[derive(Args, Serialize)]
struct VietaArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
}

#[derive(Args, Serialize)]
struct ReconstructArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    k_max: Option<usize>,
}

#[derive(Args, Serialize)]
struct ToleranceArgs {
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<ModelArg>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    m: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    r0: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    steps: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    burn_in: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    bins: Option<usize>,
}

#[derive(Args, Serialize)]
struct EnvelopeArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    m: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    r0: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    proposals: Option<usize>,
}

#[derive(Args, Serialize)]
struct DiagnosticsArgs {
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    sizes: Option<Vec<usize>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    m: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    r0: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    proposals: Option<usize>,
}

#[derive(Clone, Copy, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ModelArg {
    Ginibre,
    Gaf,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Ginibre => Model::Ginibre,
            ModelArg::Gaf => Model::Gaf,
        }
    }
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::SampleGinibre(_) => "sample-ginibre",
            Command::SampleGaf(_) => "sample-gaf",
            Command::RigidityCount(_) => "rigidity-count",
            Command::RigiditySum(_) => "rigidity-sum",
            Command::PowerTails(_) => "power-tails",
            Command::VarianceQuadrature(_) => "variance-quadrature",
            Command::VietaCheck(_) => "vieta-check",
            Command::Reconstruct(_) => "reconstruct",
            Command::ToleranceMcmc(_) => "tolerance-mcmc",
            Command::RatioEnvelope(_) => "ratio-envelope",
            Command::DiagnosticsGaf(_) => "diagnostics-gaf",
        }
    }

    fn overrides(&self) -> Value {
        let v = match self {
            Command::SampleGinibre(a) => serde_json::to_value(a),
            Command::SampleGaf(a) => serde_json::to_value(a),
            Command::RigidityCount(a) => serde_json::to_value(a),
            Command::RigiditySum(a) => serde_json::to_value(a),
            Command::PowerTails(a) => serde_json::to_value(a),
            Command::VarianceQuadrature(a) => serde_json::to_value(a),
            Command::VietaCheck(a) => serde_json::to_value(a),
            Command::Reconstruct(a) => serde_json::to_value(a),
            Command::ToleranceMcmc(a) => serde_json::to_value(a),
            Command::RatioEnvelope(a) => serde_json::to_value(a),
            Command::DiagnosticsGaf(a) => serde_json::to_value(a),
        };
        v.expect("flag structs serialize")
    }
}

fn load_config(path: Option<&Path>) -> Result<Map<String, Value>, CliError> {
    let Some(path) = path else {
        return Ok(Map::new());
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(CliError::validation("config must be a JSON object".into(), None)),
        Err(e) => Err(CliError::validation(format!("config is not valid JSON: {e}"), None)),
    }
}

fn merged(cli: &Cli) -> Result<Map<String, Value>, CliError> {
    let mut m = load_config(cli.config.as_deref())?;
    if let Value::Object(o) = cli.command.overrides() {
        m.extend(o);
    }
    if let Some(s) = cli.seed {
        m.insert("seed".into(), json!(s));
    }
    if let Some(r) = cli.replicas {
        m.insert("replicas".into(), json!(r));
    }
    if let Some(t) = cli.threads {
        m.insert("threads".into(), json!(t));
    }
    if let Some(o) = &cli.out {
        m.insert("out".into(), json!(o));
    }
    Ok(m)
}

fn threads(common: &Common) -> Result<Option<usize>, CliError> {
    if common.threads.is_some() {
        return Ok(common.threads);
    }
    match std::env::var(THREADS_ENV) {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(t) if t > 0 => Ok(Some(t)),
            _ => Err(CliError::validation(format!("{THREADS_ENV}={s:?} is not a positive integer"), Some("threads"))),
        },
        Err(_) => Ok(None),
    }
}

fn dispatch(command: &Command, m: Map<String, Value>) -> Result<(Common, Outcome), CliError> {
    macro_rules! run {
        ($f:path) => {{
            let (c, p) = resolve(m)?;
            let o = prepare(&c).and_then(|_| $f(&c, &p))?;
            Ok((c, o))
        }};
    }
    match command {
        Command::SampleGinibre(_) => run!(commands::sample_ginibre),
        Command::SampleGaf(_) => run!(commands::sample_gaf_cmd),
        Command::RigidityCount(_) => run!(commands::rigidity_count_cmd),
        Command::RigiditySum(_) => run!(commands::rigidity_sum_cmd),
        Command::PowerTails(_) => run!(commands::power_tails_cmd),
        Command::VarianceQuadrature(_) => run!(commands::variance_cmd),
        Command::VietaCheck(_) => run!(commands::vieta_cmd),
        Command::Reconstruct(_) => run!(commands::reconstruct_cmd),
        Command::ToleranceMcmc(_) => run!(commands::tolerance_cmd),
        Command::RatioEnvelope(_) => run!(commands::envelope_cmd),
        Command::DiagnosticsGaf(_) => run!(commands::diagnostics_cmd),
    }
}

fn prepare(common: &Common) -> Result<(), CliError> {
    if let Some(t) = threads(common)? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Io(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let m = merged(&cli)?;
    let started = Instant::now();
    let (common, outcome) = dispatch(&cli.command, m)?;
    let elapsed = started.elapsed().as_secs_f64();
    let report = json!({
        "command": cli.command.name(),
        "property": outcome.property,
        "code_version": env!("CARGO_PKG_VERSION"),
        "schema_version": SCHEMA_VERSION,
        "config": {
            "seed": common.seed,
            "replicas": common.replicas,
            "threads": common.threads,
            "out": common.out,
            "params": outcome.params,
        },
        "summary": outcome.artifacts.summary,
        "wall_clock_seconds": elapsed,
    });
    output::write_all(Path::new(&common.out), &report, &outcome.artifacts)?;
    println!("{}", serde_json::to_string(&report["summary"]).expect("summary serializes"));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
