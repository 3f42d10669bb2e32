//! `polyenergy`: run counting, exponential-sum, congruence, census and sieve experiments.

mod config;
mod record;
mod run;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use config::ExperimentConfig;
use record::{Cache, ResultRecord};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] polyenergy::error::Error),
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use polyenergy::error::Error;
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 1,
            CliError::Core(e) => match e {
                Error::Budget(_) => 3,
                Error::Invariant(_) | Error::ZeroDivisor => 4,
                _ => 2,
            },
        }
    }
}

#[derive(Parser)]
#[command(name = "polyenergy", version, about = "Additive energy experiments for integer polynomials")]
struct Cli {
    /// Config file: a JSON object or `key = value` lines. Flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory holding one `<command>.jsonl` cache file per command.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Append the result record to this JSON-lines file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Serialize, Default)]
struct Instance {
    /// Univariate polynomial in x.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    poly: Option<String>,
    /// Bivariate polynomial in x, y.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    f: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    g: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    a: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    b: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<i64>,
    /// Box size.
    #[arg(long = "B")]
    #[serde(rename = "B", skip_serializing_if = "Option::is_none")]
    bound: Option<u64>,
}

#[derive(Args, Serialize)]
struct CountArgs {
    #[command(flatten)]
    #[serde(flatten)]
    inst: Instance,
    /// mitm, brute, general, general-brute or curve.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    algo: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    max_pairs: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    max_quadruples: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    max_millis: Option<u64>,
}

#[derive(Args, Serialize)]
struct ScanArgs {
    #[command(flatten)]
    #[serde(flatten)]
    count: CountArgs,
    /// Strictly increasing box sizes.
    #[arg(long = "Bs", value_delimiter = ',')]
    #[serde(rename = "B_list", skip_serializing_if = "Option::is_none")]
    bounds: Option<Vec<u64>>,
    /// Fit these counts instead of computing them.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    counts: Option<Vec<u64>>,
    /// CSV export path.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    csv: Option<String>,
}

#[derive(Args, Serialize)]
struct ExpsumArgs {
    #[command(flatten)]
    #[serde(flatten)]
    inst: Instance,
    /// sigma, phi or psi.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    kind: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<u32>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    q: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    m: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    h: Option<i64>,
}

#[derive(Args, Serialize)]
struct CongruenceArgs {
    /// Univariate polynomial in x.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    poly: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    l: Option<u32>,
}

#[derive(Args, Serialize)]
struct LineArgs {
    /// Bivariate polynomial in x, y.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    f: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    m: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<i64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<u64>,
}

#[derive(Args, Serialize)]
struct CensusArgs {
    #[command(flatten)]
    #[serde(flatten)]
    inst: Instance,
    /// gamma, K or P.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    family: Option<String>,
}

#[derive(Args, Serialize)]
struct SieveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    inst: Instance,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    h: Option<i64>,
    /// Sieving prime limit; defaults to the balanced choice for B.
    #[arg(long = "Q")]
    #[serde(rename = "Q", skip_serializing_if = "Option::is_none")]
    q_limit: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<i64>,
    /// product or display.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    form: Option<String>,
    /// CSV path for the per-pair table.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    table: Option<String>,
}

#[derive(Args, Serialize)]
struct ExponentArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    d: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact energy or general count at one box size.
    Count(CountArgs),
    /// Counts over several box sizes and the fitted growth exponent.
    Scan(ScanArgs),
    /// One complete exponential sum (sigma, phi or psi).
    Expsum(ExpsumArgs),
    /// Roots of a polynomial modulo p^l.
    Congruence(CongruenceArgs),
    /// Line certificate for f = k in direction (m, n).
    Delta(LineArgs),
    /// Lines in f = k mod p, or rational lines over Q when p is absent.
    Lines(LineArgs),
    /// Parameters with a singular member in the gamma, K or P family.
    Census(CensusArgs),
    /// Polynomial sieve bound with both sides computed.
    Sieve(SieveArgs),
    /// Exponent bookkeeping for degree d.
    Exponents(ExponentArgs),
    /// Run the command named in the config file.
    Run,
}

fn flags<T: Serialize>(name: &str, args: &T) -> (String, BTreeMap<String, Value>) {
    let map = match serde_json::to_value(args).expect("flags serialize") {
        Value::Object(m) => m.into_iter().collect(),
        _ => BTreeMap::new(),
    };
    (name.to_string(), map)
}

fn execute(cli: Cli) -> Result<ResultRecord, CliError> {
    let (name, mut given) = match &cli.command {
        Command::Count(a) => flags("count", a),
        Command::Scan(a) => flags("scan", a),
        Command::Expsum(a) => flags("expsum", a),
        Command::Congruence(a) => flags("congruence", a),
        Command::Delta(a) => flags("delta", a),
        Command::Lines(a) => flags("lines", a),
        Command::Census(a) => flags("census", a),
        Command::Sieve(a) => flags("sieve", a),
        Command::Exponents(a) => flags("exponents", a),
        Command::Run => ("run".to_string(), BTreeMap::new()),
    };
    if let Some(t) = cli.threads {
        given.insert("threads".into(), Value::from(t));
    }
    let file = match &cli.config {
        Some(path) => config::read_config_file(path)?,
        None => BTreeMap::new(),
    };
    let cfg: ExperimentConfig = config::merge(&name, file, given)?;
    if let Some(t) = cfg.threads {
        // a second initialization only fails when a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let hash = cfg.digest();
    let cache = cli.cache_dir.as_deref().map(Cache::new);
    if let Some(cache) = &cache {
        if let Some(mut hit) = cache.lookup(&cfg.command, &hash)? {
            hit.cached = true;
            finish(&cfg, &hit)?;
            return Ok(hit);
        }
    }
    let start = Instant::now();
    let payload = run::payload(&cfg)?;
    let elapsed = start.elapsed().as_millis() as u64;
    let config_value = serde_json::to_value(&cfg).expect("config serializes");
    let record = ResultRecord::new(hash, cfg.command.clone(), config_value, payload, elapsed);
    if let Some(cache) = &cache {
        cache.store(&record)?;
    }
    finish(&cfg, &record)?;
    Ok(record)
}

/// Side outputs that depend on the payload only.
fn finish(cfg: &ExperimentConfig, record: &ResultRecord) -> Result<(), CliError> {
    if let (Some(path), "scan") = (&cfg.csv, cfg.command.as_str()) {
        run::write_scan_csv(&record.payload, std::path::Path::new(path))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.clone();
    match execute(cli) {
        Ok(record) => {
            println!("{}", serde_json::to_string(&record).expect("record serializes"));
            if let Some(path) = out {
                if let Err(e) = record::append_line(&path, &record) {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
