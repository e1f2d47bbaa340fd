//! `kmlp`: solve, verify and benchmark multi-depot k-vehicle minimum latency instances.

mod bench;
mod oracle;
mod verify;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kmlp_core::instance::SolutionFile;
use kmlp_core::rational;
use kmlp_core::solvers::{self, Algorithm, BoundKind, SolverConfig};
use kmlp_core::{parse_instance, Error, MetricInstance};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "kmlp", version, about = "Multi-depot k-vehicle minimum latency toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm and write a solution file.
    Solve(SolveArgs),
    /// Exact values and LP optima for an instance.
    Oracle(oracle::OracleArgs),
    /// Re-evaluate a solution and optionally check its approximation guarantee.
    Verify(verify::VerifyArgs),
    /// Random instances, every algorithm, every available bound.
    Bench(bench::BenchArgs),
}

#[derive(clap::Args)]
struct SolveArgs {
    #[arg(long, value_parser = parse_algorithm)]
    alg: Algorithm,
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Truncation slack, e.g. `0.01` or `1/100`.
    #[arg(long)]
    epsilon: Option<String>,
    /// Ratio between consecutive time points.
    #[arg(long)]
    growth: Option<String>,
    /// Pick cycle directions at random instead of the cheaper one.
    #[arg(long)]
    no_derandomize: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Failure carrying the process exit status.
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Guard(_) => 4,
            Error::Parse(_) | Error::InvalidInstance(_) | Error::InvalidArgument(_) => 2,
            _ => 3,
        };
        Failure { code, message: e.to_string() }
    }
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    pub fn violation(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
}

pub type CliResult<T> = std::result::Result<T, Failure>;

pub fn read_instance(path: &Path) -> CliResult<MetricInstance> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_instance(&text)?)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable report")
}

pub fn emit(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, format!("{text}\n"))
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn solver_config(args: &SolveArgs) -> CliResult<SolverConfig> {
    let mut cfg = SolverConfig::with_seed(args.seed);
    if let Some(e) = &args.epsilon {
        cfg.epsilon = rational::parse(e)?;
    }
    if let Some(g) = &args.growth {
        cfg.growth = Some(rational::parse(g)?);
    }
    cfg.derandomize = !args.no_derandomize;
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_solve(args: SolveArgs) -> CliResult<()> {
    let inst = read_instance(&args.input)?;
    let cfg = solver_config(&args)?;
    let report = solvers::solve(&inst, args.alg, &cfg)?;
    let mut file = SolutionFile::new(&inst, args.alg.name(), Some(args.seed), &report.plan)?;
    if let Some((kind, value)) = &report.lower_bound {
        let v = Some(rational::to_f64(value));
        match kind {
            BoundKind::Lp1 => file.bounds.lp1 = v,
            BoundKind::Lp2 => file.bounds.lp2 = v,
            BoundKind::Lp3 => file.bounds.lp3 = v,
            BoundKind::Bnslb => file.bounds.bnslb = v,
        }
    }
    log::info!("{} on {} nodes: cost {}", args.alg, inst.n(), rational::display(&report.cost));
    emit(&to_json(&file), args.out.as_deref())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("MLP_LOG")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Oracle(a) => oracle::run(a),
        Command::Verify(a) => verify::run(a),
        Command::Bench(a) => bench::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
