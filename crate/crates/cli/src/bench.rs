use std::fmt::Write as _;

use clap::ValueEnum;
use kmlp_core::generate::{random_instance, GenOptions, MetricKind};
use kmlp_core::lp::{build_and_solve_lp1, build_and_solve_lp2, build_and_solve_lp3};
use kmlp_core::oracles::{bnslb, exact_kmlp};
use kmlp_core::rational::{self, Rational};
use kmlp_core::solvers::{self, Algorithm, SolverConfig};
use kmlp_core::{time_horizon, MetricInstance, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::{emit, to_json, CliResult, Failure};

#[derive(Clone, Copy, ValueEnum)]
pub enum Depots {
    /// Every vehicle starts at node 0.
    Single,
    /// Depots drawn from the first `k` nodes.
    Multi,
}

#[derive(clap::Args)]
pub struct BenchArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    trials: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value = "random")]
    metric: String,
    /// Comma-separated algorithm names; defaults to all of them.
    #[arg(long, value_delimiter = ',')]
    algs: Option<Vec<String>>,
    #[arg(long, value_enum, default_value = "single")]
    depots: Depots,
    /// Largest edge weight or coordinate.
    #[arg(long, default_value_t = 10)]
    scale: i64,
}

#[derive(Serialize)]
struct AlgRow {
    algorithm: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    cost: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    /// Lower bound the algorithm's guarantee is stated against.
    bound: &'static str,
    ratio: Option<f64>,
    ratio_opt: Option<f64>,
}

#[derive(Serialize)]
struct Row {
    trial: usize,
    seed: u64,
    opt: Option<f64>,
    bnslb: Option<f64>,
    lp1: Option<f64>,
    lp2: Option<f64>,
    lp3: Option<f64>,
    results: Vec<AlgRow>,
}

#[derive(Serialize)]
struct Aggregate {
    algorithm: &'static str,
    bound: &'static str,
    runs: usize,
    mean_ratio: Option<f64>,
    max_ratio: Option<f64>,
}

#[derive(Serialize)]
struct BenchReport {
    n: usize,
    k: usize,
    metric: String,
    seeds: Vec<u64>,
    rows: Vec<Row>,
    aggregate: Vec<Aggregate>,
}

fn bound_name(alg: Algorithm) -> &'static str {
    match alg {
        Algorithm::Multidepot => "lp1",
        Algorithm::Lp2Round => "lp2",
        Algorithm::KmlpLp | Algorithm::MlpLp => "lp3",
        Algorithm::KmlpComb | Algorithm::BnslbConstruct => "bnslb",
    }
}

fn bound_of(row: &Row, name: &str) -> Option<f64> {
    match name {
        "opt" => row.opt,
        "bnslb" => row.bnslb,
        "lp1" => row.lp1,
        "lp2" => row.lp2,
        _ => row.lp3,
    }
}

fn ratio(cost: Option<f64>, bound: Option<f64>) -> Option<f64> {
    match (cost, bound) {
        (Some(c), Some(b)) if b > 0.0 => Some(c / b),
        _ => None,
    }
}

fn value(what: &str, trial: usize, r: Result<Rational>) -> Option<f64> {
    match r {
        Ok(v) => Some(rational::to_f64(&v)),
        Err(e) => {
            log::warn!("trial {trial}: {what} unavailable: {e}");
            None
        }
    }
}

fn run_trial(inst: &MetricInstance, trial: usize, seed: u64, algs: &[Algorithm]) -> Row {
    let t = time_horizon(inst).t.max(1);
    let mut row = Row {
        trial,
        seed,
        opt: value("opt", trial, exact_kmlp(inst).map(|r| r.value)),
        bnslb: value("bnslb", trial, bnslb(inst).map(|t| t.sum())),
        lp1: value("lp1", trial, build_and_solve_lp1(inst, t).map(|s| s.lp.objective)),
        lp2: value("lp2", trial, build_and_solve_lp2(inst, t).map(|s| s.lp.objective)),
        lp3: value("lp3", trial, build_and_solve_lp3(inst, t).map(|s| s.lp.objective)),
        results: Vec::new(),
    };
    let cfg = SolverConfig::with_seed(seed);
    for &alg in algs {
        let (cost, error) = match solvers::solve(inst, alg, &cfg) {
            Ok(rep) => (Some(rational::to_f64(&rep.cost)), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let bound = bound_name(alg);
        row.results.push(AlgRow {
            algorithm: alg.name(),
            cost,
            error,
            bound,
            ratio: ratio(cost, bound_of(&row, bound)),
            ratio_opt: ratio(cost, row.opt),
        });
    }
    row
}

fn aggregate(rows: &[Row], algs: &[Algorithm]) -> Vec<Aggregate> {
    algs.iter()
        .enumerate()
        .map(|(j, &alg)| {
            let ratios: Vec<f64> = rows.iter().filter_map(|r| r.results[j].ratio).collect();
            let runs = rows.iter().filter(|r| r.results[j].cost.is_some()).count();
            Aggregate {
                algorithm: alg.name(),
                bound: bound_name(alg),
                runs,
                mean_ratio: (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64),
                max_ratio: ratios.iter().copied().reduce(f64::max),
            }
        })
        .collect()
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.3}"))
}

fn table(report: &BenchReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:>5} {:>9} {:>9} {:>9} {:>9} {:>9}", "trial", "opt", "bnslb", "lp1", "lp2", "lp3");
    for r in &report.rows {
        let _ = writeln!(
            s,
            "{:>5} {:>9} {:>9} {:>9} {:>9} {:>9}",
            r.trial,
            cell(r.opt),
            cell(r.bnslb),
            cell(r.lp1),
            cell(r.lp2),
            cell(r.lp3)
        );
    }
    let _ = writeln!(s, "\n{:<16} {:>6} {:>5} {:>10} {:>10}", "algorithm", "bound", "runs", "mean", "max");
    for a in &report.aggregate {
        let _ = writeln!(
            s,
            "{:<16} {:>6} {:>5} {:>10} {:>10}",
            a.algorithm,
            a.bound,
            a.runs,
            cell(a.mean_ratio),
            cell(a.max_ratio)
        );
    }
    s
}

pub fn run(args: BenchArgs) -> CliResult<()> {
    let kind: MetricKind = args.metric.parse()?;
    let algs: Vec<Algorithm> = match &args.algs {
        None => Algorithm::ALL.to_vec(),
        Some(list) => list.iter().map(|s| s.trim().parse()).collect::<Result<_>>()?,
    };
    let mut opts = GenOptions::new(args.n, args.k, kind).scale(args.scale);
    if matches!(args.depots, Depots::Single) {
        opts = opts.single_depot();
    }
    let seeds: Vec<u64> = (0..args.trials as u64).map(|i| args.seed.wrapping_add(i)).collect();
    let instances = seeds
        .iter()
        .map(|&s| random_instance(&mut ChaCha8Rng::seed_from_u64(s), &opts))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Failure::usage(e.to_string()))?;
    let rows: Vec<Row> = instances
        .par_iter()
        .zip(seeds.par_iter())
        .enumerate()
        .map(|(trial, (inst, &seed))| run_trial(inst, trial, seed, &algs))
        .collect();
    let report = BenchReport {
        n: args.n,
        k: args.k,
        metric: args.metric.clone(),
        aggregate: aggregate(&rows, &algs),
        seeds,
        rows,
    };
    eprint!("{}", table(&report));
    emit(&to_json(&report), None)
}
