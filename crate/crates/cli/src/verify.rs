use std::fs;
use std::path::PathBuf;

use clap::ValueEnum;
use kmlp_core::concat_graph::mu;
use kmlp_core::instance::SolutionFile;
use kmlp_core::lp::{build_and_solve_lp1, build_and_solve_lp2, build_and_solve_lp3};
use kmlp_core::oracles::{bnslb, exact_kmlp};
use kmlp_core::rational::{self, Rational};
use kmlp_core::solvers::Algorithm;
use kmlp_core::{evaluate_plan, time_horizon, MetricInstance};
use serde::Serialize;

use crate::{emit, read_instance, to_json, CliResult, Failure};

/// Relative slack for comparing a rational cost with a floating-point bound.
const TOLERANCE: f64 = 1e-9;

/// Multiplier on the LP1 guarantee accounting for the default truncation slack.
const LP1_SLACK: f64 = 1.01;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Against {
    Opt,
    Bnslb,
    Lp1,
    Lp2,
    Lp3,
}

impl Against {
    fn name(self) -> &'static str {
        match self {
            Against::Opt => "opt",
            Against::Bnslb => "bnslb",
            Against::Lp1 => "lp1",
            Against::Lp2 => "lp2",
            Against::Lp3 => "lp3",
        }
    }
}

#[derive(clap::Args)]
pub struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    solution: PathBuf,
    #[arg(long, value_enum)]
    against: Option<Against>,
}

#[derive(Serialize)]
struct RatioCheck {
    against: &'static str,
    bound: f64,
    guarantee: f64,
    ratio: f64,
    pass: bool,
}

#[derive(Serialize)]
struct VerifyReport {
    algorithm: String,
    feasible: bool,
    total_latency: f64,
    reported_latency: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    check: Option<RatioCheck>,
}

/// Approximation factor `alg` is guaranteed against `bound`, if any.
///
/// The multidepot factor holds in expectation only, so a single run may exceed it.
pub fn guarantee(alg: Algorithm, bound: Against) -> Option<f64> {
    let m = mu();
    match (alg, bound) {
        (Algorithm::Multidepot, Against::Lp1 | Against::Opt) => Some(8.4965 * LP1_SLACK),
        (Algorithm::Lp2Round, Against::Lp2 | Against::Opt) => Some(m),
        (Algorithm::KmlpLp, Against::Lp3 | Against::Opt) => Some(2.0 * m),
        (Algorithm::MlpLp, Against::Lp3 | Against::Opt) => Some(m),
        (Algorithm::KmlpComb, Against::Bnslb | Against::Lp2 | Against::Opt) => Some(2.0 * m),
        (Algorithm::BnslbConstruct, Against::Bnslb | Against::Lp2 | Against::Opt) => Some(m),
        _ => None,
    }
}

pub fn lower_bound(inst: &MetricInstance, bound: Against) -> CliResult<Rational> {
    let t = time_horizon(inst).t.max(1);
    Ok(match bound {
        Against::Opt => exact_kmlp(inst)?.value,
        Against::Bnslb => bnslb(inst)?.sum(),
        Against::Lp1 => build_and_solve_lp1(inst, t)?.lp.objective,
        Against::Lp2 => build_and_solve_lp2(inst, t)?.lp.objective,
        Against::Lp3 => build_and_solve_lp3(inst, t)?.lp.objective,
    })
}

pub fn within(cost: f64, factor: f64, bound: f64) -> bool {
    cost <= factor * bound * (1.0 + TOLERANCE)
}

pub fn run(args: VerifyArgs) -> CliResult<()> {
    let inst = read_instance(&args.input)?;
    let text = fs::read_to_string(&args.solution)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", args.solution.display())))?;
    let file: SolutionFile =
        serde_json::from_str(&text).map_err(|e| Failure::usage(format!("bad solution file: {e}")))?;
    let plan = file.plan(&inst)?;
    if plan.routes.len() != inst.k() {
        return Err(Failure::usage(format!(
            "solution has {} routes but the instance has {} vehicles",
            plan.routes.len(),
            inst.k()
        )));
    }
    let eval = evaluate_plan(&inst, &plan).map_err(|e| Failure::violation(e.to_string()))?;
    let total = rational::to_f64(&eval.total);
    if (total - file.total_latency).abs() > TOLERANCE * total.max(1.0) {
        return Err(Failure::violation(format!(
            "reported total latency {} differs from re-evaluated {}",
            file.total_latency, total
        )));
    }
    let mut report = VerifyReport {
        algorithm: file.algorithm.clone(),
        feasible: true,
        total_latency: total,
        reported_latency: file.total_latency,
        check: None,
    };
    if let Some(against) = args.against {
        let alg: Algorithm = file.algorithm.parse()?;
        let factor = guarantee(alg, against).ok_or_else(|| {
            Failure::usage(format!("{alg} has no guarantee against {}", against.name()))
        })?;
        let bound = rational::to_f64(&lower_bound(&inst, against)?);
        let pass = within(total, factor, bound);
        report.check = Some(RatioCheck {
            against: against.name(),
            bound,
            guarantee: factor,
            ratio: if bound > 0.0 { total / bound } else { f64::NAN },
            pass,
        });
        emit(&to_json(&report), None)?;
        if !pass {
            return Err(Failure::violation(format!(
                "cost {total} exceeds {factor} x {} = {}",
                against.name(),
                factor * bound
            )));
        }
        return Ok(());
    }
    emit(&to_json(&report), None)
}
