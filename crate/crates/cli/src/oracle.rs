use std::path::PathBuf;

use clap::ValueEnum;
use kmlp_core::lp::columns::{build_and_solve_lp1, build_and_solve_lp2};
use kmlp_core::lp::lp3::build_and_solve_lp3;
use kmlp_core::oracles::{bnslb, exact_kmlp, exact_orienteering, exact_pc_paths};
use kmlp_core::rational::{self, Rational};
use kmlp_core::{time_horizon, MetricInstance};
use num_traits::Zero;
use serde_json::{json, Value};

use crate::{emit, read_instance, CliResult, Failure};

#[derive(Clone, Copy, ValueEnum)]
pub enum OracleKind {
    Opt,
    Bnslb,
    Lp1,
    Lp2,
    Lp3,
    PcPaths,
    Orienteering,
}

#[derive(clap::Args)]
pub struct OracleArgs {
    #[arg(long, value_enum)]
    what: OracleKind,
    #[arg(long)]
    input: PathBuf,
    /// Time horizon for the LPs; defaults to the nearest-neighbor horizon.
    #[arg(long)]
    horizon: Option<i64>,
    /// Root node for `pc-paths` and `orienteering`; defaults to the first depot.
    #[arg(long)]
    root: Option<String>,
    /// Uniform node penalty for `pc-paths`.
    #[arg(long, default_value = "1")]
    penalty: String,
    /// Length budget for `orienteering`; every other node has reward equal to its weight.
    #[arg(long)]
    budget: Option<String>,
}

fn number(r: &Rational) -> Value {
    json!({ "value": rational::to_f64(r), "exact": rational::display(r) })
}

fn names(inst: &MetricInstance, path: &[usize]) -> Vec<String> {
    path.iter().map(|&v| inst.name(v).to_string()).collect()
}

fn horizon(inst: &MetricInstance, args: &OracleArgs) -> CliResult<i64> {
    match args.horizon {
        Some(t) if t < 1 => Err(Failure::usage("--horizon must be positive")),
        Some(t) => Ok(t),
        None => Ok(time_horizon(inst).t.max(1)),
    }
}

fn root(inst: &MetricInstance, args: &OracleArgs) -> CliResult<usize> {
    match &args.root {
        None => Ok(inst.root(0)),
        Some(name) => inst.index_of(name).ok_or_else(|| Failure::usage(format!("unknown node {name:?}"))),
    }
}

fn nonzero_entries(values: &[Rational]) -> usize {
    values.iter().filter(|v| !v.is_zero()).count()
}

pub fn run(args: OracleArgs) -> CliResult<()> {
    let inst = read_instance(&args.input)?;
    let out = match args.what {
        OracleKind::Opt => {
            let r = exact_kmlp(&inst)?;
            let routes: Vec<Vec<String>> = r.witness.routes.iter().map(|p| names(&inst, p)).collect();
            json!({ "oracle": "opt", "optimum": number(&r.value), "routes": routes, "explored": r.explored })
        }
        OracleKind::Bnslb => {
            let t = bnslb(&inst)?;
            let table: Vec<Value> = t
                .values
                .iter()
                .zip(&t.witnesses)
                .enumerate()
                .map(|(l, (b, w))| {
                    let paths: Vec<Vec<String>> = w.iter().map(|p| names(&inst, p)).collect();
                    json!({ "l": l + 1, "bottleneck": number(b), "paths": paths })
                })
                .collect();
            json!({ "oracle": "bnslb", "optimum": number(&t.sum()), "table": table })
        }
        OracleKind::Lp1 => {
            let t = horizon(&inst, &args)?;
            let s = build_and_solve_lp1(&inst, t)?;
            json!({
                "oracle": "lp1",
                "optimum": number(&s.lp.objective),
                "horizon": t,
                "columns": s.columns.len(),
                "support": nonzero_entries(&s.lp.values),
            })
        }
        OracleKind::Lp2 => {
            let t = horizon(&inst, &args)?;
            let s = build_and_solve_lp2(&inst, t)?;
            json!({
                "oracle": "lp2",
                "optimum": number(&s.lp.objective),
                "horizon": t,
                "columns": s.columns.len(),
                "support": nonzero_entries(&s.lp.values),
            })
        }
        OracleKind::Lp3 => {
            let t = horizon(&inst, &args)?;
            let s = build_and_solve_lp3(&inst, t)?;
            json!({
                "oracle": "lp3",
                "optimum": number(&s.lp.objective),
                "horizon": t,
                "cuts": s.lp.cuts_added,
                "support": nonzero_entries(&s.lp.values),
            })
        }
        OracleKind::PcPaths => {
            let r = root(&inst, &args)?;
            let pi = rational::parse(&args.penalty)?;
            let penalties = vec![pi; inst.n()];
            let res = exact_pc_paths(&inst, r, &penalties)?;
            let paths: Vec<Vec<String>> = res.witness.iter().map(|p| names(&inst, p)).collect();
            json!({ "oracle": "pc-paths", "optimum": number(&res.value), "paths": paths })
        }
        OracleKind::Orienteering => {
            let r = root(&inst, &args)?;
            let budget = args.budget.as_deref().ok_or_else(|| Failure::usage("--budget is required"))?;
            let budget = rational::parse(budget)?;
            let rewards: Vec<Rational> =
                (0..inst.n()).map(|v| if v == r { Rational::zero() } else { rational::int(inst.weight(v)) }).collect();
            let res = exact_orienteering(&inst, r, &budget, &rewards)?;
            json!({ "oracle": "orienteering", "optimum": number(&res.value), "path": names(&inst, &res.witness) })
        }
    };
    emit(&serde_json::to_string_pretty(&out).expect("json value"), None)
}
