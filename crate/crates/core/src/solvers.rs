//! Latency solvers: LP1 and LP2 rounding with geometric time points, LP3 rounding and the
//! combinatorial bipoint-tree algorithm for a single depot, and the bottleneck-stroll
//! construction.

use std::str::FromStr;

use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arb_packing::{pack_arborescences, WeightedDigraph};
use crate::concat_graph::{lower_envelope, mu, shortest_concat_path, shortest_path_over_corners};
use crate::error::{Error, Result};
use crate::instance::{evaluate_plan, time_horizon, MetricInstance, RoutePlan};
use crate::lp::{
    arc_costs, build_and_solve_lp1, build_and_solve_lp2, build_and_solve_lp3, ArcMetric, Lp1Solution, Lp2Solution,
    Lp3Solution,
};
use crate::oracles::{bnslb, BnsTable};
use crate::pc_tree::{coverage_trees_with_costs, RootedTree};
use crate::rational::{self, Rational};
use crate::tours::{break_cycle_with_service, cycle_cost, double_and_shortcut, split_tree_into_k_tours, Cycle, RouteBuilder};

/// Growth factor used by the LP1 rounding unless overridden.
pub const DEFAULT_GROWTH: (i64, i64) = (1616, 1000);

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub seed: u64,
    /// Ratio between consecutive time points; `None` picks each algorithm's default.
    pub growth: Option<Rational>,
    /// Truncation slack for the geometric rounding.
    pub epsilon: Rational,
    /// Column probabilities are divided by this factor.
    pub kappa: Rational,
    /// Traverse each cycle in its cheaper direction instead of a random one.
    pub derandomize: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { seed: 0, growth: None, epsilon: rational::frac(1, 100), kappa: Rational::one(), derandomize: true }
    }
}

impl SolverConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(c) = &self.growth {
            let cf = rational::to_f64(c);
            if *c <= Rational::one() || cf >= std::f64::consts::E {
                return Err(Error::InvalidArgument(format!("growth {c} must lie strictly between 1 and e")));
            }
        }
        if !self.epsilon.is_positive() {
            return Err(Error::InvalidArgument("epsilon must be positive".into()));
        }
        if self.kappa < Rational::one() {
            return Err(Error::InvalidArgument("kappa must be at least 1".into()));
        }
        Ok(())
    }

    fn growth_or(&self, default: f64) -> f64 {
        self.growth.as_ref().map_or(default, rational::to_f64)
    }

    /// Number of rounds after which the geometric rounding stops sampling.
    pub fn truncation(&self, growth: f64, offset: f64, n: usize, horizon: i64) -> usize {
        let mut d = 0usize;
        while offset * growth.powi(d as i32) < horizon as f64 {
            d += 1;
        }
        let kappa = rational::to_f64(&self.kappa);
        let eps = rational::to_f64(&self.epsilon);
        let tail = kappa * ((n as f64 * horizon as f64) / eps).ln();
        d + tail.max(0.0).ceil() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Multidepot,
    KmlpLp,
    KmlpComb,
    MlpLp,
    Lp2Round,
    BnslbConstruct,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Multidepot,
        Algorithm::KmlpLp,
        Algorithm::KmlpComb,
        Algorithm::MlpLp,
        Algorithm::Lp2Round,
        Algorithm::BnslbConstruct,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Multidepot => "multidepot",
            Algorithm::KmlpLp => "kmlp-lp",
            Algorithm::KmlpComb => "kmlp-comb",
            Algorithm::MlpLp => "mlp-lp",
            Algorithm::Lp2Round => "lp2-round",
            Algorithm::BnslbConstruct => "bnslb-construct",
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown algorithm `{s}`")))
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Lp1,
    Lp2,
    Lp3,
    Bnslb,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub plan: RoutePlan,
    pub cost: Rational,
    /// Lower bound the algorithm's guarantee is stated against, when it was computed.
    pub lower_bound: Option<(BoundKind, Rational)>,
    /// `s_1..s_n` of the lower envelope, for concatenation-graph algorithms.
    pub envelope: Vec<Rational>,
    /// Length of the concatenation-graph path that was followed.
    pub concat_length: Option<Rational>,
    /// Clock-based latency total; never below `cost`.
    pub latency_bound: Rational,
    pub rounds: usize,
    /// Nodes appended after the last round.
    pub cleanup: usize,
}

pub fn solve(inst: &MetricInstance, alg: Algorithm, cfg: &SolverConfig) -> Result<SolveReport> {
    match alg {
        Algorithm::Multidepot => solve_multidepot(inst, cfg),
        Algorithm::KmlpLp => solve_kmlp_lp(inst, cfg),
        Algorithm::KmlpComb => solve_kmlp_combinatorial(inst, cfg),
        Algorithm::MlpLp => solve_mlp_lp(inst, cfg),
        Algorithm::Lp2Round => solve_lp2_round(inst, cfg),
        Algorithm::BnslbConstruct => {
            let table = bnslb(inst)?;
            bnslb_construction(inst, &table, cfg)
        }
    }
}

fn require_single_depot(inst: &MetricInstance) -> Result<usize> {
    if !inst.is_single_depot() {
        return Err(Error::Unsupported("single-depot algorithm on multi-depot instance".into()));
    }
    Ok(inst.root(0))
}

fn reject_weights(inst: &MetricInstance, what: &str) -> Result<()> {
    if inst.has_weights() {
        return Err(Error::Unsupported(format!("{what} does not handle node weights")));
    }
    Ok(())
}

fn reject_service(inst: &MetricInstance, what: &str) -> Result<()> {
    if inst.has_service() {
        return Err(Error::Unsupported(format!("{what} does not handle service times")));
    }
    Ok(())
}

fn finish(builder: RouteBuilder, inst: &MetricInstance, rounds: usize, cleanup: usize) -> Result<SolveReport> {
    let latency_bound = builder.latency_bound().clone();
    let plan = builder.finish();
    let cost = evaluate_plan(inst, &plan)?.total;
    if cost > latency_bound {
        return Err(Error::Internal(format!("plan cost {cost} exceeds its clock bound {latency_bound}")));
    }
    Ok(SolveReport {
        plan,
        cost,
        lower_bound: None,
        envelope: Vec::new(),
        concat_length: None,
        latency_bound,
        rounds,
        cleanup,
    })
}

/// LP1 on the instance's own horizon, then [`round_lp1`].
pub fn solve_multidepot(inst: &MetricInstance, cfg: &SolverConfig) -> Result<SolveReport> {
    cfg.validate()?;
    let lp = build_and_solve_lp1(inst, time_horizon(inst).t)?;
    round_lp1(inst, &lp, cfg)
}

/// Geometric time points `t_j = h·c^j` with a random offset `h = c^Γ`. At each point every
/// vehicle draws one column of its group (each of the `m` vehicles at a depot takes `1/m` of
/// the group's mass, scaled by `1/κ`); the doubled column path becomes its next tour.
pub fn round_lp1(inst: &MetricInstance, lp: &Lp1Solution, cfg: &SolverConfig) -> Result<SolveReport> {
    cfg.validate()?;
    if lp.x.iter().any(|xg| xg.len() != inst.n()) {
        return Err(Error::InvalidArgument("LP1 solution does not match the instance".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let growth = cfg.growth_or(rational::to_f64(&rational::frac(DEFAULT_GROWTH.0, DEFAULT_GROWTH.1)));
    let offset = growth.powf(rng.gen::<f64>());
    let horizon = lp.horizon;
    let tt = horizon as usize;
    let kappa = rational::to_f64(&cfg.kappa);
    let mut by_gt: Vec<Vec<Vec<(f64, &[usize])>>> = vec![vec![Vec::new(); tt + 1]; lp.groups.len()];
    for col in lp.columns.iter().filter(|c| c.value.is_positive()) {
        by_gt[col.group][col.t as usize].push((rational::to_f64(&col.value), &col.path));
    }
    let group_of: Vec<(usize, f64)> = (0..inst.k())
        .map(|i| {
            let g = lp.groups.iter().position(|g| g.vehicles.contains(&i)).expect("vehicle has a group");
            (g, lp.groups[g].size() as f64)
        })
        .collect();
    let rounds = cfg.truncation(growth, offset, inst.n(), horizon);
    let mut builder = RouteBuilder::new(inst);
    let mut used = 0;
    for j in 0..=rounds {
        if builder.all_covered() {
            break;
        }
        used = j + 1;
        let t = time_index(offset * growth.powi(j as i32), horizon);
        for (i, &(g, m)) in group_of.iter().enumerate() {
            let draw = rng.gen::<f64>() * kappa * m;
            if let Some(path) = pick(&by_gt[g][t], draw) {
                builder.add_tour(i, path, cfg.derandomize, &mut rng);
            }
        }
    }
    let cleanup = builder.cover_remaining();
    let mut report = finish(builder, inst, used, cleanup)?;
    report.lower_bound = Some((BoundKind::Lp1, lp.lp.objective.clone()));
    Ok(report)
}

/// `⌊t⌋` clamped to `1..=T`.
fn time_index(t: f64, horizon: i64) -> usize {
    (t.floor() as i64).clamp(1, horizon) as usize
}

/// Column whose cumulative mass first exceeds `draw`; `None` for the residual mass.
fn pick<'a>(cols: &[(f64, &'a [usize])], draw: f64) -> Option<&'a [usize]> {
    let mut acc = 0.0;
    for &(p, path) in cols {
        acc += p;
        if draw < acc {
            return Some(path);
        }
    }
    None
}

pub fn solve_lp2_round(inst: &MetricInstance, cfg: &SolverConfig) -> Result<SolveReport> {
    cfg.validate()?;
    let lp = build_and_solve_lp2(inst, time_horizon(inst).t)?;
    round_lp2(inst, &lp, cfg)
}

/// Like [`round_lp1`], but one joint configuration is drawn per time point. The growth
/// factor defaults to `μ*`.
pub fn round_lp2(inst: &MetricInstance, lp: &Lp2Solution, cfg: &SolverConfig) -> Result<SolveReport> {
    cfg.validate()?;
    if lp.x.len() != inst.n() || lp.columns.iter().any(|c| c.paths.len() != inst.k()) {
        return Err(Error::InvalidArgument("LP2 solution does not match the instance".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let growth = cfg.growth_or(mu());
    let offset = growth.powf(rng.gen::<f64>());
    let horizon = lp.horizon;
    let tt = horizon as usize;
    let kappa = rational::to_f64(&cfg.kappa);
    let mut by_t: Vec<Vec<(f64, usize)>> = vec![Vec::new(); tt + 1];
    for (c, col) in lp.columns.iter().enumerate().filter(|(_, c)| c.value.is_positive()) {
        by_t[col.t as usize].push((rational::to_f64(&col.value), c));
    }
    let rounds = cfg.truncation(growth, offset, inst.n(), horizon);
    let mut builder = RouteBuilder::new(inst);
    let mut used = 0;
    for j in 0..=rounds {
        if builder.all_covered() {
            break;
        }
        used = j + 1;
        let t = time_index(offset * growth.powi(j as i32), horizon);
        let draw = rng.gen::<f64>() * kappa;
        let mut acc = 0.0;
        let chosen = by_t[t].iter().find(|(p, _)| {
            acc += p;
            draw < acc
        });
        if let Some(&(_, c)) = chosen {
            for (i, path) in lp.columns[c].paths.iter().enumerate() {
                builder.add_tour(i, path, cfg.derandomize, &mut rng);
            }
        }
    }
    let cleanup = builder.cover_remaining();
    let mut report = finish(builder, inst, used, cleanup)?;
    report.lower_bound = Some((BoundKind::Lp2, lp.lp.objective.clone()));
    Ok(report)
}

/// Doubles each vehicle's witness path for the coverage targets on the shortest path of
/// `CG(2b*_1, …, 2b*_n)` and concatenates the tours.
pub fn bnslb_construction(inst: &MetricInstance, table: &BnsTable, cfg: &SolverConfig) -> Result<SolveReport> {
    reject_weights(inst, "the bottleneck-stroll construction")?;
    reject_service(inst, "the bottleneck-stroll construction")?;
    if inst.has_allowed_depots() {
        return Err(Error::Unsupported("the bottleneck-stroll construction ignores allowed depots".into()));
    }
    let n = inst.n();
    if table.values.len() != n || table.witnesses.len() != n || table.witnesses.iter().any(|w| w.len() != inst.k()) {
        return Err(Error::InvalidArgument("missing bottleneck-stroll witnesses".into()));
    }
    let doubled: Vec<Rational> = table.values.iter().map(|b| b * rational::int(2)).collect();
    let path = shortest_concat_path(&doubled)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut builder = RouteBuilder::new(inst);
    for &l in &path.nodes[1..] {
        for (i, tour) in table.witnesses[l as usize - 1].iter().enumerate() {
            builder.add_tour(i, tour, cfg.derandomize, &mut rng);
        }
    }
    let cleanup = builder.cover_remaining();
    let mut report = finish(builder, inst, path.nodes.len() - 1, cleanup)?;
    report.lower_bound = Some((BoundKind::Bnslb, table.sum()));
    report.envelope = doubled;
    report.concat_length = Some(path.length);
    Ok(report)
}

/// How a witness tree becomes `k` cycles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Split {
    /// One cycle, no root edges added.
    Whole,
    /// `k` segments of the doubled tree, each joined to the root.
    Segments,
    /// Segments charged against mixed length.
    Service,
}

/// A point of the envelope together with the tree that produced it.
#[derive(Debug, Clone)]
struct Candidate {
    coverage: i64,
    value: Rational,
    tree: RootedTree,
    keep: Vec<bool>,
    /// Every kept node `v` has `c(r,v)` (plus `d(v)` with service times) at most this.
    reach: Rational,
}

/// Lower envelope over the candidates, shortest concatenation path over its corners, and
/// the corresponding trees turned into cycles and concatenated.
fn stitch(inst: &MetricInstance, cands: &[Candidate], split: Split, cfg: &SolverConfig) -> Result<SolveReport> {
    let n = inst.n();
    let k = inst.k();
    let root = inst.root(0);
    let mut points: Vec<(i64, Rational)> = vec![(1, Rational::zero())];
    points.extend(cands.iter().map(|c| (c.coverage, c.value.clone())));
    let curve = lower_envelope(&points)?;
    if curve.domain().1 != n as i64 {
        return Err(Error::Internal("no candidate tree spans every node".into()));
    }
    let envelope: Vec<Rational> = (1..=n as i64).map(|l| curve.evaluate_int(l).expect("inside domain")).collect();
    let path = shortest_path_over_corners(&curve, n as i64)?;
    let cost = inst.costs();
    let service = inst.service_times();
    let radius = |v: usize| match split {
        Split::Service => rational::int(inst.c(root, v) + inst.service(v)),
        _ => rational::int(inst.c(root, v)),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut builder = RouteBuilder::new(inst);
    for &l in &path.nodes[1..] {
        let value = &envelope[l as usize - 1];
        let cand = cands
            .iter()
            .find(|c| c.coverage == l && &c.value == value)
            .ok_or_else(|| Error::Internal(format!("corner {l} has no witness tree")))?;
        let kept: Vec<usize> = cand.tree.nodes().into_iter().filter(|&v| cand.keep[v]).collect();
        if kept.len() as i64 != l || kept.iter().any(|&v| radius(v) > cand.reach) {
            return Err(Error::Internal(format!("witness for corner {l} violates its coverage or reach")));
        }
        let cycles: Vec<Cycle> = match split {
            Split::Whole => vec![double_and_shortcut(&cand.tree, Some(&cand.keep))],
            Split::Segments => split_tree_into_k_tours(cost, &cand.tree, k, &cand.keep)?,
            Split::Service => break_cycle_with_service(cost, service, &cand.tree, &kept, k)?,
        };
        for (i, z) in cycles.iter().enumerate() {
            let mut len = cycle_cost(cost, z);
            if split == Split::Service {
                len += 2 * z.iter().filter(|&&v| v != root).map(|&v| service[v]).sum::<i64>();
            }
            if rational::int(len) > *value {
                return Err(Error::Internal(format!("cycle for corner {l} has length {len} above {value}")));
            }
            builder.add_tour(i, z, cfg.derandomize, &mut rng);
        }
    }
    let cleanup = builder.cover_remaining();
    let mut report = finish(builder, inst, path.nodes.len() - 1, cleanup)?;
    report.envelope = envelope;
    report.concat_length = Some(path.length);
    Ok(report)
}

/// Cost of an out-tree under the directed metric of `lp`.
fn out_tree_cost(arc: &[Vec<Rational>], tree: &RootedTree) -> Rational {
    tree.cost(arc)
}

/// Candidates from packing the arc values of every time step of an LP3 solution.
fn lp3_candidates(inst: &MetricInstance, lp: &Lp3Solution, whole: bool) -> Result<Vec<Candidate>> {
    let n = inst.n();
    let k = inst.k() as i64;
    let root = inst.root(0);
    let arc = arc_costs(inst, lp.metric);
    let mut cands = Vec::new();
    let mut reached = vec![false; n];
    reached[root] = true;
    for t in 1..=lp.horizon {
        for v in 0..n {
            if !reached[v] && lp.x_total(v, t).is_positive() {
                reached[v] = true;
            }
        }
        let arcs: Vec<(usize, usize, Rational)> = lp.z.iter().flat_map(|zg| zg[t as usize].iter().cloned()).collect();
        let mut merged: Vec<(usize, usize, Rational)> = Vec::new();
        for (u, v, val) in arcs {
            match merged.iter_mut().find(|(a, b, _)| *a == u && *b == v) {
                Some(e) => e.2 += val,
                None => merged.push((u, v, val)),
            }
        }
        if merged.is_empty() {
            continue;
        }
        let scale_big = rational::lcm_denominators(merged.iter().map(|a| &a.2));
        let scale = scale_big.to_u64().ok_or_else(|| Error::Guard("arc denominators overflow 64 bits".into()))?;
        let scale_r = Rational::from_integer(scale_big);
        let mut d = WeightedDigraph::new(n);
        for (u, v, val) in &merged {
            let w = (val * &scale_r).to_integer().to_u64().ok_or_else(|| Error::Guard("scaled arc weight overflows".into()))?;
            d.add(*u, *v, w);
        }
        let family = pack_arborescences(&d, root, scale)?;
        for (_, f) in &family.members {
            let tree = RootedTree::from_arborescence(n, f);
            let coverage = tree.nodes().iter().filter(|&&v| reached[v]).count() as i64;
            let c = out_tree_cost(&arc, &tree);
            let tr = rational::int(t);
            let value = if whole { c * rational::int(2) } else { c * rational::frac(2, k) + &tr * rational::int(2) };
            cands.push(Candidate { coverage, value, tree, keep: reached.clone(), reach: tr });
        }
    }
    Ok(cands)
}

/// LP3 rounding for a single depot: pack each time step's arc values into arborescences,
/// stitch the best trees along a concatenation-graph path, and split each into `k` tours.
/// Service times use the directed mixed-length metric and the charging split.
pub fn solve_kmlp_lp(inst: &MetricInstance, cfg: &SolverConfig) -> Result<SolveReport> {
    cfg.validate()?;
    require_single_depot(inst)?;
    reject_weights(inst, "the LP3 rounding")?;
    let lp = build_and_solve_lp3(inst, time_horizon(inst).t)?;
    round_lp3(inst, &lp, cfg)
}

pub fn round_lp3(inst: &MetricInstance, lp: &Lp3Solution, cfg: &SolverConfig) -> Result<SolveReport> {
    require_single_depot(inst)?;
    let split = if lp.metric == ArcMetric::ServiceDirected { Split::Service } else { Split::Segments };
    let cands = lp3_candidates(inst, lp, false)?;
    let mut report = stitch(inst, &cands, split, cfg)?;
    report.lower_bound = Some((BoundKind::Lp3, lp.lp.objective.clone()));
    Ok(report)
}

/// Single-vehicle LP3 rounding: trees are doubled into one tour each, with no root edges.
pub fn solve_mlp_lp(inst: &MetricInstance, cfg: &SolverConfig) -> Result<SolveReport> {
    cfg.validate()?;
    if inst.k() != 1 {
        return Err(Error::Unsupported(format!("single-vehicle algorithm on an instance with k = {}", inst.k())));
    }
    reject_weights(inst, "the single-vehicle LP3 rounding")?;
    reject_service(inst, "the single-vehicle LP3 rounding")?;
    let lp = build_and_solve_lp3(inst, time_horizon(inst).t)?;
    let cands = lp3_candidates(inst, &lp, true)?;
    let mut report = stitch(inst, &cands, Split::Whole, cfg)?;
    report.lower_bound = Some((BoundKind::Lp3, lp.lp.objective.clone()));
    Ok(report)
}

/// Nodes by distance from `root`, root first, ties by index.
pub fn distance_order(inst: &MetricInstance, root: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..inst.n()).filter(|&v| v != root).collect();
    order.sort_by_key(|&v| (inst.c(root, v), v));
    order.insert(0, root);
    order
}

/// Combinatorial single-depot algorithm: for every distance prefix `G_j` of the nodes and every
/// coverage target, a coverage tree (or both halves of a bipoint tree) on `G_j` becomes an
/// envelope point `(|V(Q)|, 2c(Q)/k + 2c(r, v_j))`.
pub fn solve_kmlp_combinatorial(inst: &MetricInstance, cfg: &SolverConfig) -> Result<SolveReport> {
    cfg.validate()?;
    let root = require_single_depot(inst)?;
    reject_weights(inst, "the combinatorial algorithm")?;
    reject_service(inst, "the combinatorial algorithm")?;
    let n = inst.n();
    let k = inst.k() as i64;
    let order = distance_order(inst, root);
    let full = arc_costs(inst, ArcMetric::Plain);
    let mut cands = Vec::new();
    for j in 1..=n {
        let nodes = &order[..j];
        let sub: Vec<Vec<Rational>> = nodes.iter().map(|&a| nodes.iter().map(|&b| full[a][b].clone()).collect()).collect();
        let reach = rational::int(inst.c(root, order[j - 1]));
        let mut keep = vec![false; n];
        for &v in nodes {
            keep[v] = true;
        }
        for (q, _) in coverage_trees_with_costs(&sub, 0)? {
            for t in q.trees() {
                let edges: Vec<(usize, usize)> = t.edges.iter().map(|&(a, b)| (nodes[a], nodes[b])).collect();
                let tree = RootedTree { root, n, edges };
                let value = tree.cost(&full) * rational::frac(2, k) + &reach * rational::int(2);
                cands.push(Candidate { coverage: tree.node_count() as i64, value, tree, keep: keep.clone(), reach: reach.clone() });
            }
        }
    }
    stitch(inst, &cands, Split::Segments, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concat_graph::mu;
    use crate::oracles::exact_kmlp;

    fn fix_a() -> MetricInstance {
        MetricInstance::on_line(&[0, 1, 3], &[0]).unwrap()
    }

    fn fix_b() -> MetricInstance {
        MetricInstance::on_line(&[0, 1, 3, 4], &[0, 3]).unwrap()
    }

    fn single() -> MetricInstance {
        MetricInstance::on_line(&[0, 5], &[0]).unwrap()
    }

    fn ratio_ok(cost: &Rational, factor: f64, bound: &Rational) -> bool {
        rational::to_f64(cost) <= factor * rational::to_f64(bound) * (1.0 + 1e-9)
    }

    #[test]
    fn single_client_everywhere() {
        for alg in Algorithm::ALL {
            for seed in 0..3 {
                let r = solve(&single(), alg, &SolverConfig::with_seed(seed)).unwrap();
                assert_eq!(r.plan.routes, vec![vec![0, 1]], "{alg}");
                assert_eq!(r.cost, rational::int(5));
            }
        }
    }

    #[test]
    fn multidepot_fix_b() {
        let r = solve_multidepot(&fix_b(), &SolverConfig::with_seed(7)).unwrap();
        assert!(r.cost >= rational::int(2));
        let again = solve_multidepot(&fix_b(), &SolverConfig::with_seed(7)).unwrap();
        assert_eq!(r.plan, again.plan);
    }

    #[test]
    fn single_depot_bounds_on_fix_a() {
        let cfg = SolverConfig::default();
        let r = solve_kmlp_lp(&fix_a(), &cfg).unwrap();
        let (_, lp3) = r.lower_bound.clone().unwrap();
        assert!(ratio_ok(&r.cost, 2.0 * mu(), &lp3));
        let r = solve_mlp_lp(&fix_a(), &cfg).unwrap();
        assert!(ratio_ok(&r.cost, mu(), &lp3));
        let r = solve_kmlp_combinatorial(&fix_a(), &cfg).unwrap();
        assert!(ratio_ok(&r.cost, 2.0 * mu(), &rational::int(4)));
        assert_eq!(r.cost, rational::int(4));
        let table = bnslb(&fix_a()).unwrap();
        let r = bnslb_construction(&fix_a(), &table, &cfg).unwrap();
        assert!(ratio_ok(&r.cost, mu(), &rational::int(4)));
    }

    #[test]
    fn duplicate_root_fix_a() {
        let inst = MetricInstance::on_line(&[0, 1, 3], &[0, 0]).unwrap();
        let r = solve_kmlp_lp(&inst, &SolverConfig::default()).unwrap();
        let (_, lp3) = r.lower_bound.clone().unwrap();
        assert!(ratio_ok(&r.cost, 2.0 * mu(), &lp3));
        assert!(r.cost >= exact_kmlp(&inst).unwrap().value);
    }

    #[test]
    fn two_equidistant_clients() {
        let cost = vec![vec![0, 1, 1], vec![1, 0, 2], vec![1, 2, 0]];
        let inst = MetricInstance::new(vec!["r".into(), "a".into(), "b".into()], vec![0], cost, None, None, None).unwrap();
        let r = solve_mlp_lp(&inst, &SolverConfig::default()).unwrap();
        let (_, lp3) = r.lower_bound.clone().unwrap();
        assert!(ratio_ok(&r.cost, mu(), &lp3));
        assert_eq!(exact_kmlp(&inst).unwrap().value, rational::int(4));
    }

    #[test]
    fn single_depot_algorithms_reject_multi_depot() {
        for alg in [Algorithm::KmlpLp, Algorithm::KmlpComb] {
            assert!(matches!(solve(&fix_b(), alg, &SolverConfig::default()), Err(Error::Unsupported(_))));
        }
    }

    #[test]
    fn lp2_rounding_is_feasible() {
        for seed in 0..5 {
            let r = solve_lp2_round(&fix_b(), &SolverConfig::with_seed(seed)).unwrap();
            assert!(r.cost >= rational::int(2));
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = SolverConfig::default();
        cfg.growth = Some(rational::int(3));
        assert!(cfg.validate().is_err());
        cfg.growth = Some(rational::frac(3, 2));
        assert!(cfg.validate().is_ok());
        cfg.kappa = rational::frac(1, 2);
        assert!(cfg.validate().is_err());
        assert_eq!("kmlp-comb".parse::<Algorithm>().unwrap(), Algorithm::KmlpComb);
        assert!("nope".parse::<Algorithm>().is_err());
    }
}
