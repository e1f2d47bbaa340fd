//! Exhaustive ground-truth solvers for small instances.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::instance::{MetricInstance, RoutePlan};
use crate::lp::columns::SubsetPaths;
use crate::lp::{arc_costs, ArcMetric};
use crate::rational::{self, Rational};

/// Largest client count the subset dynamic programs accept.
pub const CLIENT_GUARD: usize = 10;
const ORIENTEERING_GUARD: usize = 12;
const PATH_COLLECTION_GUARD: usize = 9;

#[derive(Debug, Clone)]
pub struct OracleResult<W> {
    pub value: Rational,
    pub witness: W,
    /// Number of DP states or candidates examined.
    pub explored: u64,
}

fn guard(m: usize, limit: usize) -> Result<()> {
    if m > limit {
        return Err(Error::Guard(format!("{m} free nodes exceed the exhaustive-search limit of {limit}")));
    }
    Ok(())
}

fn submasks(mask: usize) -> impl Iterator<Item = usize> {
    let mut s = mask;
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let out = s;
        if s == 0 {
            done = true;
        } else {
            s = (s - 1) & mask;
        }
        Some(out)
    })
}

/// Minimum total (weighted, service-inclusive) latency over all plans.
pub fn exact_kmlp(inst: &MetricInstance) -> Result<OracleResult<RoutePlan>> {
    let clients = inst.clients();
    let m = clients.len();
    guard(m, CLIENT_GUARD)?;
    let full = 1usize << m;
    let starts: Vec<usize> = clients.iter().copied().chain(inst.distinct_roots()).collect();
    let wsum: Vec<i64> = (0..full)
        .map(|s| (0..m).filter(|i| s & (1 << i) != 0).map(|i| inst.weight(clients[i])).sum())
        .collect();
    // g[s][p]: cost of serving set s starting (at time 0) from starts[p]; nxt records the first client.
    let mut g = vec![vec![0i64; starts.len()]; full];
    let mut nxt = vec![vec![usize::MAX; starts.len()]; full];
    let mut explored = 0u64;
    let mut order: Vec<usize> = (1..full).collect();
    order.sort_by_key(|s| s.count_ones());
    for s in order {
        for (p, &from) in starts.iter().enumerate() {
            if p < m && s & (1 << p) != 0 {
                continue;
            }
            let mut best = i64::MAX;
            for u in (0..m).filter(|u| s & (1 << u) != 0) {
                explored += 1;
                let step = inst.c(from, clients[u]) + inst.service(clients[u]);
                let cand = step * wsum[s] + g[s & !(1 << u)][u];
                if cand < best {
                    best = cand;
                    nxt[s][p] = u;
                }
            }
            g[s][p] = best;
        }
    }
    let start_of = |r: usize| m + inst.distinct_roots().iter().position(|&x| x == r).expect("root listed");
    let k = inst.k();
    let allowed: Vec<usize> = (0..k)
        .map(|i| (0..m).filter(|&u| inst.vehicle_allowed(i, clients[u])).fold(0, |a, u| a | (1 << u)))
        .collect();
    // part[i][s]: best cost of serving s with vehicles 0..i.
    let inf = i64::MAX;
    let mut part = vec![vec![inf; full]; k + 1];
    let mut pick = vec![vec![0usize; full]; k + 1];
    part[0][0] = 0;
    for i in 0..k {
        let p = start_of(inst.root(i));
        for s in 0..full {
            for sub in submasks(s & allowed[i]) {
                explored += 1;
                let rest = part[i][s & !sub];
                if rest == inf {
                    continue;
                }
                let cand = rest + g[sub][p];
                if cand < part[i + 1][s] {
                    part[i + 1][s] = cand;
                    pick[i + 1][s] = sub;
                }
            }
        }
    }
    let best = part[k][full - 1];
    if best == inf {
        return Err(Error::Infeasible);
    }
    let mut routes = vec![Vec::new(); k];
    let mut s = full - 1;
    for i in (0..k).rev() {
        let sub = pick[i + 1][s];
        let mut route = vec![inst.root(i)];
        let mut cur = sub;
        let mut p = start_of(inst.root(i));
        while cur != 0 {
            let u = nxt[cur][p];
            route.push(clients[u]);
            cur &= !(1 << u);
            p = u;
        }
        routes[i] = route;
        s &= !sub;
    }
    Ok(OracleResult { value: rational::int(best), witness: RoutePlan { routes }, explored })
}

/// Bottleneck-stroll values `b*_ℓ` for `ℓ = 1..=n` with witness path tuples.
#[derive(Debug, Clone)]
pub struct BnsTable {
    /// `values[ℓ - 1] = b*_ℓ`.
    pub values: Vec<Rational>,
    /// `witnesses[ℓ - 1][i]`: vehicle `i`'s path, root first.
    pub witnesses: Vec<Vec<Vec<usize>>>,
}

impl BnsTable {
    pub fn value(&self, l: usize) -> &Rational {
        &self.values[l - 1]
    }

    pub fn sum(&self) -> Rational {
        self.values.iter().sum()
    }
}

/// Exact bottleneck strolls for every coverage target on the plain metric.
///
/// Paths may pass through other depots, but shortcutting them never costs more, so each
/// vehicle covers its root plus a private set of clients.
pub fn bnslb(inst: &MetricInstance) -> Result<BnsTable> {
    let clients = inst.clients();
    let m = clients.len();
    guard(m, CLIENT_GUARD)?;
    let full = 1usize << m;
    let cost = arc_costs(inst, ArcMetric::Plain);
    let roots = inst.distinct_roots();
    let paths: Vec<SubsetPaths> = roots
        .iter()
        .map(|&r| SubsetPaths::compute(&cost, r, &clients, usize::MAX))
        .collect::<Result<_>>()?;
    let h = |r: usize, s: usize| -> Rational {
        if s == 0 {
            Rational::zero()
        } else {
            paths[roots.iter().position(|&x| x == r).expect("root listed")].len[s].clone().expect("nonempty set")
        }
    };
    let k = inst.k();
    let mut f: Vec<Vec<Option<Rational>>> = vec![vec![None; full]; k + 1];
    let mut pick = vec![vec![0usize; full]; k + 1];
    f[0][0] = Some(Rational::zero());
    for i in 0..k {
        let r = inst.root(i);
        for s in 0..full {
            for sub in submasks(s) {
                let Some(rest) = &f[i][s & !sub] else { continue };
                let hv = h(r, sub);
                let cand = if hv > *rest { hv } else { rest.clone() };
                if f[i + 1][s].as_ref().is_none_or(|cur| cand < *cur) {
                    f[i + 1][s] = Some(cand);
                    pick[i + 1][s] = sub;
                }
            }
        }
    }
    let n = inst.n();
    let base = roots.len();
    let mut values = Vec::with_capacity(n);
    let mut witnesses = Vec::with_capacity(n);
    for l in 1..=n {
        let need = l.saturating_sub(base);
        let mut best: Option<(Rational, usize)> = None;
        for s in (0..full).filter(|s| s.count_ones() as usize >= need) {
            if let Some(v) = &f[k][s] {
                if best.as_ref().is_none_or(|(b, _)| v < b) {
                    best = Some((v.clone(), s));
                }
            }
        }
        let (v, mut s) = best.ok_or(Error::Infeasible)?;
        let mut tuple = vec![Vec::new(); k];
        for i in (0..k).rev() {
            let sub = pick[i + 1][s];
            let r = inst.root(i);
            tuple[i] = if sub == 0 {
                vec![r]
            } else {
                paths[roots.iter().position(|&x| x == r).expect("root listed")].path(sub)
            };
            s &= !sub;
        }
        values.push(v);
        witnesses.push(tuple);
    }
    Ok(BnsTable { values, witnesses })
}

/// `b*_ℓ`: the least achievable maximum path cost when the `k` paths jointly cover `ℓ` nodes.
pub fn exact_bottleneck_stroll(inst: &MetricInstance, l: usize) -> Result<OracleResult<Vec<Vec<usize>>>> {
    if l < 1 || l > inst.n() {
        return Err(Error::InvalidArgument(format!("coverage target {l} outside 1..={}", inst.n())));
    }
    let table = bnslb(inst)?;
    Ok(OracleResult { value: table.values[l - 1].clone(), witness: table.witnesses[l - 1].clone(), explored: 0 })
}

/// Maximum reward of a rooted path of length at most `budget`.
pub fn exact_orienteering(
    inst: &MetricInstance,
    root: usize,
    budget: &Rational,
    rewards: &[Rational],
) -> Result<OracleResult<Vec<usize>>> {
    let targets: Vec<usize> = (0..inst.n()).filter(|&v| v != root).collect();
    guard(targets.len(), ORIENTEERING_GUARD)?;
    let cost = arc_costs(inst, ArcMetric::Plain);
    let sp = SubsetPaths::compute(&cost, root, &targets, usize::MAX)?;
    let mut best = (Rational::zero(), 0usize);
    for (mask, len) in sp.len.iter().enumerate() {
        if len.as_ref().is_some_and(|l| l <= budget) {
            let r: Rational = sp.nodes(mask).iter().map(|&v| rewards[v].clone()).sum();
            if r > best.0 {
                best = (r, mask);
            }
        }
    }
    let path = if best.1 == 0 { vec![root] } else { sp.path(best.1) };
    Ok(OracleResult { value: best.0, witness: path, explored: sp.len.len() as u64 })
}

/// Cheapest collection of rooted paths covering each subset of the non-root nodes.
#[derive(Debug, Clone)]
pub struct PathCollections {
    pub root: usize,
    pub targets: Vec<usize>,
    /// `cover[mask]`: minimum total cost of rooted paths whose union is exactly `mask`.
    pub cover: Vec<Rational>,
    pick: Vec<usize>,
    paths: SubsetPaths,
}

impl PathCollections {
    pub fn compute(cost: &[Vec<Rational>], root: usize) -> Result<Self> {
        let targets: Vec<usize> = (0..cost.len()).filter(|&v| v != root).collect();
        guard(targets.len(), PATH_COLLECTION_GUARD)?;
        let paths = SubsetPaths::compute(cost, root, &targets, usize::MAX)?;
        let full = 1usize << targets.len();
        let mut cover = vec![Rational::zero(); full];
        let mut pick = vec![0usize; full];
        for s in 1..full {
            let low = s & s.wrapping_neg();
            let mut best: Option<Rational> = None;
            for sub in submasks(s).filter(|sub| sub & low != 0) {
                let cand = paths.len[sub].clone().expect("nonempty set") + &cover[s & !sub];
                if best.as_ref().is_none_or(|b| cand < *b) {
                    best = Some(cand);
                    pick[s] = sub;
                }
            }
            cover[s] = best.expect("some split exists");
        }
        Ok(Self { root, targets, cover, pick, paths })
    }

    pub fn collection(&self, mask: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut s = mask;
        while s != 0 {
            let sub = self.pick[s];
            out.push(self.paths.path(sub));
            s &= !sub;
        }
        out
    }

    pub fn nodes(&self, mask: usize) -> Vec<usize> {
        self.paths.nodes(mask)
    }
}

/// `min_C Σ_{P∈C} c(P) + π(V ∖ ∪V(P))` over collections of rooted paths.
pub fn exact_pc_paths_with_costs(
    cost: &[Vec<Rational>],
    root: usize,
    penalties: &[Rational],
) -> Result<OracleResult<Vec<Vec<usize>>>> {
    if penalties.iter().any(Signed::is_negative) {
        return Err(Error::InvalidArgument("penalties must be nonnegative".into()));
    }
    let pc = PathCollections::compute(cost, root)?;
    let total: Rational = pc.targets.iter().map(|&v| penalties[v].clone()).sum();
    let mut best: Option<(Rational, usize)> = None;
    for (mask, c) in pc.cover.iter().enumerate() {
        let covered: Rational = pc.nodes(mask).iter().map(|&v| penalties[v].clone()).sum();
        let val = c + &total - covered;
        if best.as_ref().is_none_or(|(b, _)| val < *b) {
            best = Some((val, mask));
        }
    }
    let (value, mask) = best.expect("empty collection is always available");
    Ok(OracleResult { value, witness: pc.collection(mask), explored: pc.cover.len() as u64 })
}

pub fn exact_pc_paths(inst: &MetricInstance, root: usize, penalties: &[Rational]) -> Result<OracleResult<Vec<Vec<usize>>>> {
    exact_pc_paths_with_costs(&arc_costs(inst, ArcMetric::Plain), root, penalties)
}

/// `O*(B)`: cheapest rooted path collection spanning at least `b` nodes, root included.
pub fn exact_coverage_cost(cost: &[Vec<Rational>], root: usize, b: usize) -> Result<OracleResult<Vec<Vec<usize>>>> {
    if b < 1 || b > cost.len() {
        return Err(Error::InvalidArgument(format!("coverage target {b} outside 1..={}", cost.len())));
    }
    let pc = PathCollections::compute(cost, root)?;
    let mut best: Option<(Rational, usize)> = None;
    for (mask, c) in pc.cover.iter().enumerate() {
        if mask.count_ones() as usize + 1 >= b && best.as_ref().is_none_or(|(bv, _)| c < bv) {
            best = Some((c.clone(), mask));
        }
    }
    let (value, mask) = best.expect("the full set is always coverable");
    Ok(OracleResult { value, witness: pc.collection(mask), explored: pc.cover.len() as u64 })
}

/// `n*(C)`: largest node weight coverable by rooted paths of total cost at most `budget`.
pub fn exact_budget_coverage(
    cost: &[Vec<Rational>],
    root: usize,
    weights: &[Rational],
    budget: &Rational,
) -> Result<OracleResult<Vec<Vec<usize>>>> {
    let pc = PathCollections::compute(cost, root)?;
    let mut best = (weights[root].clone(), 0usize);
    for (mask, c) in pc.cover.iter().enumerate() {
        if c <= budget {
            let w: Rational = weights[root].clone() + pc.nodes(mask).iter().map(|&v| weights[v].clone()).sum::<Rational>();
            if w > best.0 {
                best = (w, mask);
            }
        }
    }
    Ok(OracleResult { value: best.0, witness: pc.collection(best.1), explored: pc.cover.len() as u64 })
}
