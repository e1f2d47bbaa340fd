//! Metric instances, route plans and latency evaluation.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Which latency objective an instance asks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectiveVariant {
    Plain,
    Weighted,
    Service,
    WeightedService,
}

/// Complete metric graph with depots and the optional objective data.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricInstance {
    names: Vec<String>,
    roots: Vec<usize>,
    cost: Vec<Vec<i64>>,
    weights: Vec<i64>,
    service: Vec<i64>,
    allowed: Vec<Vec<usize>>,
    has_weights: bool,
    has_service: bool,
    has_allowed: bool,
}

#[derive(Debug, Deserialize)]
struct InstanceFile {
    nodes: Vec<Value>,
    roots: Vec<Value>,
    costs: Vec<Vec<Value>>,
    #[serde(default)]
    weights: Option<BTreeMap<String, Value>>,
    #[serde(default)]
    service_times: Option<BTreeMap<String, Value>>,
    #[serde(default)]
    allowed_depots: Option<BTreeMap<String, Vec<Value>>>,
}

fn ident(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(Error::Parse(format!("node identifier must be a string or number, got {other}"))),
    }
}

fn integer(v: &Value, what: &str) -> Result<i64> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .ok_or_else(|| Error::Parse(format!("{what} must be an integer, got {n}"))),
        other => Err(Error::Parse(format!("{what} must be an integer, got {other}"))),
    }
}

/// Parses and validates an instance from its JSON text.
pub fn parse_instance(text: &str) -> Result<MetricInstance> {
    let file: InstanceFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let names = file.nodes.iter().map(ident).collect::<Result<Vec<_>>>()?;
    let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    if index.len() != names.len() {
        return Err(Error::InvalidInstance("duplicate node identifier".into()));
    }
    let lookup = |v: &Value| -> Result<usize> {
        let id = ident(v)?;
        index
            .get(id.as_str())
            .copied()
            .ok_or_else(|| Error::InvalidInstance(format!("unknown node {id:?}")))
    };
    let lookup_key = |id: &str| -> Result<usize> {
        index
            .get(id)
            .copied()
            .ok_or_else(|| Error::InvalidInstance(format!("unknown node {id:?}")))
    };
    let roots = file.roots.iter().map(lookup).collect::<Result<Vec<_>>>()?;
    let mut cost = Vec::with_capacity(file.costs.len());
    for row in &file.costs {
        cost.push(row.iter().map(|v| integer(v, "cost")).collect::<Result<Vec<_>>>()?);
    }
    let n = names.len();
    let mut weights = None;
    if let Some(w) = &file.weights {
        let mut ws = vec![1; n];
        for (k, v) in w {
            ws[lookup_key(k)?] = integer(v, "weight")?;
        }
        weights = Some(ws);
    }
    let mut service = None;
    if let Some(d) = &file.service_times {
        let mut ds = vec![0; n];
        for (k, v) in d {
            ds[lookup_key(k)?] = integer(v, "service time")?;
        }
        service = Some(ds);
    }
    let mut allowed = None;
    if let Some(a) = &file.allowed_depots {
        let mut sets: Vec<Option<Vec<usize>>> = vec![None; n];
        for (k, v) in a {
            let set = v.iter().map(lookup).collect::<Result<Vec<_>>>()?;
            sets[lookup_key(k)?] = Some(set);
        }
        allowed = Some(sets);
    }
    MetricInstance::new(names, roots, cost, weights, service, allowed)
}

impl MetricInstance {
    /// Validates the raw data; `allowed[v] = None` means every depot may serve `v`.
    pub fn new(
        names: Vec<String>,
        roots: Vec<usize>,
        cost: Vec<Vec<i64>>,
        weights: Option<Vec<i64>>,
        service: Option<Vec<i64>>,
        allowed: Option<Vec<Option<Vec<usize>>>>,
    ) -> Result<Self> {
        let n = names.len();
        let bad = |m: String| Err(Error::InvalidInstance(m));
        if n == 0 {
            return bad("instance has no nodes".into());
        }
        if roots.is_empty() {
            return bad("instance has no roots".into());
        }
        if roots.iter().any(|&r| r >= n) {
            return bad("root index out of range".into());
        }
        if cost.len() != n || cost.iter().any(|row| row.len() != n) {
            return bad(format!("cost matrix must be {n}x{n}"));
        }
        for u in 0..n {
            if cost[u][u] != 0 {
                return bad(format!("nonzero diagonal cost at {}", names[u]));
            }
            for v in 0..n {
                if cost[u][v] < 0 {
                    return bad(format!("negative cost between {} and {}", names[u], names[v]));
                }
                if cost[u][v] != cost[v][u] {
                    return bad(format!("asymmetric cost between {} and {}", names[u], names[v]));
                }
            }
        }
        for u in 0..n {
            for v in 0..n {
                for w in 0..n {
                    if cost[u][w] > cost[u][v] + cost[v][w] {
                        return bad(format!(
                            "triangle inequality violated: c({a},{c}) > c({a},{b}) + c({b},{c})",
                            a = names[u],
                            b = names[v],
                            c = names[w]
                        ));
                    }
                }
            }
        }
        let mut is_root = vec![false; n];
        for &r in &roots {
            is_root[r] = true;
        }
        for v in (0..n).filter(|&v| !is_root[v]) {
            for &r in &roots {
                if cost[r][v] < 1 {
                    return bad(format!("client {} is at distance < 1 from root {}", names[v], names[r]));
                }
            }
        }
        let has_weights = weights.is_some();
        let mut weights = weights.unwrap_or_else(|| vec![1; n]);
        if weights.len() != n || weights.iter().any(|&w| w < 0) {
            return bad("weights must be nonnegative, one per node".into());
        }
        let has_service = service.is_some();
        let mut service = service.unwrap_or_else(|| vec![0; n]);
        if service.len() != n || service.iter().any(|&d| d < 0) {
            return bad("service times must be nonnegative, one per node".into());
        }
        for &r in &roots {
            weights[r] = 1;
            service[r] = 0;
        }
        let mut distinct: Vec<usize> = roots.clone();
        distinct.sort_unstable();
        distinct.dedup();
        let has_allowed = allowed.is_some();
        let allowed_sets = match allowed {
            None => vec![distinct.clone(); n],
            Some(sets) => {
                if sets.len() != n {
                    return bad("allowed-depot table must cover every node".into());
                }
                let mut out = Vec::with_capacity(n);
                for (v, set) in sets.into_iter().enumerate() {
                    match set {
                        None => out.push(distinct.clone()),
                        Some(mut s) => {
                            s.sort_unstable();
                            s.dedup();
                            if s.is_empty() && !is_root[v] {
                                return bad(format!("empty allowed-depot set for {}", names[v]));
                            }
                            if s.iter().any(|r| !is_root[*r]) {
                                return bad(format!("allowed-depot set of {} names a non-root", names[v]));
                            }
                            out.push(s);
                        }
                    }
                }
                out
            }
        };
        Ok(Self {
            names,
            roots,
            cost,
            weights,
            service,
            allowed: allowed_sets,
            has_weights,
            has_service,
            has_allowed,
        })
    }

    /// Builds an instance from points on a line (handy for fixtures and tests).
    pub fn on_line(positions: &[i64], roots: &[usize]) -> Result<Self> {
        let n = positions.len();
        let names = (0..n).map(|i| format!("v{i}")).collect();
        let cost = (0..n)
            .map(|u| (0..n).map(|v| (positions[u] - positions[v]).abs()).collect())
            .collect();
        Self::new(names, roots.to_vec(), cost, None, None, None)
    }

    pub fn with_weights(mut self, weights: Vec<i64>) -> Result<Self> {
        let allowed = self.has_allowed.then(|| self.allowed.iter().cloned().map(Some).collect());
        let service = self.has_service.then(|| self.service.clone());
        self = Self::new(self.names, self.roots, self.cost, Some(weights), service, allowed)?;
        Ok(self)
    }

    pub fn with_service(self, service: Vec<i64>) -> Result<Self> {
        let allowed = self.has_allowed.then(|| self.allowed.iter().cloned().map(Some).collect());
        let weights = self.has_weights.then(|| self.weights.clone());
        Self::new(self.names, self.roots, self.cost, weights, Some(service), allowed)
    }

    pub fn with_allowed(self, allowed: Vec<Option<Vec<usize>>>) -> Result<Self> {
        let weights = self.has_weights.then(|| self.weights.clone());
        let service = self.has_service.then(|| self.service.clone());
        Self::new(self.names, self.roots, self.cost, weights, service, Some(allowed))
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn k(&self) -> usize {
        self.roots.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|s| s == name)
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn root(&self, i: usize) -> usize {
        self.roots[i]
    }

    pub fn c(&self, u: usize, v: usize) -> i64 {
        self.cost[u][v]
    }

    pub fn costs(&self) -> &[Vec<i64>] {
        &self.cost
    }

    pub fn weight(&self, v: usize) -> i64 {
        self.weights[v]
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn service(&self, v: usize) -> i64 {
        self.service[v]
    }

    pub fn service_times(&self) -> &[i64] {
        &self.service
    }

    pub fn has_weights(&self) -> bool {
        self.has_weights
    }

    pub fn has_service(&self) -> bool {
        self.has_service
    }

    pub fn has_allowed_depots(&self) -> bool {
        self.has_allowed
    }

    pub fn variant(&self) -> ObjectiveVariant {
        match (self.has_weights, self.has_service) {
            (false, false) => ObjectiveVariant::Plain,
            (true, false) => ObjectiveVariant::Weighted,
            (false, true) => ObjectiveVariant::Service,
            (true, true) => ObjectiveVariant::WeightedService,
        }
    }

    pub fn is_root(&self, v: usize) -> bool {
        self.roots.contains(&v)
    }

    /// Distinct depot nodes in increasing index order.
    pub fn distinct_roots(&self) -> Vec<usize> {
        let mut d = self.roots.clone();
        d.sort_unstable();
        d.dedup();
        d
    }

    pub fn is_single_depot(&self) -> bool {
        self.roots.iter().all(|&r| r == self.roots[0])
    }

    /// Non-depot nodes in index order.
    pub fn clients(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| !self.is_root(v)).collect()
    }

    /// Depot nodes allowed to serve `v`.
    pub fn allowed_roots(&self, v: usize) -> &[usize] {
        &self.allowed[v]
    }

    /// Whether vehicle `i` may serve node `v`.
    pub fn vehicle_allowed(&self, i: usize, v: usize) -> bool {
        self.allowed[v].contains(&self.roots[i])
    }

    pub fn max_cost(&self) -> i64 {
        self.cost.iter().flatten().copied().max().unwrap_or(0)
    }

    /// Directed service metric `c'(u,v) = c(u,v) + d(v)`.
    pub fn service_arc_cost(&self, u: usize, v: usize) -> i64 {
        self.cost[u][v] + self.service[v]
    }

    /// Symmetric half-service metric `c''(u,v) = c(u,v) + (d(u)+d(v))/2`.
    pub fn half_service_cost(&self, u: usize, v: usize) -> Rational {
        if u == v {
            return rational::int(0);
        }
        rational::frac(2 * self.cost[u][v] + self.service[u] + self.service[v], 2)
    }

    /// Instance restricted to `nodes` (root data and optional fields carried over).
    pub fn restrict(&self, nodes: &[usize]) -> Result<Self> {
        let pos: HashMap<usize, usize> = nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let roots = self
            .roots
            .iter()
            .map(|r| pos.get(r).copied().ok_or_else(|| Error::InvalidArgument("restriction drops a root".into())))
            .collect::<Result<Vec<_>>>()?;
        let names = nodes.iter().map(|&v| self.names[v].clone()).collect();
        let cost = nodes.iter().map(|&u| nodes.iter().map(|&v| self.cost[u][v]).collect()).collect();
        let weights = self.has_weights.then(|| nodes.iter().map(|&v| self.weights[v]).collect());
        let service = self.has_service.then(|| nodes.iter().map(|&v| self.service[v]).collect());
        let allowed = self.has_allowed.then(|| {
            nodes
                .iter()
                .map(|&v| Some(self.allowed[v].iter().filter_map(|r| pos.get(r).copied()).collect()))
                .collect()
        });
        Self::new(names, roots, cost, weights, service, allowed)
    }

    /// Serializes back to the instance JSON schema.
    pub fn to_json(&self) -> Value {
        let mut obj = serde_json::Map::new();
        obj.insert("nodes".into(), Value::from(self.names.clone()));
        obj.insert(
            "roots".into(),
            Value::from(self.roots.iter().map(|&r| self.names[r].clone()).collect::<Vec<_>>()),
        );
        obj.insert("costs".into(), serde_json::to_value(&self.cost).unwrap_or(Value::Null));
        let per_node = |vals: &[i64]| -> Value {
            let m: serde_json::Map<String, Value> = self
                .clients()
                .into_iter()
                .map(|v| (self.names[v].clone(), Value::from(vals[v])))
                .collect();
            Value::Object(m)
        };
        if self.has_weights {
            obj.insert("weights".into(), per_node(&self.weights));
        }
        if self.has_service {
            obj.insert("service_times".into(), per_node(&self.service));
        }
        if self.has_allowed {
            let m: serde_json::Map<String, Value> = self
                .clients()
                .into_iter()
                .map(|v| {
                    let set: Vec<String> = self.allowed[v].iter().map(|&r| self.names[r].clone()).collect();
                    (self.names[v].clone(), Value::from(set))
                })
                .collect();
            obj.insert("allowed_depots".into(), Value::Object(m));
        }
        Value::Object(obj)
    }
}

/// One node sequence per vehicle; route `i` starts at the vehicle's depot.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RoutePlan {
    pub routes: Vec<Vec<usize>>,
}

/// Per-node latencies and the weighted total of a plan.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub total: Rational,
    pub latency: Vec<i64>,
}

/// Latencies along one route: edge costs plus service times up to and including each node.
pub fn route_latencies(inst: &MetricInstance, route: &[usize]) -> Vec<i64> {
    let mut out = Vec::with_capacity(route.len());
    let mut t = 0i64;
    for (p, &v) in route.iter().enumerate() {
        if p > 0 {
            t += inst.c(route[p - 1], v) + inst.service(v);
        }
        out.push(t);
    }
    out
}

/// Checks feasibility and returns the objective value `Σ w_v · latency(v)`.
pub fn evaluate_plan(inst: &MetricInstance, plan: &RoutePlan) -> Result<Evaluation> {
    let n = inst.n();
    let bad = |m: String| Err(Error::InfeasiblePlan(m));
    if plan.routes.len() < inst.k() {
        return bad(format!("plan has {} routes for {} vehicles", plan.routes.len(), inst.k()));
    }
    let mut latency: Vec<Option<i64>> = vec![None; n];
    for &r in inst.roots() {
        latency[r] = Some(0);
    }
    for (i, route) in plan.routes.iter().enumerate() {
        if route.is_empty() {
            return bad(format!("route {i} is empty"));
        }
        let root = if i < inst.k() { inst.root(i) } else { route[0] };
        if route[0] != root {
            return bad(format!("route {i} does not start at its depot {}", inst.name(root)));
        }
        if i >= inst.k() && route.len() > 1 {
            return bad(format!("route {i} has no vehicle"));
        }
        let lat = route_latencies(inst, route);
        for (p, &v) in route.iter().enumerate().skip(1) {
            if v >= n {
                return bad(format!("route {i} names unknown node {v}"));
            }
            if inst.is_root(v) {
                return bad(format!("route {i} passes through depot {}", inst.name(v)));
            }
            if latency[v].is_some() {
                return bad(format!("node {} is visited twice", inst.name(v)));
            }
            if !inst.vehicle_allowed(i, v) {
                return bad(format!("node {} served from a disallowed depot", inst.name(v)));
            }
            latency[v] = Some(lat[p]);
        }
    }
    let mut total = 0i64;
    let mut out = vec![0; n];
    for v in 0..n {
        match latency[v] {
            None => return bad(format!("uncovered node {}", inst.name(v))),
            Some(l) => {
                out[v] = l;
                total += inst.weight(v) * l;
            }
        }
    }
    Ok(Evaluation { total: rational::int(total), latency: out })
}

/// A latency bound certified by a concrete feasible plan.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeHorizon {
    pub t: i64,
    pub plan: RoutePlan,
}

/// Nearest-neighbor plan with clients at their nearest allowed depot; `T` is its max latency.
pub fn time_horizon(inst: &MetricInstance) -> TimeHorizon {
    let k = inst.k();
    let mut assigned: Vec<Vec<usize>> = vec![Vec::new(); k];
    for v in inst.clients() {
        let best = inst
            .allowed_roots(v)
            .iter()
            .copied()
            .min_by_key(|&r| (inst.c(r, v), r))
            .expect("allowed set is nonempty");
        let vehicle = inst.roots().iter().position(|&r| r == best).expect("allowed root is a root");
        assigned[vehicle].push(v);
    }
    let mut routes = Vec::with_capacity(k);
    for (i, mut todo) in assigned.into_iter().enumerate() {
        let mut route = vec![inst.root(i)];
        let mut cur = inst.root(i);
        while !todo.is_empty() {
            let (pos, _) = todo
                .iter()
                .enumerate()
                .min_by_key(|(_, &v)| (inst.c(cur, v), v))
                .expect("nonempty");
            cur = todo.swap_remove(pos);
            route.push(cur);
        }
        routes.push(route);
    }
    let plan = RoutePlan { routes };
    let t = plan
        .routes
        .iter()
        .flat_map(|r| route_latencies(inst, r))
        .max()
        .unwrap_or(0);
    TimeHorizon { t, plan }
}

/// Cleans raw routes into a valid plan: drops interior depots, disallowed nodes, and
/// every occurrence of a node except the one with the smallest latency.
pub fn normalize_routes(inst: &MetricInstance, raw: &[Vec<usize>]) -> RoutePlan {
    let k = inst.k();
    let mut routes: Vec<Vec<usize>> = (0..k)
        .map(|i| {
            let mut r = vec![inst.root(i)];
            if let Some(src) = raw.get(i) {
                for &v in src.iter().skip(1) {
                    if !inst.is_root(v) && inst.vehicle_allowed(i, v) && !r.contains(&v) {
                        r.push(v);
                    }
                }
            }
            r
        })
        .collect();
    let mut best: Vec<Option<(i64, usize)>> = vec![None; inst.n()];
    for (i, r) in routes.iter().enumerate() {
        for (p, l) in route_latencies(inst, r).into_iter().enumerate().skip(1) {
            let v = r[p];
            if best[v].is_none_or(|(bl, _)| l < bl) {
                best[v] = Some((l, i));
            }
        }
    }
    for (i, r) in routes.iter_mut().enumerate() {
        r.retain(|&v| inst.is_root(v) || best[v].map(|(_, bi)| bi) == Some(i));
    }
    RoutePlan { routes }
}

/// Upper bounds and lower bounds attached to a solution file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bnslb: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lp1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lp2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lp3: Option<f64>,
}

/// Solution file schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub algorithm: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub routes: Vec<Vec<String>>,
    pub total_latency: f64,
    pub per_node_latency: BTreeMap<String, f64>,
    #[serde(default)]
    pub bounds: Bounds,
}

impl SolutionFile {
    pub fn new(inst: &MetricInstance, algorithm: &str, seed: Option<u64>, plan: &RoutePlan) -> Result<Self> {
        let eval = evaluate_plan(inst, plan)?;
        Ok(Self {
            algorithm: algorithm.to_string(),
            seed,
            routes: plan
                .routes
                .iter()
                .map(|r| r.iter().map(|&v| inst.name(v).to_string()).collect())
                .collect(),
            total_latency: rational::to_f64(&eval.total),
            per_node_latency: (0..inst.n())
                .map(|v| (inst.name(v).to_string(), eval.latency[v] as f64))
                .collect(),
            bounds: Bounds::default(),
        })
    }

    /// Maps node names back to indices.
    pub fn plan(&self, inst: &MetricInstance) -> Result<RoutePlan> {
        let routes = self
            .routes
            .iter()
            .map(|r| {
                r.iter()
                    .map(|s| inst.index_of(s).ok_or_else(|| Error::InvalidArgument(format!("unknown node {s:?}"))))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RoutePlan { routes })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fix_a() -> MetricInstance {
        MetricInstance::on_line(&[0, 1, 3], &[0]).unwrap()
    }

    fn fix_b() -> MetricInstance {
        MetricInstance::on_line(&[0, 1, 3, 4], &[0, 3]).unwrap()
    }

    #[test]
    fn parses_line_fixture() {
        let text = r#"{"nodes":["r","a","b"],"roots":["r"],"costs":[[0,1,3],[1,0,2],[3,2,0]]}"#;
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.c(0, 1), 1);
        assert_eq!(inst.c(0, 2), 3);
        assert_eq!(inst.c(1, 2), 2);
        assert_eq!(inst.k(), 1);
    }

    #[test]
    fn rejects_bad_instances() {
        let asym = r#"{"nodes":["r","u","v"],"roots":["r"],"costs":[[0,1,1],[1,0,5],[1,4,0]]}"#;
        assert!(parse_instance(asym).unwrap_err().to_string().contains("asymmetric cost"));
        let tri = r#"{"nodes":["r","u","v"],"roots":["r"],"costs":[[0,1,5],[1,0,1],[5,1,0]]}"#;
        assert!(parse_instance(tri).unwrap_err().to_string().contains("triangle"));
        let close = r#"{"nodes":["r","u"],"roots":["r"],"costs":[[0,0],[0,0]]}"#;
        assert!(parse_instance(close).is_err());
        let frac = r#"{"nodes":["r","u"],"roots":["r"],"costs":[[0,1.5],[1.5,0]]}"#;
        assert!(parse_instance(frac).is_err());
        assert!(parse_instance("{").is_err());
    }

    #[test]
    fn second_fixture_has_two_vehicles() {
        let text = r#"{"nodes":["r1","a","b","r2"],"roots":["r1","r2"],
            "costs":[[0,1,3,4],[1,0,2,3],[3,2,0,1],[4,3,1,0]]}"#;
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.k(), 2);
        assert_eq!(inst.clients(), vec![1, 2]);
    }

    #[test]
    fn evaluates_plain_and_service_objectives() {
        let a = fix_a();
        let plan = RoutePlan { routes: vec![vec![0, 1, 2]] };
        assert_eq!(evaluate_plan(&a, &plan).unwrap().total, rational::int(4));
        let b = fix_b();
        let plan_b = RoutePlan { routes: vec![vec![0, 1], vec![3, 2]] };
        assert_eq!(evaluate_plan(&b, &plan_b).unwrap().total, rational::int(2));
        let s = fix_a().with_service(vec![0, 2, 1]).unwrap();
        assert_eq!(evaluate_plan(&s, &plan).unwrap().total, rational::int(9));
    }

    #[test]
    fn evaluation_errors() {
        let a = fix_a();
        let missing = RoutePlan { routes: vec![vec![0, 1]] };
        assert!(evaluate_plan(&a, &missing).unwrap_err().to_string().contains("uncovered node"));
        let b = fix_b().with_allowed(vec![None, Some(vec![3]), None, None]).unwrap();
        let plan = RoutePlan { routes: vec![vec![0, 1], vec![3, 2]] };
        assert!(evaluate_plan(&b, &plan).unwrap_err().to_string().contains("disallowed"));
    }

    #[test]
    fn trivial_routes_do_not_change_the_objective() {
        let a = MetricInstance::on_line(&[0, 1, 3], &[0, 0]).unwrap();
        let one = RoutePlan { routes: vec![vec![0, 1, 2], vec![0]] };
        assert_eq!(evaluate_plan(&a, &one).unwrap().total, rational::int(4));
    }

    #[test]
    fn horizons_of_fixtures() {
        let h = time_horizon(&fix_a());
        assert_eq!(h.t, 3);
        assert_eq!(h.plan.routes, vec![vec![0, 1, 2]]);
        let hb = time_horizon(&fix_b());
        assert_eq!(hb.t, 1);
        assert_eq!(hb.plan.routes, vec![vec![0, 1], vec![3, 2]]);
        let single = MetricInstance::on_line(&[0], &[0]).unwrap();
        let hs = time_horizon(&single);
        assert_eq!(hs.t, 0);
        assert_eq!(hs.plan.routes, vec![vec![0]]);
    }

    #[test]
    fn normalization_keeps_the_earliest_visit() {
        let b = fix_b();
        let plan = normalize_routes(&b, &[vec![0, 1, 2, 3], vec![3, 2, 1]]);
        assert_eq!(plan.routes, vec![vec![0, 1], vec![3, 2]]);
        assert_eq!(evaluate_plan(&b, &plan).unwrap().total, rational::int(2));
    }
}
