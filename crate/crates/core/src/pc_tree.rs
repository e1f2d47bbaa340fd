//! Prize-collecting trees from the bidirected relaxation, and bipoint trees for coverage
//! and budget targets found by a parametric search over uniform penalties.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arb_packing::{pack_arborescences, Arborescence, WeightedDigraph};
use crate::error::{Error, Result};
use crate::instance::MetricInstance;
use crate::lp::{arc_costs, build_and_solve_pclp, ArcMetric};
use crate::rational::{self, Rational};

/// Tree rooted at `root` with edges directed away from it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootedTree {
    pub root: usize,
    pub n: usize,
    /// `(parent, child)` pairs.
    pub edges: Vec<(usize, usize)>,
}

impl RootedTree {
    pub fn trivial(n: usize, root: usize) -> Self {
        Self { root, n, edges: Vec::new() }
    }

    pub fn from_arborescence(n: usize, a: &Arborescence) -> Self {
        Self { root: a.root(), n, edges: a.arcs() }
    }

    /// Builds from undirected edges, orienting them away from `root`.
    pub fn from_undirected(n: usize, root: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; n];
        seen[root] = true;
        let mut stack = vec![root];
        let mut out = Vec::new();
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    out.push((u, v));
                    stack.push(v);
                }
            }
        }
        if out.len() != edges.len() {
            return Err(Error::InvalidArgument("edges do not form a tree containing the root".into()));
        }
        out.sort_unstable_by_key(|e| e.1);
        Ok(Self { root, n, edges: out })
    }

    pub fn contains(&self, v: usize) -> bool {
        v == self.root || self.edges.iter().any(|e| e.1 == v)
    }

    pub fn nodes(&self) -> Vec<usize> {
        let mut v: Vec<usize> = std::iter::once(self.root).chain(self.edges.iter().map(|e| e.1)).collect();
        v.sort_unstable();
        v
    }

    pub fn node_count(&self) -> usize {
        self.edges.len() + 1
    }

    /// `Σ cost[parent][child]`; with directed service costs this is the mixed length.
    pub fn cost(&self, cost: &[Vec<Rational>]) -> Rational {
        self.edges.iter().map(|&(a, b)| cost[a][b].clone()).sum()
    }

    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            ch[a].push(b);
        }
        for c in &mut ch {
            c.sort_unstable();
        }
        ch
    }
}

/// `a·T1 + b·T2` with `a + b = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipointTree {
    pub a: Rational,
    pub t1: RootedTree,
    pub b: Rational,
    pub t2: RootedTree,
}

/// Output of the coverage and budget searches.
#[derive(Debug, Clone, PartialEq)]
pub enum CoverTree {
    Tree(RootedTree),
    Bipoint(BipointTree),
}

impl CoverTree {
    pub fn expected_cost(&self, cost: &[Vec<Rational>]) -> Rational {
        match self {
            CoverTree::Tree(t) => t.cost(cost),
            CoverTree::Bipoint(q) => &q.a * q.t1.cost(cost) + &q.b * q.t2.cost(cost),
        }
    }

    pub fn expected_coverage(&self) -> Rational {
        self.expected_weight(&|_| Rational::one())
    }

    pub fn expected_weight(&self, w: &dyn Fn(usize) -> Rational) -> Rational {
        let tw = |t: &RootedTree| t.nodes().into_iter().map(w).sum::<Rational>();
        match self {
            CoverTree::Tree(t) => tw(t),
            CoverTree::Bipoint(q) => &q.a * tw(&q.t1) + &q.b * tw(&q.t2),
        }
    }

    /// Constituent trees (one or two).
    pub fn trees(&self) -> Vec<&RootedTree> {
        match self {
            CoverTree::Tree(t) => vec![t],
            CoverTree::Bipoint(q) => vec![&q.t1, &q.t2],
        }
    }
}

#[derive(Debug, Clone)]
pub struct PcTreeResult {
    pub tree: RootedTree,
    /// `c(T) + π(V ∖ V(T))`.
    pub objective: Rational,
    pub lp_value: Rational,
    /// Scaling factor that made the arc values integral.
    pub k: u64,
}

fn pc_objective(tree: &RootedTree, cost: &[Vec<Rational>], penalties: &[Rational]) -> Rational {
    let inside = tree.nodes();
    let missed: Rational = (0..tree.n).filter(|v| inside.binary_search(v).is_err()).map(|v| penalties[v].clone()).sum();
    tree.cost(cost) + missed
}

/// Tree with `c(T) + π(V∖V(T))` at most the relaxation optimum, over directed costs `cost`.
pub fn pc_tree_with_costs(cost: &[Vec<Rational>], root: usize, penalties: &[Rational]) -> Result<PcTreeResult> {
    let n = cost.len();
    let sol = build_and_solve_pclp(cost, root, penalties)?;
    let lcm: BigInt = rational::lcm_denominators(sol.arcs.iter().map(|a| &a.2));
    let k = lcm.to_u64().ok_or_else(|| Error::Guard("arc denominators overflow 64 bits".into()))?;
    let kr = Rational::from_integer(lcm);
    let mut d = WeightedDigraph::new(n);
    for (a, b, x) in &sol.arcs {
        let w = (x * &kr).to_integer().to_u64().ok_or_else(|| Error::Guard("scaled arc weight overflows".into()))?;
        d.add(*a, *b, w);
    }
    let family = pack_arborescences(&d, root, k)?;
    let mut best: Option<(Rational, usize, RootedTree)> = None;
    for (_, f) in &family.members {
        let t = RootedTree::from_arborescence(n, f);
        let obj = pc_objective(&t, cost, penalties);
        let key = (obj, t.node_count());
        let better = match &best {
            None => true,
            Some((bo, bc, bt)) => (&key.0, key.1, &t.edges) < (bo, *bc, &bt.edges),
        };
        if better {
            best = Some((key.0, key.1, t));
        }
    }
    let trivial = RootedTree::trivial(n, root);
    let (objective, _, tree) = best.unwrap_or_else(|| (pc_objective(&trivial, cost, penalties), 1, trivial));
    if objective > sol.lp.objective {
        return Err(Error::Internal(format!(
            "packed tree objective {} exceeds relaxation value {}",
            objective, sol.lp.objective
        )));
    }
    Ok(PcTreeResult { tree, objective, lp_value: sol.lp.objective, k })
}

fn instance_costs(inst: &MetricInstance) -> Vec<Vec<Rational>> {
    arc_costs(inst, ArcMetric::Plain)
}

pub fn pc_tree(inst: &MetricInstance, root: usize, penalties: &[Rational]) -> Result<PcTreeResult> {
    pc_tree_with_costs(&instance_costs(inst), root, penalties)
}

pub fn uniform_pc_tree_with_costs(cost: &[Vec<Rational>], root: usize, lambda: &Rational) -> Result<PcTreeResult> {
    if lambda.is_negative() {
        return Err(Error::InvalidArgument("λ must be nonnegative".into()));
    }
    let pen: Vec<Rational> = (0..cost.len()).map(|v| if v == root { Rational::zero() } else { lambda.clone() }).collect();
    pc_tree_with_costs(cost, root, &pen)
}

pub fn uniform_pc_tree(inst: &MetricInstance, root: usize, lambda: &Rational) -> Result<PcTreeResult> {
    uniform_pc_tree_with_costs(&instance_costs(inst), root, lambda)
}

/// Penalty-scaled trees probed during a search, in probe order.
#[derive(Debug, Clone, Default)]
pub struct SearchLog {
    pub probes: Vec<(Rational, RootedTree)>,
    /// The bipoint was confirmed against the relaxation at the endpoint lines' crossing.
    pub certified: bool,
    /// The budget exceeded the cost of the full tree.
    pub saturated: bool,
}

const CERTIFY_ROUNDS: usize = 200;

/// Parametric search shared by the coverage and budget variants.
///
/// A tree `T` defines the line `c(T) + λ·(W − w(V(T)))`. The search keeps trees on both sides
/// of the target (by `key`) and stops when one hits it exactly or when the relaxation at the
/// crossing of the two endpoint lines is at least their common value.
struct Search<'a> {
    cost: &'a [Vec<Rational>],
    root: usize,
    weights: Vec<Rational>,
    memo: HashMap<Rational, (RootedTree, Rational)>,
    log: SearchLog,
}

impl Search<'_> {
    fn probe(&mut self, lambda: &Rational) -> Result<(RootedTree, Rational)> {
        let hit = match self.memo.get(lambda) {
            Some(hit) => hit.clone(),
            None => {
                let pen: Vec<Rational> = self.weights.iter().map(|w| w * lambda).collect();
                let r = pc_tree_with_costs(self.cost, self.root, &pen)?;
                self.memo.insert(lambda.clone(), (r.tree.clone(), r.lp_value.clone()));
                (r.tree, r.lp_value)
            }
        };
        self.log.probes.push((lambda.clone(), hit.0.clone()));
        Ok(hit)
    }

    fn weight(&self, t: &RootedTree) -> Rational {
        t.nodes().iter().map(|&v| self.weights[v].clone()).sum()
    }

    fn line(&self, t: &RootedTree, lambda: &Rational) -> Rational {
        let total: Rational = self.weights.iter().sum();
        t.cost(self.cost) + lambda * (total - self.weight(t))
    }

    fn lp_value(&mut self, lambda: &Rational) -> Result<Rational> {
        Ok(self.probe(lambda)?.1)
    }

    /// `key(T)` compared with `target`: below, hit or above.
    fn run(
        &mut self,
        key: &dyn Fn(&Self, &RootedTree) -> Rational,
        target: &Rational,
        lo_tree: RootedTree,
        lo: Rational,
        hi_tree: RootedTree,
        hi: Rational,
        width: &Rational,
    ) -> Result<CoverTree> {
        let (mut t1, mut l1, mut t2, mut l2) = (lo_tree, lo, hi_tree, hi);
        while &(&l2 - &l1) > width {
            let mid = (&l1 + &l2) / rational::int(2);
            let (t, _) = self.probe(&mid)?;
            let kv = key(self, &t);
            if &kv == target {
                return Ok(CoverTree::Tree(t));
            }
            if &kv < target {
                (t1, l1) = (t, mid);
            } else {
                (t2, l2) = (t, mid);
            }
        }
        for _ in 0..CERTIFY_ROUNDS {
            let (c1, c2) = (t1.cost(self.cost), t2.cost(self.cost));
            let (w1, w2) = (self.weight(&t1), self.weight(&t2));
            if w1 != w2 {
                let cross = (&c2 - &c1) / (&w2 - &w1);
                if !cross.is_negative() {
                    let value = self.line(&t1, &cross);
                    if value <= self.lp_value(&cross)? {
                        self.log.certified = true;
                        break;
                    }
                    let (t, _) = self.probe(&cross)?;
                    let kv = key(self, &t);
                    if &kv == target {
                        return Ok(CoverTree::Tree(t));
                    }
                    if t == t1 || t == t2 {
                        break;
                    }
                    if &kv < target {
                        t1 = t;
                    } else {
                        t2 = t;
                    }
                    continue;
                }
            }
            break;
        }
        let (k1, k2) = (key(self, &t1), key(self, &t2));
        let b = (target - &k1) / (&k2 - &k1);
        let a = Rational::one() - &b;
        Ok(CoverTree::Bipoint(BipointTree { a, t1, b, t2 }))
    }
}

fn denominators_lcm(cost: &[Vec<Rational>]) -> BigInt {
    rational::lcm_denominators(cost.iter().flatten())
}

fn coverage_search<'a>(cost: &'a [Vec<Rational>], root: usize) -> Search<'a> {
    let weights = (0..cost.len()).map(|v| if v == root { Rational::zero() } else { Rational::one() }).collect();
    Search { cost, root, weights, memo: HashMap::new(), log: SearchLog::default() }
}

fn coverage_with(s: &mut Search, b: usize) -> Result<(CoverTree, SearchLog)> {
    let (cost, root) = (s.cost, s.root);
    let n = cost.len();
    if b < 1 || b > n {
        return Err(Error::InvalidArgument(format!("coverage target {b} outside 1..={n}")));
    }
    s.log = SearchLog::default();
    if b == 1 {
        return Ok((CoverTree::Tree(RootedTree::trivial(n, root)), SearchLog::default()));
    }
    let max_c = cost.iter().flatten().max().cloned().unwrap_or_else(Rational::zero);
    let hi = rational::int(n as i64) * max_c + Rational::one();
    let lo = Rational::zero();
    let (t_lo, _) = s.probe(&lo)?;
    let (t_hi, _) = s.probe(&hi)?;
    let target = rational::int(b as i64);
    let key = |_: &Search, t: &RootedTree| rational::int(t.node_count() as i64);
    for t in [&t_lo, &t_hi] {
        if key(s, t) == target {
            return Ok((CoverTree::Tree(t.clone()), std::mem::take(&mut s.log)));
        }
    }
    if t_hi.node_count() < b {
        return Err(Error::Internal("full-penalty tree does not span the target".into()));
    }
    let m = denominators_lcm(cost);
    let width = Rational::new(BigInt::one(), BigInt::from(2 * n * n) * m);
    let out = s.run(&key, &target, t_lo, lo, t_hi, hi, &width)?;
    Ok((out, std::mem::take(&mut s.log)))
}

/// Tree or bipoint tree with expected node count exactly `b` (root included) and expected cost
/// at most that of any rooted path collection spanning `b` nodes.
pub fn coverage_tree_with_costs(cost: &[Vec<Rational>], root: usize, b: usize) -> Result<(CoverTree, SearchLog)> {
    coverage_with(&mut coverage_search(cost, root), b)
}

/// Coverage trees for every target `1..=n`, sharing probes between targets.
pub fn coverage_trees_with_costs(cost: &[Vec<Rational>], root: usize) -> Result<Vec<(CoverTree, SearchLog)>> {
    let mut s = coverage_search(cost, root);
    (1..=cost.len()).map(|b| coverage_with(&mut s, b)).collect()
}

pub fn coverage_tree(inst: &MetricInstance, root: usize, b: usize) -> Result<(CoverTree, SearchLog)> {
    coverage_tree_with_costs(&instance_costs(inst), root, b)
}

/// Tree or bipoint tree with expected cost exactly `budget` and expected weight at least that of
/// any rooted path collection of cost at most `budget`. Weights must vanish at the root.
pub fn budget_tree_with_costs(
    cost: &[Vec<Rational>],
    root: usize,
    weights: &[Rational],
    budget: &Rational,
) -> Result<(CoverTree, SearchLog)> {
    let n = cost.len();
    if weights.len() != n || weights.iter().any(Signed::is_negative) || !weights[root].is_zero() {
        return Err(Error::InvalidArgument("weights must be nonnegative with zero weight at the root".into()));
    }
    if budget.is_negative() {
        return Err(Error::InvalidArgument("budget must be nonnegative".into()));
    }
    if budget.is_zero() {
        return Ok((CoverTree::Tree(RootedTree::trivial(n, root)), SearchLog::default()));
    }
    let mut s = Search { cost, root, weights: weights.to_vec(), memo: HashMap::new(), log: SearchLog::default() };
    let max_c = cost.iter().flatten().max().cloned().unwrap_or_else(Rational::zero);
    let min_w = weights.iter().filter(|w| w.is_positive()).min().cloned().unwrap_or_else(Rational::one);
    let hi = (rational::int(n as i64) * max_c + Rational::one()) / min_w;
    let lo = Rational::zero();
    let (t_lo, _) = s.probe(&lo)?;
    let (t_hi, _) = s.probe(&hi)?;
    let key = |s: &Search, t: &RootedTree| t.cost(s.cost);
    if &key(&s, &t_hi) <= budget {
        s.log.saturated = true;
        return Ok((CoverTree::Tree(t_hi), s.log));
    }
    if &key(&s, &t_lo) == budget {
        return Ok((CoverTree::Tree(t_lo), s.log));
    }
    let m = denominators_lcm(cost) * rational::lcm_denominators(weights.iter());
    let wsum: Rational = weights.iter().sum();
    let width = Rational::new(BigInt::one(), BigInt::from(2 * n * n) * m) / (wsum + Rational::one());
    let out = s.run(&key, budget, t_lo, lo, t_hi, hi, &width)?;
    Ok((out, s.log))
}

pub fn budget_tree(inst: &MetricInstance, root: usize, weights: &[Rational], budget: &Rational) -> Result<(CoverTree, SearchLog)> {
    budget_tree_with_costs(&instance_costs(inst), root, weights, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn fix_a() -> MetricInstance {
        MetricInstance::on_line(&[0, 1, 3], &[0]).unwrap()
    }

    #[test]
    fn pc_tree_examples() {
        let r = pc_tree(&fix_a(), 0, &[int(0), int(10), int(10)]).unwrap();
        assert_eq!(r.tree.edges, vec![(0, 1), (1, 2)]);
        assert_eq!(r.objective, int(3));
        let r = pc_tree(&fix_a(), 0, &[int(0), int(0), int(0)]).unwrap();
        assert_eq!(r.tree, RootedTree::trivial(3, 0));
        let r = pc_tree(&fix_a(), 0, &[int(0), frac(2, 5), frac(2, 5)]).unwrap();
        assert_eq!(r.tree, RootedTree::trivial(3, 0));
        assert_eq!(r.objective, frac(4, 5));
    }

    #[test]
    fn uniform_examples() {
        assert_eq!(uniform_pc_tree(&fix_a(), 0, &int(0)).unwrap().tree.node_count(), 1);
        assert!(uniform_pc_tree(&fix_a(), 0, &int(1)).unwrap().objective <= int(2));
        assert_eq!(uniform_pc_tree(&fix_a(), 0, &int(100)).unwrap().tree.node_count(), 3);
    }

    #[test]
    fn coverage_examples() {
        let cost = instance_costs(&fix_a());
        let (q, _) = coverage_tree(&fix_a(), 0, 1).unwrap();
        assert_eq!(q.expected_cost(&cost), int(0));
        let (q, _) = coverage_tree(&fix_a(), 0, 2).unwrap();
        assert_eq!(q.expected_coverage(), int(2));
        assert_eq!(q.expected_cost(&cost), int(1));
        let (q, _) = coverage_tree(&fix_a(), 0, 3).unwrap();
        assert_eq!(q.expected_cost(&cost), int(3));
        assert!(coverage_tree(&fix_a(), 0, 4).is_err());
    }

    #[test]
    fn budget_examples() {
        let cost = instance_costs(&fix_a());
        let w = vec![int(0), int(1), int(1)];
        let wf = |v: usize| w[v].clone();
        let (q, _) = budget_tree(&fix_a(), 0, &w, &int(0)).unwrap();
        assert_eq!(q.expected_weight(&wf), int(0));
        let (q, _) = budget_tree(&fix_a(), 0, &w, &int(1)).unwrap();
        assert_eq!(q.expected_cost(&cost), int(1));
        assert_eq!(q.expected_weight(&wf), int(1));
        // Budget 2 lies between the edge r–a (cost 1) and the path r–a–b (cost 3).
        let (q, _) = budget_tree(&fix_a(), 0, &w, &int(2)).unwrap();
        assert_eq!(q.expected_cost(&cost), int(2));
        assert!(q.expected_weight(&wf) >= int(1));
        let (q, log) = budget_tree(&fix_a(), 0, &w, &int(50)).unwrap();
        assert!(log.saturated);
        assert_eq!(q.expected_weight(&wf), int(2));
    }

    #[test]
    fn undirected_construction() {
        let t = RootedTree::from_undirected(4, 2, &[(0, 1), (1, 2), (3, 2)]).unwrap();
        assert_eq!(t.edges, vec![(1, 0), (2, 1), (2, 3)]);
        assert!(RootedTree::from_undirected(4, 0, &[(0, 1), (2, 3)]).is_err());
    }
}
