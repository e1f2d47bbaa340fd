//! Turning trees into cycles, splitting cycles among vehicles, and concatenating tours.

use rand::Rng;

use crate::error::{Error, Result};
use crate::instance::{MetricInstance, RoutePlan};
use crate::pc_tree::RootedTree;
use crate::rational::{self, Rational};

/// Closed walk listed from its root; the return edge is implicit.
pub type Cycle = Vec<usize>;

/// Depth-first preorder with children visited in index order.
pub fn preorder(tree: &RootedTree) -> Vec<usize> {
    let children = tree.children();
    let mut out = Vec::with_capacity(tree.node_count());
    let mut stack = vec![tree.root];
    while let Some(u) = stack.pop() {
        out.push(u);
        stack.extend(children[u].iter().rev());
    }
    out
}

/// Doubles the tree and shortcuts repeated nodes and nodes outside `keep`; the root stays.
pub fn double_and_shortcut(tree: &RootedTree, keep: Option<&[bool]>) -> Cycle {
    preorder(tree).into_iter().filter(|&v| v == tree.root || keep.is_none_or(|k| k[v])).collect()
}

/// Length of the open walk `seq`.
pub fn path_cost(cost: &[Vec<i64>], seq: &[usize]) -> i64 {
    seq.windows(2).map(|w| cost[w[0]][w[1]]).sum()
}

/// Length of the closed walk `cycle`.
pub fn cycle_cost(cost: &[Vec<i64>], cycle: &[usize]) -> i64 {
    match (cycle.first(), cycle.last()) {
        (Some(&a), Some(&b)) => path_cost(cost, cycle) + cost[b][a],
        _ => 0,
    }
}

pub fn tree_cost(cost: &[Vec<i64>], tree: &RootedTree) -> i64 {
    tree.edges.iter().map(|&(a, b)| cost[a][b]).sum()
}

/// Cuts the doubled tree (restricted to `keep`) into `k` cycles through the root.
///
/// Each cycle's portion between its first and last non-root node has length at most
/// `2c(tree)/k`. Unused slots are trivial cycles `[root]`.
pub fn split_tree_into_k_tours(cost: &[Vec<i64>], tree: &RootedTree, k: usize, keep: &[bool]) -> Result<Vec<Cycle>> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let r = tree.root;
    let seq: Vec<usize> = double_and_shortcut(tree, Some(keep)).into_iter().skip(1).collect();
    let mut out: Vec<Cycle> = Vec::with_capacity(k);
    if !seq.is_empty() {
        let total = path_cost(cost, &seq);
        let mut start = 0i64;
        let mut offset = 0i64;
        let mut cur = vec![r, seq[0]];
        for p in 1..seq.len() {
            offset += cost[seq[p - 1]][seq[p]];
            if (k as i64) * (offset - start) > total {
                out.push(std::mem::replace(&mut cur, vec![r]));
                start = offset;
            }
            cur.push(seq[p]);
        }
        out.push(cur);
    }
    if out.len() > k {
        return Err(Error::Internal(format!("split produced {} segments for k = {k}", out.len())));
    }
    out.resize(k, vec![r]);
    Ok(out)
}

/// Splits the doubled tree into at most `k` cycles covering `s`, so that each cycle `Z` has
/// `c(Z) + 2d(V(Z)) ≤ 2(c(Q) + d(V(Q)))/k + 2L` with `L = max_{u∈S} c(r,u) + d(u)`.
pub fn break_cycle_with_service(
    cost: &[Vec<i64>],
    service: &[i64],
    tree: &RootedTree,
    s: &[usize],
    k: usize,
) -> Result<Vec<Cycle>> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let r = tree.root;
    if let Some(&v) = s.iter().find(|&&v| !tree.contains(v)) {
        return Err(Error::InvalidArgument(format!("node {v} is not in the tree")));
    }
    let mut in_s = vec![false; tree.n];
    for &v in s {
        in_s[v] = true;
    }
    let p = double_and_shortcut(tree, Some(&in_s));
    if p.len() == 1 {
        return Ok(vec![vec![r]; k]);
    }
    let d = |v: usize| if v == r { 0 } else { service[v] };
    let mixed: i64 = tree_cost(cost, tree) + tree.nodes().into_iter().map(d).sum::<i64>();
    // Compare k·g against 2·(c(Q) + d(V(Q))) to stay in integers.
    let budget = 2 * mixed;
    let kk = k as i64;
    let mut edge_prefix = vec![0i64; p.len()];
    let mut d_prefix = vec![0i64; p.len() + 1];
    for i in 0..p.len() {
        if i > 0 {
            edge_prefix[i] = edge_prefix[i - 1] + cost[p[i - 1]][p[i]];
        }
        d_prefix[i + 1] = d_prefix[i] + d(p[i]);
    }
    let g = |a: usize, b: usize| edge_prefix[b] - edge_prefix[a] + 2 * (d_prefix[b + 1] - d_prefix[a]) - d(p[a]) - d(p[b]);
    let last = p.len() - 1;
    let mut segments: Vec<(usize, usize)> = Vec::new();
    let mut a = 0usize;
    loop {
        let mut cut = None;
        for b in a + 1..=last {
            let gv = g(a, b);
            if kk * gv > budget {
                cut = Some((b - 1, Some(b)));
                break;
            }
            if kk * (gv + d(p[b])) > budget {
                cut = Some((b, if b == last { None } else { Some(b + 1) }));
                break;
            }
        }
        match cut {
            None => {
                segments.push((a, last));
                break;
            }
            Some((end, next)) => {
                segments.push((a, end));
                match next {
                    Some(nx) => a = nx,
                    None => break,
                }
            }
        }
    }
    if segments.len() > k {
        return Err(Error::Internal(format!("service split produced {} cycles for k = {k}", segments.len())));
    }
    let mut out: Vec<Cycle> = segments
        .into_iter()
        .map(|(a, b)| std::iter::once(r).chain(p[a..=b].iter().copied().filter(|&v| v != r)).collect())
        .collect();
    out.resize(k, vec![r]);
    Ok(out)
}

/// Concatenates tours per vehicle, skipping nodes that are already covered.
///
/// Each vehicle keeps a clock equal to the total closed length (with service times) of its
/// tours so far; a node's latency in the returned plan never exceeds its clock-based latency
/// because consecutive tours are joined directly instead of through the depot.
#[derive(Debug, Clone)]
pub struct RouteBuilder<'a> {
    inst: &'a MetricInstance,
    routes: Vec<Vec<usize>>,
    covered: Vec<bool>,
    clock: Vec<i64>,
    bound: Rational,
}

impl<'a> RouteBuilder<'a> {
    pub fn new(inst: &'a MetricInstance) -> Self {
        let mut covered = vec![false; inst.n()];
        for &r in inst.roots() {
            covered[r] = true;
        }
        Self {
            inst,
            routes: (0..inst.k()).map(|i| vec![inst.root(i)]).collect(),
            covered,
            clock: vec![0; inst.k()],
            bound: Rational::from_integer(0.into()),
        }
    }

    pub fn covered_count(&self) -> usize {
        self.covered.iter().filter(|&&c| c).count()
    }

    pub fn is_covered(&self, v: usize) -> bool {
        self.covered[v]
    }

    pub fn all_covered(&self) -> bool {
        self.covered.iter().all(|&c| c)
    }

    /// Weighted total of the clock-based latencies; an upper bound on the plan's cost.
    pub fn latency_bound(&self) -> &Rational {
        &self.bound
    }

    /// Weighted position sum of `seq` walked from `root`, and the closed length.
    fn walk(&self, root: usize, seq: &[usize]) -> (i64, i64) {
        let inst = self.inst;
        let (mut at, mut pos, mut sum) = (root, 0i64, 0i64);
        for &v in seq {
            pos += inst.c(at, v) + inst.service(v);
            sum += inst.weight(v) * pos;
            at = v;
        }
        (sum, pos + inst.c(at, root))
    }

    /// Appends vehicle `i`'s tour. With `best_direction` the orientation with the smaller
    /// weighted latency of newly covered nodes is taken; otherwise a fair coin decides.
    pub fn add_tour<R: Rng + ?Sized>(&mut self, i: usize, cycle: &[usize], best_direction: bool, rng: &mut R) {
        let inst = self.inst;
        let root = inst.root(i);
        let mut seq: Vec<usize> = Vec::new();
        for &v in cycle {
            if !self.covered[v] && !inst.is_root(v) && inst.vehicle_allowed(i, v) && !seq.contains(&v) {
                seq.push(v);
            }
        }
        if seq.is_empty() {
            return;
        }
        let (fwd, len) = self.walk(root, &seq);
        let rev_seq: Vec<usize> = seq.iter().rev().copied().collect();
        let (bwd, _) = self.walk(root, &rev_seq);
        let reverse = if best_direction { bwd < fwd } else { rng.gen_bool(0.5) };
        let (seq, pos_sum) = if reverse { (rev_seq, bwd) } else { (seq, fwd) };
        let weight: i64 = seq.iter().map(|&v| inst.weight(v)).sum();
        self.bound += rational::int(pos_sum + weight * self.clock[i]);
        self.clock[i] += len;
        for &v in &seq {
            self.covered[v] = true;
        }
        self.routes[i].extend(seq);
    }

    /// Appends every uncovered node to a vehicle at its nearest allowed depot, nearest first.
    /// Returns how many nodes were added.
    pub fn cover_remaining(&mut self) -> usize {
        let inst = self.inst;
        let mut todo: Vec<(i64, usize, usize)> = (0..inst.n())
            .filter(|&v| !self.covered[v])
            .map(|v| {
                let r = inst
                    .allowed_roots(v)
                    .iter()
                    .copied()
                    .min_by_key(|&r| (inst.c(r, v), r))
                    .expect("allowed set is nonempty");
                (inst.c(r, v), v, r)
            })
            .collect();
        todo.sort_unstable();
        for &(_, v, r) in &todo {
            let i = inst.roots().iter().position(|&x| x == r).expect("allowed root is a root");
            let at = *self.routes[i].last().expect("route starts at its root");
            let lat = self.clock[i] + inst.c(at, v) + inst.service(v);
            self.bound += rational::int(inst.weight(v) * lat);
            self.clock[i] = lat;
            self.covered[v] = true;
            self.routes[i].push(v);
        }
        todo.len()
    }

    pub fn finish(self) -> RoutePlan {
        RoutePlan { routes: self.routes }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::evaluate_plan;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn line(xs: &[i64]) -> Vec<Vec<i64>> {
        xs.iter().map(|a| xs.iter().map(|b| (a - b).abs()).collect()).collect()
    }

    fn path_tree() -> RootedTree {
        RootedTree { root: 0, n: 3, edges: vec![(0, 1), (1, 2)] }
    }

    #[test]
    fn single_split_is_euler_cycle() {
        let cost = line(&[0, 1, 3]);
        let cycles = split_tree_into_k_tours(&cost, &path_tree(), 1, &[true; 3]).unwrap();
        assert_eq!(cycles, vec![vec![0, 1, 2]]);
        assert!(cycle_cost(&cost, &cycles[0]) <= 2 * tree_cost(&cost, &path_tree()));
    }

    #[test]
    fn two_way_split_of_a_path() {
        let cost = line(&[0, 1, 3]);
        let cycles = split_tree_into_k_tours(&cost, &path_tree(), 2, &[true; 3]).unwrap();
        assert_eq!(cycles.len(), 2);
        for c in &cycles {
            assert_eq!(c[0], 0);
            assert!(path_cost(&cost, &c[1..]) <= 3);
        }
        let mut seen: Vec<usize> = cycles.iter().flat_map(|c| c[1..].to_vec()).collect();
        seen.sort_unstable();
        assert_eq!(seen, vec![1, 2]);
    }

    #[test]
    fn root_only_keep_gives_trivial_cycles() {
        let cost = line(&[0, 1, 3]);
        let cycles = split_tree_into_k_tours(&cost, &path_tree(), 3, &[true, false, false]).unwrap();
        assert_eq!(cycles, vec![vec![0]; 3]);
    }

    #[test]
    fn service_split_examples() {
        let cost = line(&[0, 1]);
        let star = RootedTree { root: 0, n: 2, edges: vec![(0, 1)] };
        assert_eq!(break_cycle_with_service(&cost, &[0, 0], &star, &[0], 2).unwrap(), vec![vec![0]; 2]);
        let z = break_cycle_with_service(&cost, &[0, 0], &star, &[1], 1).unwrap();
        assert_eq!(z, vec![vec![0, 1]]);
        assert_eq!(cycle_cost(&cost, &z[0]), 2);
        assert!(break_cycle_with_service(&cost, &[0, 0], &RootedTree::trivial(2, 0), &[1], 1).is_err());
    }

    #[test]
    fn builder_prefers_cheaper_direction() {
        let inst = MetricInstance::on_line(&[0, 1, 3], &[0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut b = RouteBuilder::new(&inst);
        b.add_tour(0, &[0, 2, 1], true, &mut rng);
        assert!(b.all_covered());
        assert_eq!(*b.latency_bound(), rational::int(4));
        let plan = b.finish();
        assert_eq!(plan.routes, vec![vec![0, 1, 2]]);
        assert_eq!(evaluate_plan(&inst, &plan).unwrap().total, rational::int(4));
    }

    #[test]
    fn cleanup_covers_everything() {
        let inst = MetricInstance::on_line(&[0, 1, 3, 4], &[0, 3]).unwrap();
        let mut b = RouteBuilder::new(&inst);
        assert_eq!(b.cover_remaining(), 2);
        let plan = b.finish();
        assert_eq!(evaluate_plan(&inst, &plan).unwrap().total, rational::int(2));
    }
}
