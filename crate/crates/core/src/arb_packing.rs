//! Weighted arborescence packing by splitting off arcs and undoing the splits.
//!
//! Given a digraph with integer arc weights in which every non-root node has in-degree at
//! least its out-degree, [`pack_arborescences`] returns out-arborescences `F_i` rooted at
//! `r` with integer weights `γ_i` such that `Σ γ_i = K`, no arc is used beyond its weight,
//! and every node `u` lies in arborescences of total weight at least `min(K, λ(r, u))`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::flow::FlowNetwork;

/// Digraph on nodes `0..n` with integer arc weights; self-loops are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedDigraph {
    w: Vec<Vec<u64>>,
}

impl WeightedDigraph {
    pub fn new(n: usize) -> Self {
        Self { w: vec![vec![0; n]; n] }
    }

    pub fn from_arcs(n: usize, arcs: &[(usize, usize, u64)]) -> Self {
        let mut d = Self::new(n);
        for &(u, v, w) in arcs {
            d.add(u, v, w);
        }
        d
    }

    pub fn n(&self) -> usize {
        self.w.len()
    }

    /// Adds weight to arc `(u, v)`; parallel arcs merge and loops are dropped.
    pub fn add(&mut self, u: usize, v: usize, w: u64) {
        if u != v {
            self.w[u][v] += w;
        }
    }

    pub fn weight(&self, u: usize, v: usize) -> u64 {
        self.w[u][v]
    }

    pub fn arcs(&self) -> Vec<(usize, usize, u64)> {
        let n = self.n();
        let mut out = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if self.w[u][v] > 0 {
                    out.push((u, v, self.w[u][v]));
                }
            }
        }
        out
    }

    pub fn in_degree(&self, u: usize) -> u64 {
        (0..self.n()).map(|t| self.w[t][u]).sum()
    }

    pub fn out_degree(&self, u: usize) -> u64 {
        self.w[u].iter().sum()
    }

    fn network(&self) -> FlowNetwork<u64> {
        let n = self.n();
        let mut g = FlowNetwork::new(n);
        for u in 0..n {
            for v in 0..n {
                if self.w[u][v] > 0 {
                    g.add_edge(u, v, self.w[u][v]);
                }
            }
        }
        g
    }
}

/// Max-flow value from `x` to `y` with arc weights as capacities.
pub fn connectivity(d: &WeightedDigraph, x: usize, y: usize) -> Result<u64> {
    if x >= d.n() || y >= d.n() {
        return Err(Error::InvalidArgument(format!("unknown node in connectivity({x},{y})")));
    }
    if x == y {
        return Err(Error::InvalidArgument("connectivity needs distinct nodes".into()));
    }
    Ok(d.network().max_flow(x, y))
}

fn check_hypothesis(d: &WeightedDigraph, r: usize) -> Result<()> {
    for u in (0..d.n()).filter(|&u| u != r) {
        let (indeg, outdeg) = (d.in_degree(u), d.out_degree(u));
        if indeg < outdeg {
            return Err(Error::Hypothesis { node: u, indeg, outdeg });
        }
    }
    Ok(())
}

/// Balances every node by adding arcs `(u, r)` of weight `in(u) - out(u)`.
pub fn eulerianize(d: &WeightedDigraph, r: usize) -> Result<WeightedDigraph> {
    check_hypothesis(d, r)?;
    let mut out = d.clone();
    for u in (0..d.n()).filter(|&u| u != r) {
        let gap = d.in_degree(u) - d.out_degree(u);
        out.add(u, r, gap);
    }
    Ok(out)
}

/// A connectivity requirement `λ(a, b) ≥ need` that splitting must preserve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Requirement {
    pub from: usize,
    pub to: usize,
    pub need: u64,
}

fn apply_split(d: &mut WeightedDigraph, t: usize, u: usize, v: usize, x: u64) {
    d.w[t][u] -= x;
    d.w[u][v] -= x;
    if t != v {
        d.w[t][v] += x;
    }
}

fn undo_split(d: &mut WeightedDigraph, t: usize, u: usize, v: usize, x: u64) {
    d.w[t][u] += x;
    d.w[u][v] += x;
    if t != v {
        d.w[t][v] -= x;
    }
}

fn requirements_hold(d: &WeightedDigraph, protect: &[Requirement]) -> bool {
    protect.iter().all(|req| d.network().max_flow(req.from, req.to) >= req.need)
}

/// Largest `x ≤ min(w_e, w_f)` such that moving `x` from `e = (t,u)` and `f = (u,v)` onto
/// `(t, v)` keeps every protected requirement; found by binary search.
pub fn max_splittable(
    d: &WeightedDigraph,
    e: (usize, usize),
    f: (usize, usize),
    protect: &[Requirement],
) -> Result<u64> {
    let (t, u) = e;
    let (u2, v) = f;
    if u != u2 {
        return Err(Error::InvalidArgument(format!("arcs ({t},{u}) and ({u2},{v}) do not share a middle node")));
    }
    let (we, wf) = (d.weight(t, u), d.weight(u, v));
    if we == 0 || wf == 0 {
        return Err(Error::InvalidArgument("split arcs must have positive weight".into()));
    }
    let protect: Vec<Requirement> =
        protect.iter().copied().filter(|r| r.need > 0 && r.from != u && r.to != u).collect();
    let feasible = |x: u64| {
        let mut g = d.clone();
        apply_split(&mut g, t, u, v, x);
        requirements_hold(&g, &protect)
    };
    let hi = we.min(wf);
    if feasible(hi) {
        return Ok(hi);
    }
    let (mut lo, mut hi) = (0u64, hi);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Out-arborescence rooted at `root`, stored as a parent table.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arborescence {
    root: usize,
    parent: Vec<Option<usize>>,
}

impl Arborescence {
    pub fn trivial(n: usize, root: usize) -> Self {
        Self { root, parent: vec![None; n] }
    }

    /// Builds from arcs; fails unless they form an out-arborescence rooted at `root`.
    pub fn from_arcs(n: usize, root: usize, arcs: &[(usize, usize)]) -> Result<Self> {
        let mut parent = vec![None; n];
        for &(a, b) in arcs {
            if b == root || parent[b].is_some() {
                return Err(Error::InvalidArgument(format!("node {b} has two parents or is the root")));
            }
            parent[b] = Some(a);
        }
        let arb = Self { root, parent };
        match arb.defect() {
            None => Ok(arb),
            Some(m) => Err(Error::InvalidArgument(m)),
        }
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn contains(&self, v: usize) -> bool {
        v == self.root || self.parent[v].is_some()
    }

    pub fn nodes(&self) -> Vec<usize> {
        (0..self.parent.len()).filter(|&v| self.contains(v)).collect()
    }

    pub fn node_count(&self) -> usize {
        1 + self.parent.iter().filter(|p| p.is_some()).count()
    }

    /// Arcs `(parent, child)` ordered by child.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        self.parent.iter().enumerate().filter_map(|(v, p)| p.map(|p| (p, v))).collect()
    }

    pub fn uses(&self, a: usize, b: usize) -> bool {
        self.parent[b] == Some(a)
    }

    fn is_ancestor(&self, a: usize, mut b: usize) -> bool {
        let mut steps = 0;
        loop {
            if a == b {
                return true;
            }
            match self.parent[b] {
                Some(p) => b = p,
                None => return false,
            }
            steps += 1;
            if steps > self.parent.len() {
                return false;
            }
        }
    }

    /// Describes why this is not an arborescence, if it is not.
    pub fn defect(&self) -> Option<String> {
        if self.parent[self.root].is_some() {
            return Some("root has a parent".into());
        }
        for v in 0..self.parent.len() {
            if self.parent[v].is_none() {
                continue;
            }
            let mut cur = v;
            let mut steps = 0;
            while let Some(p) = self.parent[cur] {
                if p == v || steps > self.parent.len() {
                    return Some(format!("cycle through node {v}"));
                }
                cur = p;
                steps += 1;
            }
            if cur != self.root {
                return Some(format!("node {v} is not reachable from the root"));
            }
        }
        None
    }
}

/// Weighted family `(γ_i, F_i)` with target total `K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArbFamily {
    pub k: u64,
    pub members: Vec<(u64, Arborescence)>,
}

impl ArbFamily {
    pub fn total_weight(&self) -> u64 {
        self.members.iter().map(|m| m.0).sum()
    }

    pub fn coverage(&self, v: usize) -> u64 {
        self.members.iter().filter(|m| m.1.contains(v)).map(|m| m.0).sum()
    }

    pub fn usage(&self, a: usize, b: usize) -> u64 {
        self.members.iter().filter(|m| m.1.uses(a, b)).map(|m| m.0).sum()
    }

    fn merged(self) -> Self {
        let mut acc: BTreeMap<Arborescence, u64> = BTreeMap::new();
        for (g, f) in self.members {
            if g > 0 {
                *acc.entry(f).or_insert(0) += g;
            }
        }
        Self { k: self.k, members: acc.into_iter().map(|(f, g)| (g, f)).collect() }
    }
}

/// Knobs for [`pack_arborescences_with`].
#[derive(Debug, Clone, Copy, Default)]
pub struct PackingOptions {
    /// Re-check every protected requirement after each split.
    pub check_splits: bool,
    /// Record a textual split/unsplit trace.
    pub trace: bool,
}

/// Diagnostics gathered while packing.
#[derive(Debug, Clone, Default)]
pub struct PackingStats {
    /// `(center, number of splits at that center, degree of the center before them)`.
    pub splits_per_center: Vec<(usize, usize, u64)>,
    pub trace: String,
}

#[derive(Debug, Clone, Copy)]
struct Split {
    t: usize,
    u: usize,
    v: usize,
    x: u64,
    need_u: u64,
}

/// Packs arborescences with the default options.
pub fn pack_arborescences(d: &WeightedDigraph, r: usize, k: u64) -> Result<ArbFamily> {
    pack_arborescences_with(d, r, k, PackingOptions::default()).map(|p| p.0)
}

pub fn pack_arborescences_with(
    d: &WeightedDigraph,
    r: usize,
    k: u64,
    opts: PackingOptions,
) -> Result<(ArbFamily, PackingStats)> {
    let n = d.n();
    if r >= n {
        return Err(Error::InvalidArgument("root out of range".into()));
    }
    check_hypothesis(d, r)?;
    let mut stats = PackingStats::default();
    if k == 0 {
        return Ok((ArbFamily { k, members: Vec::new() }, stats));
    }
    let mut g = eulerianize(d, r)?;
    let capped = |g: &WeightedDigraph, a: usize, b: usize| g.network().max_flow(a, b).min(k);
    let degree = |g: &WeightedDigraph, u: usize| g.in_degree(u) + g.out_degree(u);

    let mut splits: Vec<Split> = Vec::new();
    loop {
        let active: Vec<usize> = (0..n).filter(|&u| u != r && degree(&g, u) > 0).collect();
        let Some(&center) = active.iter().min_by_key(|&&u| (capped(&g, r, u), u)) else { break };
        let mut protect = Vec::new();
        for a in (0..n).filter(|&a| a != center) {
            for b in (0..n).filter(|&b| b != center && b != a) {
                let need = capped(&g, a, b);
                if need > 0 {
                    protect.push(Requirement { from: a, to: b, need });
                }
            }
        }
        let start_degree = degree(&g, center);
        let mut count = 0usize;
        while degree(&g, center) > 0 {
            let v = (0..n).find(|&v| g.weight(center, v) > 0).ok_or_else(|| {
                Error::Internal(format!("node {center} has in-arcs but no out-arcs after balancing"))
            })?;
            let mut done = false;
            for t in (0..n).filter(|&t| g.weight(t, center) > 0) {
                let x = max_splittable(&g, (t, center), (center, v), &protect)?;
                if x == 0 {
                    continue;
                }
                let need_u = capped(&g, r, center);
                apply_split(&mut g, t, center, v, x);
                if opts.check_splits && !requirements_hold(&g, &protect) {
                    return Err(Error::Internal(format!("split ({t},{center},{v}) by {x} broke a requirement")));
                }
                if opts.trace {
                    let _ = writeln!(stats.trace, "split ({t},{center}) + ({center},{v}) -> ({t},{v}) by {x}");
                }
                splits.push(Split { t, u: center, v, x, need_u });
                count += 1;
                done = true;
                break;
            }
            if !done {
                return Err(Error::Internal(format!("no splittable pair at node {center} for arc ({center},{v})")));
            }
        }
        stats.splits_per_center.push((center, count, start_degree));
    }

    let mut family = ArbFamily { k, members: vec![(k, Arborescence::trivial(n, r))] };
    while let Some(s) = splits.pop() {
        undo_split(&mut g, s.t, s.u, s.v, s.x);
        unsplit(&mut family, &g, s)?;
        if opts.trace {
            let _ = writeln!(stats.trace, "unsplit ({},{},{}) by {}: {} members", s.t, s.u, s.v, s.x, family.members.len());
        }
        family = family.merged();
    }
    Ok((family, stats))
}

/// Splits member `i` so that a member of weight exactly `amount` exists; returns its index.
fn take_share(members: &mut Vec<(u64, Arborescence)>, i: usize, amount: u64) -> usize {
    if members[i].0 == amount {
        return i;
    }
    members[i].0 -= amount;
    let share = members[i].1.clone();
    members.push((amount, share));
    members.len() - 1
}

/// Turns a family for the graph after split `s` into one for `g` (the graph before it).
fn unsplit(family: &mut ArbFamily, g: &WeightedDigraph, s: Split) -> Result<()> {
    let Split { t, u, v, need_u, .. } = s;
    let members = &mut family.members;
    if t != v {
        let used: u64 = members.iter().filter(|m| m.1.uses(t, v)).map(|m| m.0).sum();
        let mut excess = used.saturating_sub(g.weight(t, v));
        let len = members.len();
        for i in 0..len {
            if excess == 0 {
                break;
            }
            if !members[i].1.uses(t, v) {
                continue;
            }
            let amount = members[i].0.min(excess);
            let j = take_share(members, i, amount);
            let f = &mut members[j].1;
            if !f.contains(u) || f.is_ancestor(v, u) {
                f.parent[u] = Some(t);
                f.parent[v] = Some(u);
            } else {
                f.parent[v] = Some(u);
            }
            excess -= amount;
        }
        if excess > 0 {
            return Err(Error::Internal(format!("could not free arc ({t},{v})")));
        }
    }
    let covered: u64 = members.iter().filter(|m| m.1.contains(u)).map(|m| m.0).sum();
    let mut deficit = need_u.saturating_sub(covered);
    let n = g.n();
    for src in 0..n {
        if deficit == 0 {
            break;
        }
        let cap = g.weight(src, u);
        if cap == 0 {
            continue;
        }
        let used: u64 = members.iter().filter(|m| m.1.uses(src, u)).map(|m| m.0).sum();
        let mut spare = cap.saturating_sub(used);
        let len = members.len();
        for i in 0..len {
            if deficit == 0 || spare == 0 {
                break;
            }
            let f = &members[i].1;
            if f.contains(u) || !f.contains(src) {
                continue;
            }
            let amount = members[i].0.min(spare).min(deficit);
            let j = take_share(members, i, amount);
            members[j].1.parent[u] = Some(src);
            spare -= amount;
            deficit -= amount;
        }
    }
    if deficit > 0 {
        return Err(Error::Internal(format!("coverage of node {u} short by {deficit} after unsplitting")));
    }
    Ok(())
}

/// Outcome of [`verify_packing`]; `problems` is empty exactly when the family is valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PackingReport {
    pub problems: Vec<String>,
}

impl PackingReport {
    pub fn passed(&self) -> bool {
        self.problems.is_empty()
    }
}

/// Checks every packing guarantee exactly and lists each violation found.
pub fn verify_packing(d: &WeightedDigraph, r: usize, k: u64, family: &ArbFamily) -> PackingReport {
    let n = d.n();
    let mut problems = Vec::new();
    for (i, (g, f)) in family.members.iter().enumerate() {
        if *g == 0 {
            problems.push(format!("member {i} has zero weight"));
        }
        if f.parent.len() != n || f.root != r {
            problems.push(format!("member {i} is not over this digraph and root"));
            continue;
        }
        if let Some(m) = f.defect() {
            problems.push(format!("member {i} is not an arborescence: {m}"));
        }
    }
    let total = family.total_weight();
    if total != k {
        problems.push(format!("weight total {total} differs from K = {k}"));
    }
    if !problems.is_empty() {
        return PackingReport { problems };
    }
    for a in 0..n {
        for b in 0..n {
            let used = family.usage(a, b);
            if used > d.weight(a, b) {
                problems.push(format!("arc ({a},{b}) used {used} > weight {}", d.weight(a, b)));
            }
        }
    }
    for u in (0..n).filter(|&u| u != r) {
        let need = d.network().max_flow(r, u).min(k);
        let cov = family.coverage(u);
        if cov < need {
            problems.push(format!("node {u} covered {cov} < required {need}"));
        }
    }
    PackingReport { problems }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn connectivity_examples() {
        let d = WeightedDigraph::from_arcs(2, &[(0, 1, 2), (1, 0, 2)]);
        assert_eq!(connectivity(&d, 0, 1).unwrap(), 2);
        let tri = WeightedDigraph::from_arcs(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]);
        assert_eq!(connectivity(&tri, 0, 2).unwrap(), 2);
        let none = WeightedDigraph::from_arcs(3, &[(1, 0, 1)]);
        assert_eq!(connectivity(&none, 0, 2).unwrap(), 0);
        assert!(connectivity(&none, 0, 7).is_err());
    }

    #[test]
    fn eulerianize_examples() {
        let d = WeightedDigraph::from_arcs(2, &[(0, 1, 2)]);
        let e = eulerianize(&d, 0).unwrap();
        assert_eq!(e.weight(1, 0), 2);
        let bal = WeightedDigraph::from_arcs(2, &[(0, 1, 1), (1, 0, 1)]);
        assert_eq!(eulerianize(&bal, 0).unwrap(), bal);
        let bad = WeightedDigraph::from_arcs(3, &[(0, 1, 1), (1, 2, 3)]);
        assert_eq!(
            eulerianize(&bad, 0).unwrap_err(),
            Error::Hypothesis { node: 1, indeg: 1, outdeg: 3 }
        );
    }

    #[test]
    fn splitting_examples() {
        let tri = WeightedDigraph::from_arcs(3, &[(0, 1, 1), (1, 2, 1), (2, 0, 1)]);
        let protect = [Requirement { from: 0, to: 2, need: 1 }];
        assert_eq!(max_splittable(&tri, (0, 1), (1, 2), &protect).unwrap(), 1);
        let heavy = WeightedDigraph::from_arcs(3, &[(0, 1, 3), (1, 2, 2), (2, 0, 2), (1, 0, 1)]);
        assert_eq!(max_splittable(&heavy, (0, 1), (1, 2), &[]).unwrap(), 2);
        let zero = WeightedDigraph::from_arcs(3, &[(0, 1, 1)]);
        assert!(max_splittable(&zero, (0, 1), (1, 2), &[]).is_err());
    }

    #[test]
    fn packing_examples() {
        let d = WeightedDigraph::from_arcs(2, &[(0, 1, 2)]);
        let fam = pack_arborescences(&d, 0, 2).unwrap();
        assert_eq!(fam.members.len(), 1);
        assert_eq!(fam.members[0].0, 2);
        assert_eq!(fam.members[0].1.arcs(), vec![(0, 1)]);

        let d = WeightedDigraph::from_arcs(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]);
        let fam = pack_arborescences(&d, 0, 2).unwrap();
        assert!(verify_packing(&d, 0, 2, &fam).passed());
        assert_eq!(fam.coverage(1), 1);
        assert_eq!(fam.coverage(2), 2);

        let empty = pack_arborescences(&d, 0, 0).unwrap();
        assert!(empty.members.is_empty());
        assert!(verify_packing(&d, 0, 0, &empty).passed());
    }

    #[test]
    fn verification_catches_violations() {
        let d = WeightedDigraph::from_arcs(2, &[(0, 1, 1)]);
        let arb = Arborescence::from_arcs(2, 0, &[(0, 1)]).unwrap();
        let over = ArbFamily { k: 2, members: vec![(2, arb.clone())] };
        let rep = verify_packing(&d, 0, 2, &over);
        assert!(rep.problems.iter().any(|p| p.contains("arc (0,1)")));
        let short = ArbFamily { k: 2, members: vec![(1, arb)] };
        let rep = verify_packing(&d, 0, 2, &short);
        assert!(rep.problems.iter().any(|p| p.contains("weight total")));
    }

    #[test]
    fn checked_splits_and_trace() {
        let d = WeightedDigraph::from_arcs(
            4,
            &[(0, 1, 2), (0, 2, 1), (1, 2, 1), (2, 3, 2), (1, 3, 1), (3, 1, 1)],
        );
        let opts = PackingOptions { check_splits: true, trace: true };
        let (fam, stats) = pack_arborescences_with(&d, 0, 3, opts).unwrap();
        assert!(verify_packing(&d, 0, 3, &fam).passed());
        assert!(stats.trace.contains("split"));
    }
}
