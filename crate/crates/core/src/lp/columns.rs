//! Path-configuration relaxations with explicitly enumerated columns.
//!
//! A path column only matters through the set of clients it covers, and a column may always
//! be swapped for one covering a superset. So per (group, t) the columns are the inclusion-
//! maximal client sets whose shortest rooted covering path has length at most `t`, each with
//! a witness path.

use std::collections::{BTreeSet, HashMap};

use num_traits::{One, Zero};

use super::routing::{arc_costs, root_groups, ArcMetric, RootGroup};
use super::{solve_lp, Constraint, LinearProgram, LpKind, LpSolution};
use crate::error::{Error, Result};
use crate::instance::MetricInstance;
use crate::rational::{self, Rational};

/// Default cap on Held-Karp states (subset, last node) per depot.
pub const PATH_STATE_CAP: usize = 200_000;
/// Default cap on vehicle-tuple combinations per time step.
pub const CONFIG_CAP: usize = 500_000;

/// Shortest rooted paths covering each subset of `targets` exactly.
#[derive(Debug, Clone)]
pub struct SubsetPaths {
    pub root: usize,
    pub targets: Vec<usize>,
    /// `len[mask]`: shortest path from the root visiting exactly `mask` (None when mask = 0).
    pub len: Vec<Option<Rational>>,
    last: Vec<Option<usize>>,
    pred: Vec<Vec<Option<usize>>>,
}

impl SubsetPaths {
    pub fn compute(cost: &[Vec<Rational>], root: usize, targets: &[usize], cap: usize) -> Result<Self> {
        let m = targets.len();
        if m >= 28 || (1usize << m).saturating_mul(m.max(1)) > cap {
            return Err(Error::Guard(format!("instance too large for enumeration ({m} clients at one depot)")));
        }
        let full = 1usize << m;
        let mut dp: Vec<Vec<Option<Rational>>> = vec![vec![None; m]; full];
        let mut pred: Vec<Vec<Option<usize>>> = vec![vec![None; m]; full];
        for (i, &v) in targets.iter().enumerate() {
            dp[1 << i][i] = Some(cost[root][v].clone());
        }
        for mask in 1..full {
            for i in 0..m {
                let Some(base) = dp[mask][i].clone() else { continue };
                for j in 0..m {
                    if mask & (1 << j) != 0 {
                        continue;
                    }
                    let nm = mask | (1 << j);
                    let cand = &base + &cost[targets[i]][targets[j]];
                    if dp[nm][j].as_ref().is_none_or(|cur| cand < *cur) {
                        dp[nm][j] = Some(cand);
                        pred[nm][j] = Some(i);
                    }
                }
            }
        }
        let mut len = vec![None; full];
        let mut last = vec![None; full];
        for mask in 1..full {
            for i in 0..m {
                if let Some(l) = &dp[mask][i] {
                    if len[mask].as_ref().is_none_or(|cur: &Rational| l < cur) {
                        len[mask] = Some(l.clone());
                        last[mask] = Some(i);
                    }
                }
            }
        }
        Ok(Self { root, targets: targets.to_vec(), len, last, pred })
    }

    /// Witness path (root first) for a nonempty mask.
    pub fn path(&self, mask: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = mask;
        let mut i = self.last[mask];
        while let Some(j) = i {
            out.push(self.targets[j]);
            let prev = self.pred[cur][j];
            cur &= !(1 << j);
            i = prev;
        }
        out.push(self.root);
        out.reverse();
        out
    }

    pub fn nodes(&self, mask: usize) -> Vec<usize> {
        (0..self.targets.len()).filter(|i| mask & (1 << i) != 0).map(|i| self.targets[i]).collect()
    }

    /// Inclusion-maximal masks with shortest covering path length at most `t`.
    pub fn maximal_within(&self, t: &Rational) -> Vec<usize> {
        let fits: Vec<usize> =
            (1..self.len.len()).filter(|&m| self.len[m].as_ref().is_some_and(|l| l <= t)).collect();
        let fit_set: BTreeSet<usize> = fits.iter().copied().collect();
        fits.into_iter()
            .filter(|&m| (0..self.targets.len()).all(|i| m & (1 << i) != 0 || !fit_set.contains(&(m | (1 << i)))))
            .collect()
    }
}

/// One vehicle-group column: a path of length at most `t` and its LP value.
#[derive(Debug, Clone)]
pub struct PathColumn {
    pub group: usize,
    pub t: i64,
    pub path: Vec<usize>,
    pub covered: Vec<usize>,
    pub length: Rational,
    pub value: Rational,
}

#[derive(Debug, Clone)]
pub struct Lp1Solution {
    pub lp: LpSolution,
    pub horizon: i64,
    pub metric: ArcMetric,
    pub groups: Vec<RootGroup>,
    /// `x[g][v][t]` for `t ∈ 0..=T` (index 0 unused).
    pub x: Vec<Vec<Vec<Rational>>>,
    /// Every column, including those at zero.
    pub columns: Vec<PathColumn>,
}

fn allowed_clients(inst: &MetricInstance, root: usize) -> Vec<usize> {
    inst.clients().into_iter().filter(|&v| inst.allowed_roots(v).contains(&root)).collect()
}

pub fn build_and_solve_lp1(inst: &MetricInstance, t_max: i64) -> Result<Lp1Solution> {
    build_and_solve_lp1_with(inst, t_max, ArcMetric::for_paths(inst), PATH_STATE_CAP)
}

pub fn build_and_solve_lp1_with(inst: &MetricInstance, t_max: i64, metric: ArcMetric, cap: usize) -> Result<Lp1Solution> {
    if t_max < 1 {
        return Err(Error::InvalidArgument("time horizon must be at least 1".into()));
    }
    let n = inst.n();
    let tt = t_max as usize;
    let cost = arc_costs(inst, metric);
    let groups = root_groups(inst);
    let one = Rational::one();
    let mut lp = LinearProgram::new();
    let mut xvar = vec![vec![vec![None; tt + 1]; n]; groups.len()];
    let mut columns = Vec::new();
    let mut colvar = Vec::new();
    let mut per_gt: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); tt + 1]; groups.len()];
    for (g, grp) in groups.iter().enumerate() {
        let targets = allowed_clients(inst, grp.root);
        let paths = SubsetPaths::compute(&cost, grp.root, &targets, cap)?;
        for t in 1..=tt {
            let tr = rational::int(t as i64);
            for &v in &targets {
                if tr >= cost[grp.root][v] {
                    xvar[g][v][t] = Some(lp.add_var(format!("x_{g}_{v}_{t}"), rational::int(inst.weight(v) * t as i64)));
                }
            }
            for mask in paths.maximal_within(&tr) {
                let j = lp.add_var(format!("z_{g}_{t}_{}", columns.len()), Rational::zero());
                per_gt[g][t].push(columns.len());
                colvar.push(j);
                columns.push(PathColumn {
                    group: g,
                    t: t as i64,
                    path: paths.path(mask),
                    covered: paths.nodes(mask),
                    length: paths.len[mask].clone().expect("nonempty mask has a path"),
                    value: Rational::zero(),
                });
            }
        }
    }
    for v in inst.clients() {
        let terms: Vec<(usize, Rational)> =
            xvar.iter().flat_map(|xg| xg[v].iter().flatten().map(|&j| (j, one.clone()))).collect();
        if terms.is_empty() {
            return Err(Error::Infeasible);
        }
        lp.add_constraint(Constraint::ge(terms, one.clone()))?;
    }
    for (g, grp) in groups.iter().enumerate() {
        for t in 1..=tt {
            let cols = &per_gt[g][t];
            if !cols.is_empty() {
                let terms = cols.iter().map(|&c| (colvar[c], one.clone())).collect();
                lp.add_constraint(Constraint::le(terms, rational::int(grp.size() as i64)))?;
            }
            for v in 0..n {
                let prefix: Vec<usize> = xvar[g][v][1..=t].iter().flatten().copied().collect();
                if prefix.is_empty() {
                    continue;
                }
                let mut terms: Vec<(usize, Rational)> = cols
                    .iter()
                    .filter(|&&c| columns[c].covered.contains(&v))
                    .map(|&c| (colvar[c], one.clone()))
                    .collect();
                terms.extend(prefix.iter().map(|&j| (j, -one.clone())));
                lp.add_constraint(Constraint::ge(terms, Rational::zero()))?;
            }
        }
    }
    let mut sol = solve_lp(&lp)?;
    sol.which = LpKind::Lp1;
    sol.horizon = Some(t_max);
    for (c, &j) in colvar.iter().enumerate() {
        columns[c].value = sol.values[j].clone();
    }
    let x = extract_x(&xvar, &sol.values);
    Ok(Lp1Solution { lp: sol, horizon: t_max, metric, groups, x, columns })
}

fn extract_x(xvar: &[Vec<Vec<Option<usize>>>], values: &[Rational]) -> Vec<Vec<Vec<Rational>>> {
    xvar.iter()
        .map(|xg| xg.iter().map(|xv| xv.iter().map(|o| o.map_or_else(Rational::zero, |j| values[j].clone())).collect()).collect())
        .collect()
}

/// A configuration column: one path per vehicle (index = vehicle) at time `t`.
#[derive(Debug, Clone)]
pub struct ConfigColumn {
    pub t: i64,
    pub paths: Vec<Vec<usize>>,
    pub covered: Vec<usize>,
    pub value: Rational,
}

#[derive(Debug, Clone)]
pub struct Lp2Solution {
    pub lp: LpSolution,
    pub horizon: i64,
    pub metric: ArcMetric,
    /// `x[v][t]`.
    pub x: Vec<Vec<Rational>>,
    pub columns: Vec<ConfigColumn>,
}

pub fn build_and_solve_lp2(inst: &MetricInstance, t_max: i64) -> Result<Lp2Solution> {
    build_and_solve_lp2_with(inst, t_max, ArcMetric::for_paths(inst), PATH_STATE_CAP, CONFIG_CAP)
}

pub fn build_and_solve_lp2_with(
    inst: &MetricInstance,
    t_max: i64,
    metric: ArcMetric,
    path_cap: usize,
    config_cap: usize,
) -> Result<Lp2Solution> {
    if t_max < 1 {
        return Err(Error::InvalidArgument("time horizon must be at least 1".into()));
    }
    let n = inst.n();
    if n > 64 {
        return Err(Error::Guard("configuration enumeration supports at most 64 nodes".into()));
    }
    let k = inst.k();
    let tt = t_max as usize;
    let cost = arc_costs(inst, metric);
    let one = Rational::one();
    let mut cache: HashMap<usize, SubsetPaths> = HashMap::new();
    for &r in inst.roots() {
        if let std::collections::hash_map::Entry::Vacant(e) = cache.entry(r) {
            e.insert(SubsetPaths::compute(&cost, r, &allowed_clients(inst, r), path_cap)?);
        }
    }
    let mut lp = LinearProgram::new();
    let mut xvar = vec![vec![None; tt + 1]; n];
    let mut columns = Vec::new();
    let mut colvar = Vec::new();
    let mut per_t: Vec<Vec<usize>> = vec![Vec::new(); tt + 1];
    for t in 1..=tt {
        let tr = rational::int(t as i64);
        for v in inst.clients() {
            let reachable = inst.allowed_roots(v).iter().any(|&r| tr >= cost[r][v]);
            if reachable {
                xvar[v][t] = Some(lp.add_var(format!("x_{v}_{t}"), rational::int(inst.weight(v) * t as i64)));
            }
        }
        // Per vehicle: the empty choice plus every maximal covered set.
        let options: Vec<Vec<Option<usize>>> = inst
            .roots()
            .iter()
            .map(|r| std::iter::once(None).chain(cache[r].maximal_within(&tr).into_iter().map(Some)).collect())
            .collect();
        let combos = options.iter().try_fold(1usize, |acc, o| acc.checked_mul(o.len()));
        if combos.is_none_or(|c| c > config_cap) {
            return Err(Error::Guard("instance too large for configuration enumeration".into()));
        }
        let mut best: HashMap<u64, Vec<Option<usize>>> = HashMap::new();
        let mut idx = vec![0usize; k];
        loop {
            let choice: Vec<Option<usize>> = (0..k).map(|i| options[i][idx[i]]).collect();
            let mut cover = 0u64;
            for (i, ch) in choice.iter().enumerate() {
                if let Some(mask) = ch {
                    for v in cache[&inst.root(i)].nodes(*mask) {
                        cover |= 1 << v;
                    }
                }
            }
            best.entry(cover).or_insert(choice);
            let mut p = 0;
            while p < k {
                idx[p] += 1;
                if idx[p] < options[p].len() {
                    break;
                }
                idx[p] = 0;
                p += 1;
            }
            if p == k {
                break;
            }
        }
        let covers: Vec<u64> = best.keys().copied().collect();
        let mut maximal: Vec<u64> =
            covers.iter().copied().filter(|&c| c != 0 && !covers.iter().any(|&d| d != c && d & c == c)).collect();
        maximal.sort_unstable();
        for cover in maximal {
            let choice = &best[&cover];
            let paths = choice
                .iter()
                .enumerate()
                .map(|(i, ch)| ch.map_or_else(|| vec![inst.root(i)], |m| cache[&inst.root(i)].path(m)))
                .collect();
            let j = lp.add_var(format!("z_{t}_{}", columns.len()), Rational::zero());
            per_t[t].push(columns.len());
            colvar.push(j);
            columns.push(ConfigColumn {
                t: t as i64,
                paths,
                covered: (0..n).filter(|v| cover & (1 << v) != 0).collect(),
                value: Rational::zero(),
            });
        }
    }
    for v in inst.clients() {
        let terms: Vec<(usize, Rational)> = xvar[v].iter().flatten().map(|&j| (j, one.clone())).collect();
        if terms.is_empty() {
            return Err(Error::Infeasible);
        }
        lp.add_constraint(Constraint::ge(terms, one.clone()))?;
    }
    for t in 1..=tt {
        let cols = &per_t[t];
        if !cols.is_empty() {
            lp.add_constraint(Constraint::le(cols.iter().map(|&c| (colvar[c], one.clone())).collect(), one.clone()))?;
        }
        for v in inst.clients() {
            let prefix: Vec<usize> = xvar[v][1..=t].iter().flatten().copied().collect();
            if prefix.is_empty() {
                continue;
            }
            let mut terms: Vec<(usize, Rational)> = cols
                .iter()
                .filter(|&&c| columns[c].covered.contains(&v))
                .map(|&c| (colvar[c], one.clone()))
                .collect();
            terms.extend(prefix.iter().map(|&j| (j, -one.clone())));
            lp.add_constraint(Constraint::ge(terms, Rational::zero()))?;
        }
    }
    let mut sol = solve_lp(&lp)?;
    sol.which = LpKind::Lp2;
    sol.horizon = Some(t_max);
    for (c, &j) in colvar.iter().enumerate() {
        columns[c].value = sol.values[j].clone();
    }
    let x = xvar.iter().map(|xv| xv.iter().map(|o| o.map_or_else(Rational::zero, |j| sol.values[j].clone())).collect()).collect();
    Ok(Lp2Solution { lp: sol, horizon: t_max, metric, x, columns })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn subset_paths_on_a_line() {
        let inst = MetricInstance::on_line(&[0, 1, 3], &[0]).unwrap();
        let cost = arc_costs(&inst, ArcMetric::Plain);
        let sp = SubsetPaths::compute(&cost, 0, &[1, 2], 1000).unwrap();
        assert_eq!(sp.len[0b11], Some(int(3)));
        assert_eq!(sp.path(0b11), vec![0, 1, 2]);
        assert_eq!(sp.maximal_within(&int(2)), vec![0b01]);
        assert_eq!(sp.maximal_within(&int(3)), vec![0b11]);
    }

    #[test]
    fn single_client_lp1_lp2() {
        let inst = MetricInstance::on_line(&[0, 1], &[0]).unwrap();
        let s1 = build_and_solve_lp1(&inst, 1).unwrap();
        assert_eq!(s1.lp.objective, int(1));
        assert_eq!(s1.columns.len(), 1);
        assert_eq!(s1.columns[0].value, int(1));
        assert_eq!(s1.columns[0].path, vec![0, 1]);
        let s2 = build_and_solve_lp2(&inst, 1).unwrap();
        assert_eq!(s2.lp.objective, int(1));
    }

    #[test]
    fn fix_a_and_fix_b() {
        let a = MetricInstance::on_line(&[0, 1, 3], &[0]).unwrap();
        let lp1 = build_and_solve_lp1(&a, 4).unwrap().lp.objective;
        let lp3 = super::super::lp3::build_and_solve_lp3(&a, 4).unwrap().lp.objective;
        assert!(lp3 <= lp1 && lp1 <= int(4));
        let b = MetricInstance::on_line(&[0, 1, 3, 4], &[0, 3]).unwrap();
        assert_eq!(build_and_solve_lp1(&b, 1).unwrap().lp.objective, int(2));
        assert_eq!(build_and_solve_lp2(&b, 1).unwrap().lp.objective, int(2));
    }

    #[test]
    fn enumeration_cap() {
        let inst = MetricInstance::on_line(&[0, 1, 2, 3, 4, 5], &[0]).unwrap();
        assert!(matches!(build_and_solve_lp1_with(&inst, 5, ArcMetric::Plain, 10), Err(Error::Guard(_))));
    }
}
