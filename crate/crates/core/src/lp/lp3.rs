//! Bidirected time-indexed relaxation with per-time arc variables and lazy cut constraints.
//!
//! Vehicles sharing a depot are merged into one group of multiplicity `m`; the group budget
//! is `m·t`. Any per-vehicle solution sums to a group solution of the same value and a group
//! solution splits evenly back, so the optimum is unchanged.

use num_traits::{One, Signed, Zero};

use super::routing::{arc_costs, min_cut, root_groups, ArcMetric, RootGroup};
use super::{solve_with_cuts, Constraint, LinearProgram, LpKind, LpSolution};
use crate::error::{Error, Result};
use crate::instance::MetricInstance;
use crate::rational::{self, Rational};

#[derive(Debug, Clone)]
pub struct Lp3Solution {
    pub lp: LpSolution,
    pub horizon: i64,
    pub metric: ArcMetric,
    pub groups: Vec<RootGroup>,
    /// `x[g][v][t]` for `t ∈ 0..=T` (index 0 unused).
    pub x: Vec<Vec<Vec<Rational>>>,
    /// `z[g][t]`: positive arc values of group `g` at time `t` (index 0 empty).
    pub z: Vec<Vec<Vec<(usize, usize, Rational)>>>,
}

impl Lp3Solution {
    /// `Σ_{t' ≤ t} x[g][v][t']`.
    pub fn coverage(&self, g: usize, v: usize, t: i64) -> Rational {
        self.x[g][v][1..=t as usize].iter().sum()
    }

    /// `Σ_g x[g][v][t]` (single-depot view).
    pub fn x_total(&self, v: usize, t: i64) -> Rational {
        self.x.iter().map(|xg| xg[v][t as usize].clone()).sum()
    }

    /// `Σ_g z[g][t]` as a dense matrix.
    pub fn z_total(&self, n: usize, t: i64) -> Vec<Vec<Rational>> {
        let mut m = vec![vec![Rational::zero(); n]; n];
        for zg in &self.z {
            for (u, v, val) in &zg[t as usize] {
                m[*u][*v] += val;
            }
        }
        m
    }
}

/// Solves the relaxation on `inst` with horizon `t_max` and the instance's default arc metric.
pub fn build_and_solve_lp3(inst: &MetricInstance, t_max: i64) -> Result<Lp3Solution> {
    build_and_solve_lp3_with(inst, t_max, ArcMetric::for_arcs(inst))
}

pub fn build_and_solve_lp3_with(inst: &MetricInstance, t_max: i64, metric: ArcMetric) -> Result<Lp3Solution> {
    if t_max < 1 {
        return Err(Error::InvalidArgument("time horizon must be at least 1".into()));
    }
    let n = inst.n();
    let tt = t_max as usize;
    let cost = arc_costs(inst, metric);
    let groups = root_groups(inst);
    let clients = inst.clients();
    let one = Rational::one();

    let mut lp = LinearProgram::new();
    let mut xvar = vec![vec![vec![None; tt + 1]; n]; groups.len()];
    for (g, grp) in groups.iter().enumerate() {
        for &v in &clients {
            if !inst.allowed_roots(v).contains(&grp.root) {
                continue;
            }
            for t in 1..=tt {
                if rational::int(t as i64) >= cost[grp.root][v] {
                    let c = rational::int(inst.weight(v) * t as i64);
                    xvar[g][v][t] = Some(lp.add_var(format!("x_{g}_{v}_{t}"), c));
                }
            }
        }
    }
    for &v in &clients {
        let terms: Vec<(usize, Rational)> =
            xvar.iter().flat_map(|xg| xg[v].iter().flatten().map(|&j| (j, one.clone()))).collect();
        if terms.is_empty() {
            return Err(Error::Infeasible);
        }
        lp.add_constraint(Constraint::ge(terms, one.clone()))?;
    }
    // arcs[g]: (u, v) pairs available to group g; zvar[g][t][a].
    let arcs: Vec<Vec<(usize, usize)>> = groups
        .iter()
        .map(|grp| {
            let mut a = Vec::new();
            for u in 0..n {
                for v in 0..n {
                    if u != v && v != grp.root {
                        a.push((u, v));
                    }
                }
            }
            a
        })
        .collect();
    let mut zvar: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); tt + 1]; groups.len()];
    for (g, grp) in groups.iter().enumerate() {
        for t in 1..=tt {
            zvar[g][t] = arcs[g].iter().map(|&(u, v)| lp.add_var(format!("z_{g}_{u}_{v}_{t}"), Rational::zero())).collect();
            let budget: Vec<(usize, Rational)> =
                arcs[g].iter().zip(&zvar[g][t]).map(|(&(u, v), &j)| (j, cost[u][v].clone())).collect();
            lp.add_constraint(Constraint::le(budget, rational::int((grp.size() * t) as i64)))?;
            for w in (0..n).filter(|&w| w != grp.root) {
                let mut deg = Vec::new();
                for (&(u, v), &j) in arcs[g].iter().zip(&zvar[g][t]) {
                    if v == w {
                        deg.push((j, one.clone()));
                    } else if u == w {
                        deg.push((j, -one.clone()));
                    }
                }
                lp.add_constraint(Constraint::ge(deg, Rational::zero()))?;
            }
        }
    }

    let mut oracle = |val: &[Rational], tol: &Rational| {
        let mut cuts = Vec::new();
        for (g, grp) in groups.iter().enumerate() {
            for t in 1..=tt {
                let caps: Vec<(usize, usize, Rational)> = arcs[g]
                    .iter()
                    .zip(&zvar[g][t])
                    .filter(|(_, &j)| val[j].is_positive())
                    .map(|(&(u, v), &j)| (u, v, val[j].clone()))
                    .collect();
                for &v in &clients {
                    let prefix: Vec<usize> = xvar[g][v][1..=t].iter().flatten().copied().collect();
                    let need: Rational = prefix.iter().map(|&j| val[j].clone()).sum();
                    if &need <= tol {
                        continue;
                    }
                    let (flow, sink) = min_cut(n, &caps, grp.root, v);
                    if &(&need - &flow) > tol {
                        let mut terms: Vec<(usize, Rational)> = arcs[g]
                            .iter()
                            .zip(&zvar[g][t])
                            .filter(|(&(a, b), _)| !sink[a] && sink[b])
                            .map(|(_, &j)| (j, one.clone()))
                            .collect();
                        terms.extend(prefix.iter().map(|&j| (j, -one.clone())));
                        cuts.push(Constraint::ge(terms, Rational::zero()));
                    }
                }
            }
        }
        cuts
    };
    let mut sol = solve_with_cuts(&lp, &mut oracle)?;
    sol.which = LpKind::Lp3;
    sol.horizon = Some(t_max);
    let v = &sol.values;
    let x = xvar
        .iter()
        .map(|xg| xg.iter().map(|xv| xv.iter().map(|o| o.map_or_else(Rational::zero, |j| v[j].clone())).collect()).collect())
        .collect();
    let z = (0..groups.len())
        .map(|g| {
            (0..=tt)
                .map(|t| {
                    if t == 0 {
                        return Vec::new();
                    }
                    arcs[g]
                        .iter()
                        .zip(&zvar[g][t])
                        .filter(|(_, &j)| v[j].is_positive())
                        .map(|(&(a, b), &j)| (a, b, v[j].clone()))
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok(Lp3Solution { lp: sol, horizon: t_max, metric, groups, x, z })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn single_client_forced() {
        let inst = MetricInstance::on_line(&[0, 1], &[0]).unwrap();
        let s = build_and_solve_lp3(&inst, 1).unwrap();
        assert_eq!(s.lp.objective, int(1));
        assert_eq!(s.x[0][1][1], int(1));
        assert_eq!(s.z[0][1], vec![(0, 1, int(1))]);
    }

    #[test]
    fn fix_a_at_most_integral() {
        let inst = MetricInstance::on_line(&[0, 1, 3], &[0]).unwrap();
        let s = build_and_solve_lp3(&inst, 4).unwrap();
        assert!(s.lp.objective <= int(4));
        assert!(s.lp.objective >= int(4)); // each client needs its direct distance: 1 + 3
    }

    #[test]
    fn fix_b_two_depots() {
        let inst = MetricInstance::on_line(&[0, 1, 3, 4], &[0, 3]).unwrap();
        let s = build_and_solve_lp3(&inst, 1).unwrap();
        assert_eq!(s.lp.objective, int(2));
    }

    #[test]
    fn horizon_too_short_is_infeasible() {
        let inst = MetricInstance::on_line(&[0, 3], &[0]).unwrap();
        assert!(matches!(build_and_solve_lp3(&inst, 2), Err(Error::Infeasible)));
    }
}
