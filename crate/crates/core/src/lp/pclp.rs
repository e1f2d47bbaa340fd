//! Bidirected prize-collecting relaxation: arc variables `x_a`, penalty variables `z_v`.

use num_traits::{One, Signed, Zero};

use super::routing::min_cut;
use super::{solve_with_cuts, Constraint, LinearProgram, LpKind, LpSolution};
use crate::error::{Error, Result};
use crate::instance::MetricInstance;
use crate::rational::{self, Rational};

#[derive(Debug, Clone)]
pub struct PcLpSolution {
    pub lp: LpSolution,
    pub root: usize,
    /// Arcs with positive value.
    pub arcs: Vec<(usize, usize, Rational)>,
    /// `z_v` per node; zero at the root.
    pub z: Vec<Rational>,
}

/// Solves the relaxation over nodes `0..n` with directed arc costs `cost[u][v]`.
pub fn build_and_solve_pclp(cost: &[Vec<Rational>], root: usize, penalties: &[Rational]) -> Result<PcLpSolution> {
    let n = cost.len();
    if root >= n || penalties.len() != n || cost.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidArgument("cost matrix, root and penalties disagree in size".into()));
    }
    if penalties.iter().any(Signed::is_negative) {
        return Err(Error::InvalidArgument("penalties must be nonnegative".into()));
    }
    let mut lp = LinearProgram::new();
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && v != root {
                let j = lp.add_var(format!("x_{u}_{v}"), cost[u][v].clone());
                arcs.push((u, v, j));
            }
        }
    }
    let mut zvar = vec![usize::MAX; n];
    for v in (0..n).filter(|&v| v != root) {
        zvar[v] = lp.add_var(format!("z_{v}"), penalties[v].clone());
    }
    let one = Rational::one();
    for v in (0..n).filter(|&v| v != root) {
        let mut deg = Vec::new();
        let mut cover = vec![(zvar[v], one.clone())];
        for &(a, b, j) in &arcs {
            if b == v {
                deg.push((j, one.clone()));
                cover.push((j, one.clone()));
            } else if a == v {
                deg.push((j, -one.clone()));
            }
        }
        lp.add_constraint(Constraint::ge(deg, Rational::zero()))?;
        lp.add_constraint(Constraint::ge(cover, one.clone()))?;
    }
    let mut oracle = |x: &[Rational], tol: &Rational| {
        let caps: Vec<(usize, usize, Rational)> =
            arcs.iter().filter(|(_, _, j)| x[*j].is_positive()).map(|&(a, b, j)| (a, b, x[j].clone())).collect();
        let mut cuts = Vec::new();
        for v in (0..n).filter(|&v| v != root) {
            let need = &one - &x[zvar[v]];
            if &need <= tol {
                continue;
            }
            let (flow, sink) = min_cut(n, &caps, root, v);
            if &(&need - &flow) > tol {
                let mut terms = vec![(zvar[v], one.clone())];
                terms.extend(arcs.iter().filter(|(a, b, _)| !sink[*a] && sink[*b]).map(|&(_, _, j)| (j, one.clone())));
                cuts.push(Constraint::ge(terms, one.clone()));
            }
        }
        cuts
    };
    let mut lp_sol = solve_with_cuts(&lp, &mut oracle)?;
    lp_sol.which = LpKind::PcLp;
    let x = &lp_sol.values;
    let arcs_out =
        arcs.iter().filter(|(_, _, j)| x[*j].is_positive()).map(|&(a, b, j)| (a, b, x[j].clone())).collect();
    let z = (0..n).map(|v| if v == root { Rational::zero() } else { x[zvar[v]].clone() }).collect();
    Ok(PcLpSolution { lp: lp_sol, root, arcs: arcs_out, z })
}

/// The relaxation on an instance's own metric.
pub fn pclp_for_instance(inst: &MetricInstance, root: usize, penalties: &[Rational]) -> Result<PcLpSolution> {
    let cost: Vec<Vec<Rational>> =
        (0..inst.n()).map(|u| (0..inst.n()).map(|v| rational::int(inst.c(u, v))).collect()).collect();
    build_and_solve_pclp(&cost, root, penalties)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn fix_a() -> MetricInstance {
        MetricInstance::on_line(&[0, 1, 3], &[0]).unwrap()
    }

    #[test]
    fn high_penalties_cover_everything() {
        // Path r→a→b costs c(r,a) + c(a,b) = 1 + 2.
        let s = pclp_for_instance(&fix_a(), 0, &[int(0), int(10), int(10)]).unwrap();
        assert_eq!(s.lp.objective, int(3));
        assert!(s.z.iter().all(Zero::is_zero));
    }

    #[test]
    fn zero_penalties_pay_everything() {
        let s = pclp_for_instance(&fix_a(), 0, &[int(0), int(0), int(0)]).unwrap();
        assert_eq!(s.lp.objective, int(0));
        assert!(s.arcs.is_empty());
        assert_eq!(s.z[1], int(1));
        assert_eq!(s.z[2], int(1));
    }

    #[test]
    fn small_penalties_cover_nothing() {
        let s = pclp_for_instance(&fix_a(), 0, &[int(0), frac(2, 5), frac(2, 5)]).unwrap();
        assert_eq!(s.lp.objective, frac(4, 5));
    }
}
