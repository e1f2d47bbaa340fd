//! Linear programs over exact rationals, a cutting-plane driver and the routing formulations.

pub mod columns;
pub mod lp3;
pub mod pclp;
pub mod routing;
pub mod simplex;

use std::collections::HashSet;
use std::fmt::Write as _;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
pub use columns::{build_and_solve_lp1, build_and_solve_lp2, ConfigColumn, Lp1Solution, Lp2Solution, PathColumn};
pub use lp3::{build_and_solve_lp3, Lp3Solution};
pub use pclp::{build_and_solve_pclp, pclp_for_instance, PcLpSolution};
pub use routing::{arc_costs, root_groups, ArcMetric, RootGroup};
pub use simplex::{ColKind, Outcome, Simplex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

/// `Σ terms (sense) rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub terms: Vec<(usize, Rational)>,
    pub sense: Sense,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(terms: Vec<(usize, Rational)>, sense: Sense, rhs: Rational) -> Self {
        let mut terms = terms;
        terms.sort_by_key(|t| t.0);
        let mut merged: Vec<(usize, Rational)> = Vec::with_capacity(terms.len());
        for (j, a) in terms {
            match merged.last_mut() {
                Some((lj, la)) if *lj == j => *la += a,
                _ => merged.push((j, a)),
            }
        }
        merged.retain(|(_, a)| !a.is_zero());
        Self { terms: merged, sense, rhs }
    }

    pub fn ge(terms: Vec<(usize, Rational)>, rhs: Rational) -> Self {
        Self::new(terms, Sense::Ge, rhs)
    }

    pub fn le(terms: Vec<(usize, Rational)>, rhs: Rational) -> Self {
        Self::new(terms, Sense::Le, rhs)
    }

    pub fn eq(terms: Vec<(usize, Rational)>, rhs: Rational) -> Self {
        Self::new(terms, Sense::Eq, rhs)
    }

    pub fn lhs(&self, x: &[Rational]) -> Rational {
        self.terms.iter().map(|(j, a)| a * &x[*j]).sum()
    }

    /// Amount by which `x` violates the constraint (zero when satisfied).
    pub fn violation(&self, x: &[Rational]) -> Rational {
        let lhs = self.lhs(x);
        let v = match self.sense {
            Sense::Le => &lhs - &self.rhs,
            Sense::Ge => &self.rhs - &lhs,
            Sense::Eq => (&lhs - &self.rhs).abs(),
        };
        if v.is_positive() {
            v
        } else {
            Rational::zero()
        }
    }

    fn key(&self) -> String {
        let mut s = format!("{:?}|{}|", self.sense, self.rhs);
        for (j, a) in &self.terms {
            let _ = write!(s, "{j}:{a},");
        }
        s
    }
}

/// Minimize `objective · x` subject to `constraints`, `x ≥ 0`.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    pub names: Vec<String>,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>, cost: Rational) -> usize {
        self.names.push(name.into());
        self.objective.push(cost);
        self.names.len() - 1
    }

    pub fn add_constraint(&mut self, c: Constraint) -> Result<()> {
        if let Some((j, _)) = c.terms.iter().find(|(j, _)| *j >= self.num_vars()) {
            return Err(Error::InvalidArgument(format!("constraint references undeclared variable {j}")));
        }
        self.constraints.push(c);
        Ok(())
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest violation over all rows and nonnegativity bounds.
    pub fn max_violation(&self, x: &[Rational]) -> Rational {
        let mut worst = Rational::zero();
        for v in x {
            if v.is_negative() && -v > worst {
                worst = -v;
            }
        }
        for c in &self.constraints {
            let v = c.violation(x);
            if v > worst {
                worst = v;
            }
        }
        worst
    }

    /// CPLEX-style LP text.
    pub fn to_lp_format(&self) -> String {
        let var = |j: usize| format!("x{j}_{}", sanitize(&self.names[j]));
        let form = |terms: &[(usize, Rational)]| {
            let mut s = String::new();
            for (j, a) in terms {
                let af = rational::to_f64(a);
                let _ = write!(s, " {} {} {}", if af < 0.0 { "-" } else { "+" }, af.abs(), var(*j));
            }
            if s.is_empty() {
                s.push_str(" 0");
            }
            s
        };
        let mut out = String::from("Minimize\n obj:");
        let obj: Vec<(usize, Rational)> =
            self.objective.iter().cloned().enumerate().filter(|(_, a)| !a.is_zero()).collect();
        out += &form(&obj);
        out += "\nSubject To\n";
        for (i, c) in self.constraints.iter().enumerate() {
            let op = match c.sense {
                Sense::Le => "<=",
                Sense::Ge => ">=",
                Sense::Eq => "=",
            };
            let _ = writeln!(out, " c{i}:{} {op} {}", form(&c.terms), rational::to_f64(&c.rhs));
        }
        out += "End\n";
        out
    }
}

fn sanitize(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect()
}

/// Which formulation produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpKind {
    Plain,
    PcLp,
    Lp1,
    Lp2,
    Lp3,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub values: Vec<Rational>,
    pub objective: Rational,
    pub which: LpKind,
    pub horizon: Option<i64>,
    pub cuts_added: usize,
    pub cut_rounds: usize,
}

/// Separation procedure: returns violated constraints, or nothing when `values` is feasible.
pub trait Separator {
    fn separate(&mut self, values: &[Rational], tol: &Rational) -> Vec<Constraint>;
}

impl<F: FnMut(&[Rational], &Rational) -> Vec<Constraint>> Separator for F {
    fn separate(&mut self, values: &[Rational], tol: &Rational) -> Vec<Constraint> {
        self(values, tol)
    }
}

#[derive(Debug, Clone)]
pub struct CutOptions {
    pub max_cuts: usize,
    /// Run a floating-point cut loop before the exact one.
    pub float_warmup: bool,
}

impl Default for CutOptions {
    fn default() -> Self {
        Self { max_cuts: 10_000, float_warmup: true }
    }
}

const FLOAT_TOL: f64 = 1e-7;

fn outcome_error(o: Outcome) -> Error {
    match o {
        Outcome::Infeasible => Error::Infeasible,
        Outcome::Unbounded => Error::Unbounded,
        Outcome::Optimal => Error::Internal("optimal outcome reported as an error".into()),
    }
}

/// Exact tableau seeded from a floating-point basis, falling back to a cold start.
fn exact_from_basis(lp: &LinearProgram, basis: Option<&[ColKind]>) -> Result<(Simplex<Rational>, Outcome)> {
    if let Some(kinds) = basis {
        if let Some(mut s) = Simplex::<Rational>::warm(lp, kinds) {
            if let Ok(o) = s.solve() {
                return Ok((s, o));
            }
        }
    }
    let mut s = Simplex::<Rational>::cold(lp);
    let o = s.solve()?;
    Ok((s, o))
}

fn float_basis(lp: &LinearProgram) -> Option<Vec<ColKind>> {
    let mut s = Simplex::<f64>::cold(lp);
    match s.solve() {
        Ok(Outcome::Optimal) => Some(s.basis_kinds()),
        _ => None,
    }
}

fn solution(lp: &LinearProgram, s: &Simplex<Rational>) -> LpSolution {
    let values = s.values();
    let objective = lp.objective_value(&values);
    LpSolution { values, objective, which: LpKind::Plain, horizon: None, cuts_added: 0, cut_rounds: 0 }
}

/// Exact optimum of `lp`.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    if lp.num_vars() == 0 {
        return Err(Error::InvalidArgument("linear program has no variables".into()));
    }
    let basis = float_basis(lp);
    let (s, o) = exact_from_basis(lp, basis.as_deref())?;
    if o != Outcome::Optimal {
        return Err(outcome_error(o));
    }
    Ok(solution(lp, &s))
}

pub fn solve_with_cuts(lp: &LinearProgram, oracle: &mut dyn Separator) -> Result<LpSolution> {
    solve_with_cuts_opts(lp, oracle, &CutOptions::default())
}

/// Cutting-plane loop: a floating-point phase to collect most cuts, then an exact phase
/// that only stops when the oracle accepts the exact vertex with zero tolerance.
pub fn solve_with_cuts_opts(lp: &LinearProgram, oracle: &mut dyn Separator, opts: &CutOptions) -> Result<LpSolution> {
    if lp.num_vars() == 0 {
        return Err(Error::InvalidArgument("linear program has no variables".into()));
    }
    let mut lp = lp.clone();
    let mut seen: HashSet<String> = lp.constraints.iter().map(Constraint::key).collect();
    let mut cuts = 0usize;
    let mut rounds = 0usize;
    let mut basis = None;

    if opts.float_warmup {
        let mut fs = Simplex::<f64>::cold(&lp);
        let tol = rational::from_f64(FLOAT_TOL);
        let mut ok = matches!(fs.solve(), Ok(Outcome::Optimal));
        while ok {
            let x: Vec<Rational> = fs.values().iter().map(|v| rational::from_f64(*v)).collect();
            let mut fresh = Vec::new();
            for c in oracle.separate(&x, &tol) {
                if seen.insert(c.key()) {
                    fresh.push(c);
                }
            }
            if fresh.is_empty() {
                break;
            }
            rounds += 1;
            cuts += fresh.len();
            if cuts > opts.max_cuts {
                return Err(Error::CutLimit(opts.max_cuts));
            }
            for c in fresh {
                lp.add_constraint(c.clone())?;
                if fs.add_row(&c).is_err() {
                    ok = false;
                }
            }
            ok = ok && matches!(fs.reoptimize(), Ok(Outcome::Optimal));
        }
        if ok {
            basis = Some(fs.basis_kinds());
        }
    }

    let (mut es, o) = exact_from_basis(&lp, basis.as_deref())?;
    if o != Outcome::Optimal {
        return Err(outcome_error(o));
    }
    let zero = Rational::zero();
    loop {
        let x = es.values();
        let found = oracle.separate(&x, &zero);
        if found.is_empty() {
            let mut sol = solution(&lp, &es);
            sol.cuts_added = cuts;
            sol.cut_rounds = rounds;
            return Ok(sol);
        }
        let mut fresh = Vec::new();
        for c in found {
            if seen.insert(c.key()) {
                fresh.push(c);
            }
        }
        if fresh.is_empty() {
            return Err(Error::NoProgress("separation returned only constraints already present".into()));
        }
        rounds += 1;
        cuts += fresh.len();
        if cuts > opts.max_cuts {
            return Err(Error::CutLimit(opts.max_cuts));
        }
        for c in fresh {
            lp.add_constraint(c.clone())?;
            es.add_row(&c)?;
        }
        let o = es.reoptimize()?;
        if o != Outcome::Optimal {
            return Err(outcome_error(o));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn lp2(c: [i64; 2]) -> LinearProgram {
        let mut lp = LinearProgram::new();
        lp.add_var("x", int(c[0]));
        lp.add_var("y", int(c[1]));
        lp
    }

    #[test]
    fn single_lower_bound() {
        let mut lp = LinearProgram::new();
        lp.add_var("x", int(1));
        lp.add_constraint(Constraint::ge(vec![(0, int(1))], int(3))).unwrap();
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.values, vec![int(3)]);
        assert_eq!(s.objective, int(3));
    }

    #[test]
    fn two_variable_cover() {
        let mut lp = lp2([1, 1]);
        lp.add_constraint(Constraint::ge(vec![(0, int(1)), (1, int(1))], int(2))).unwrap();
        lp.add_constraint(Constraint::le(vec![(0, int(1))], frac(1, 2))).unwrap();
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.objective, int(2));
        assert!(lp.max_violation(&s.values).is_zero());
    }

    #[test]
    fn unbounded_and_infeasible() {
        let mut lp = LinearProgram::new();
        lp.add_var("x", int(-1));
        assert!(matches!(solve_lp(&lp), Err(Error::Unbounded)));
        lp.add_constraint(Constraint::le(vec![(0, int(1))], int(1))).unwrap();
        lp.add_constraint(Constraint::ge(vec![(0, int(1))], int(2))).unwrap();
        assert!(matches!(solve_lp(&lp), Err(Error::Infeasible)));
    }

    #[test]
    fn equality_and_negative_rhs() {
        let mut lp = lp2([2, 3]);
        lp.add_constraint(Constraint::eq(vec![(0, int(1)), (1, int(1))], int(4))).unwrap();
        lp.add_constraint(Constraint::le(vec![(0, int(-1))], int(-1))).unwrap();
        lp.add_constraint(Constraint::le(vec![(0, int(1))], frac(7, 3))).unwrap();
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.values, vec![frac(7, 3), frac(5, 3)]);
        assert_eq!(s.objective, frac(29, 3));
    }

    #[test]
    fn undeclared_variable_rejected() {
        let mut lp = lp2([1, 1]);
        assert!(lp.add_constraint(Constraint::ge(vec![(5, int(1))], int(1))).is_err());
    }

    #[test]
    fn accepting_oracle_matches_plain_solve() {
        let mut lp = lp2([1, 2]);
        lp.add_constraint(Constraint::ge(vec![(0, int(1)), (1, int(3))], int(3))).unwrap();
        let plain = solve_lp(&lp).unwrap();
        let mut accept = |_: &[Rational], _: &Rational| Vec::new();
        let cut = solve_with_cuts(&lp, &mut accept).unwrap();
        assert_eq!(plain.objective, cut.objective);
        assert_eq!(cut.cuts_added, 0);
    }

    #[test]
    fn lazy_constraints_are_added() {
        // min x + y with the lazy family x ≥ 1, y ≥ x/2.
        let lp = lp2([1, 1]);
        let mut oracle = |x: &[Rational], tol: &Rational| {
            let mut out = Vec::new();
            if &(int(1) - &x[0]) > tol {
                out.push(Constraint::ge(vec![(0, int(1))], int(1)));
            }
            if &(&x[0] / int(2) - &x[1]) > tol {
                out.push(Constraint::ge(vec![(1, int(2)), (0, int(-1))], int(0)));
            }
            out
        };
        let s = solve_with_cuts(&lp, &mut oracle).unwrap();
        assert_eq!(s.objective, frac(3, 2));
        assert_eq!(s.cuts_added, 2);
    }

    #[test]
    fn repeated_cut_is_no_progress() {
        let mut lp = lp2([1, 1]);
        lp.add_constraint(Constraint::ge(vec![(0, int(1))], int(1))).unwrap();
        let mut oracle = |_: &[Rational], _: &Rational| vec![Constraint::ge(vec![(0, int(1))], int(1))];
        let err = solve_with_cuts(&lp, &mut oracle).unwrap_err();
        assert!(matches!(err, Error::NoProgress(_)));
    }

    #[test]
    fn cut_cap_is_enforced() {
        let lp = lp2([1, 1]);
        let mut k = 0i64;
        let mut oracle = |_: &[Rational], _: &Rational| {
            k += 1;
            vec![Constraint::ge(vec![(0, int(1)), (1, int(k))], int(0))]
        };
        let opts = CutOptions { max_cuts: 5, float_warmup: true };
        assert!(matches!(solve_with_cuts_opts(&lp, &mut oracle, &opts), Err(Error::CutLimit(5))));
    }

    #[test]
    fn degenerate_assignment() {
        // 3x3 assignment polytope; optimum is an integral permutation.
        let cost = [[4, 1, 3], [2, 0, 5], [3, 2, 2]];
        let mut lp = LinearProgram::new();
        for (i, row) in cost.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                lp.add_var(format!("a{i}{j}"), int(*c));
            }
        }
        for i in 0..3 {
            lp.add_constraint(Constraint::eq((0..3).map(|j| (3 * i + j, int(1))).collect(), int(1))).unwrap();
            lp.add_constraint(Constraint::eq((0..3).map(|j| (3 * j + i, int(1))).collect(), int(1))).unwrap();
        }
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.objective, int(5));
        assert!(lp.to_lp_format().contains("Subject To"));
    }
}
