//! Revised simplex with an explicit basis inverse, generic over `f64` and exact rationals.

use std::fmt::Debug;

use num_traits::{One, Signed, Zero};

use super::{Constraint, LinearProgram, Sense};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Field operations the simplex needs; `f64` compares with a tolerance, rationals exactly.
pub trait Num: Clone + Debug + PartialOrd {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rat(r: &Rational) -> Self;
    fn to_rat(&self) -> Rational;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn is_nz(&self) -> bool {
        self.is_pos() || self.is_neg()
    }
    fn abs_val(&self) -> Self {
        if self.is_neg() {
            self.neg()
        } else {
            self.clone()
        }
    }
    /// `self -= a * b`.
    fn sub_mul(&mut self, a: &Self, b: &Self);
    fn exact() -> bool;
}

const EPS: f64 = 1e-9;

impl Num for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_rat(r: &Rational) -> Self {
        rational::to_f64(r)
    }
    fn to_rat(&self) -> Rational {
        rational::from_f64(*self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_pos(&self) -> bool {
        *self > EPS
    }
    fn is_neg(&self) -> bool {
        *self < -EPS
    }
    fn sub_mul(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }
    fn exact() -> bool {
        false
    }
}

impl Num for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_rat(r: &Rational) -> Self {
        r.clone()
    }
    fn to_rat(&self) -> Rational {
        self.clone()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn is_nz(&self) -> bool {
        !self.is_zero()
    }
    fn sub_mul(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }
    fn exact() -> bool {
        true
    }
}

/// Identity of a tableau column, stable across solver instances of the same program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ColKind {
    Structural(usize),
    Slack(usize),
    Artificial(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Solver state: sparse columns, basis, dense basis inverse and basic values.
#[derive(Debug, Clone)]
pub struct Simplex<S: Num> {
    nvars: usize,
    cols: Vec<Vec<(usize, S)>>,
    kinds: Vec<ColKind>,
    cost: Vec<S>,
    b: Vec<S>,
    basis: Vec<usize>,
    pos: Vec<Option<usize>>,
    binv: Vec<Vec<S>>,
    xb: Vec<S>,
    pivots: usize,
    since_refactor: usize,
    phase_one_done: bool,
}

const REFACTOR_EVERY: usize = 64;
const DEGENERATE_SWITCH: usize = 40;
const MAX_PIVOTS: usize = 2_000_000;

impl<S: Num> Simplex<S> {
    /// Standard-form tableau with a slack or artificial basis.
    pub fn cold(lp: &LinearProgram) -> Self {
        let nvars = lp.num_vars();
        let m = lp.constraints.len();
        let mut cols: Vec<Vec<(usize, S)>> = vec![Vec::new(); nvars];
        let mut kinds: Vec<ColKind> = (0..nvars).map(ColKind::Structural).collect();
        let mut cost: Vec<S> = lp.objective.iter().map(S::from_rat).collect();
        let mut b = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        for (i, c) in lp.constraints.iter().enumerate() {
            let flip = c.rhs.is_negative();
            let sgn = |v: &Rational| if flip { S::from_rat(&-v) } else { S::from_rat(v) };
            for (j, a) in &c.terms {
                if !a.is_zero() {
                    cols[*j].push((i, sgn(a)));
                }
            }
            b.push(sgn(&c.rhs));
            let slack_coef = match c.sense {
                Sense::Le => Some(1i64),
                Sense::Ge => Some(-1),
                Sense::Eq => None,
            };
            let mut basic = None;
            if let Some(sc) = slack_coef {
                let v = if flip { -sc } else { sc };
                cols.push(vec![(i, S::from_rat(&rational::int(v)))]);
                kinds.push(ColKind::Slack(i));
                cost.push(S::zero());
                if v == 1 {
                    basic = Some(cols.len() - 1);
                }
            }
            if basic.is_none() {
                cols.push(vec![(i, S::one())]);
                kinds.push(ColKind::Artificial(i));
                cost.push(S::zero());
                basic = Some(cols.len() - 1);
            }
            basis.push(basic.expect("row has a basic column"));
        }
        let mut pos = vec![None; cols.len()];
        for (i, &j) in basis.iter().enumerate() {
            pos[j] = Some(i);
        }
        let binv = (0..m).map(|i| (0..m).map(|j| if i == j { S::one() } else { S::zero() }).collect()).collect();
        let xb = b.clone();
        let phase_one_done = !kinds.iter().enumerate().any(|(j, k)| matches!(k, ColKind::Artificial(_)) && pos[j].is_some());
        Self { nvars, cols, kinds, cost, b, basis, pos, binv, xb, pivots: 0, since_refactor: 0, phase_one_done }
    }

    /// Tableau for `lp` started from a basis given by column identities.
    /// Returns `None` when the basis is singular or does not match the program.
    pub fn warm(lp: &LinearProgram, basis_kinds: &[ColKind]) -> Option<Self> {
        let mut s = Self::cold(lp);
        if basis_kinds.len() != s.b.len() {
            return None;
        }
        let mut basis = Vec::with_capacity(basis_kinds.len());
        for k in basis_kinds {
            basis.push(s.kinds.iter().position(|x| x == k)?);
        }
        let mut seen = vec![false; s.cols.len()];
        for &j in &basis {
            if std::mem::replace(&mut seen[j], true) {
                return None;
            }
        }
        s.basis = basis;
        s.pos = vec![None; s.cols.len()];
        for (i, &j) in s.basis.iter().enumerate() {
            s.pos[j] = Some(i);
        }
        if !s.refactor() {
            return None;
        }
        s.phase_one_done = true;
        Some(s)
    }

    pub fn rows(&self) -> usize {
        self.b.len()
    }

    pub fn pivots(&self) -> usize {
        self.pivots
    }

    pub fn basis_kinds(&self) -> Vec<ColKind> {
        self.basis.iter().map(|&j| self.kinds[j]).collect()
    }

    fn is_artificial(&self, j: usize) -> bool {
        matches!(self.kinds[j], ColKind::Artificial(_))
    }

    /// Recomputes the basis inverse by Gauss-Jordan elimination; false if singular.
    fn refactor(&mut self) -> bool {
        let m = self.b.len();
        let mut mat: Vec<Vec<S>> = vec![vec![S::zero(); m]; m];
        for (c, &j) in self.basis.iter().enumerate() {
            for (i, a) in &self.cols[j] {
                mat[*i][c] = a.clone();
            }
        }
        let mut inv: Vec<Vec<S>> =
            (0..m).map(|i| (0..m).map(|j| if i == j { S::one() } else { S::zero() }).collect()).collect();
        for col in 0..m {
            let mut piv = None;
            let mut best = S::zero();
            for row in col..m {
                if mat[row][col].is_nz() {
                    if S::exact() {
                        piv = Some(row);
                        break;
                    }
                    let a = mat[row][col].abs_val();
                    if piv.is_none() || a > best {
                        best = a;
                        piv = Some(row);
                    }
                }
            }
            let Some(p) = piv else { return false };
            mat.swap(p, col);
            inv.swap(p, col);
            let d = mat[col][col].clone();
            for x in mat[col].iter_mut() {
                if x.is_nz() {
                    *x = x.div(&d);
                }
            }
            for x in inv[col].iter_mut() {
                if x.is_nz() {
                    *x = x.div(&d);
                }
            }
            let prow = mat[col].clone();
            let pinv = inv[col].clone();
            let pnz: Vec<usize> = (0..m).filter(|&j| prow[j].is_nz()).collect();
            let inz: Vec<usize> = (0..m).filter(|&j| pinv[j].is_nz()).collect();
            for row in 0..m {
                if row == col || !mat[row][col].is_nz() {
                    continue;
                }
                let f = mat[row][col].clone();
                for &j in &pnz {
                    mat[row][j].sub_mul(&f, &prow[j]);
                }
                for &j in &inz {
                    inv[row][j].sub_mul(&f, &pinv[j]);
                }
            }
        }
        // Columns were eliminated in basis order, so `inv` maps rows to basis positions.
        self.binv = inv;
        self.recompute_xb();
        self.since_refactor = 0;
        true
    }

    fn recompute_xb(&mut self) {
        let m = self.b.len();
        let bnz: Vec<usize> = (0..m).filter(|&i| self.b[i].is_nz()).collect();
        self.xb = (0..m)
            .map(|i| {
                let mut acc = S::zero();
                for &k in &bnz {
                    if self.binv[i][k].is_nz() {
                        acc = acc.add(&self.binv[i][k].mul(&self.b[k]));
                    }
                }
                acc
            })
            .collect();
    }

    fn duals(&self, cost: &[S]) -> Vec<S> {
        let m = self.b.len();
        let mut y = vec![S::zero(); m];
        for (i, &j) in self.basis.iter().enumerate() {
            let c = &cost[j];
            if !c.is_nz() {
                continue;
            }
            for (k, yk) in y.iter_mut().enumerate() {
                let v = &self.binv[i][k];
                if v.is_nz() {
                    *yk = yk.add(&c.mul(v));
                }
            }
        }
        y
    }

    fn reduced_cost(&self, cost: &[S], y: &[S], j: usize) -> S {
        let mut d = cost[j].clone();
        for (i, a) in &self.cols[j] {
            if y[*i].is_nz() {
                d.sub_mul(&y[*i], a);
            }
        }
        d
    }

    fn column(&self, j: usize) -> Vec<S> {
        let m = self.b.len();
        let mut alpha = vec![S::zero(); m];
        for (k, a) in &self.cols[j] {
            for (i, al) in alpha.iter_mut().enumerate() {
                let v = &self.binv[i][*k];
                if v.is_nz() {
                    *al = al.add(&v.mul(a));
                }
            }
        }
        alpha
    }

    fn pivot(&mut self, r: usize, q: usize, alpha: &[S]) {
        let m = self.b.len();
        let piv = alpha[r].clone();
        for x in self.binv[r].iter_mut() {
            if x.is_nz() {
                *x = x.div(&piv);
            }
        }
        self.xb[r] = self.xb[r].div(&piv);
        let prow = self.binv[r].clone();
        let nz: Vec<usize> = (0..m).filter(|&j| prow[j].is_nz()).collect();
        let xr = self.xb[r].clone();
        for i in 0..m {
            if i == r || !alpha[i].is_nz() {
                continue;
            }
            let f = &alpha[i];
            for &j in &nz {
                self.binv[i][j].sub_mul(f, &prow[j]);
            }
            self.xb[i].sub_mul(f, &xr);
        }
        let old = self.basis[r];
        self.pos[old] = None;
        self.basis[r] = q;
        self.pos[q] = Some(r);
        self.pivots += 1;
        self.since_refactor += 1;
        if !S::exact() {
            for x in self.xb.iter_mut() {
                if !x.is_nz() {
                    *x = S::zero();
                }
            }
            if self.since_refactor >= REFACTOR_EVERY {
                self.refactor();
            }
        }
    }

    /// Primal simplex on the given costs; artificial columns never enter.
    fn primal(&mut self, cost: &[S]) -> Result<Outcome> {
        let mut degenerate = 0usize;
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(Error::Internal("simplex pivot limit reached".into()));
            }
            let bland = degenerate >= DEGENERATE_SWITCH;
            let y = self.duals(cost);
            let mut enter: Option<(usize, S)> = None;
            for j in 0..self.cols.len() {
                if self.pos[j].is_some() || self.is_artificial(j) {
                    continue;
                }
                let d = self.reduced_cost(cost, &y, j);
                if !d.is_neg() {
                    continue;
                }
                if bland {
                    enter = Some((j, d));
                    break;
                }
                if enter.as_ref().is_none_or(|(_, best)| d < *best) {
                    enter = Some((j, d));
                }
            }
            let Some((q, _)) = enter else { return Ok(Outcome::Optimal) };
            let alpha = self.column(q);
            let mut leave: Option<(usize, S)> = None;
            for i in 0..alpha.len() {
                let ratio = if alpha[i].is_pos() {
                    let x = if self.xb[i].is_neg() { S::zero() } else { self.xb[i].clone() };
                    x.div(&alpha[i])
                } else if alpha[i].is_neg() && self.is_artificial(self.basis[i]) && !self.xb[i].is_nz() {
                    S::zero()
                } else {
                    continue;
                };
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        let diff = ratio.sub(lr);
                        if diff.is_neg() {
                            true
                        } else if diff.is_nz() {
                            false
                        } else if bland {
                            self.basis[i] < self.basis[*li]
                        } else {
                            alpha[i].abs_val() > alpha[*li].abs_val()
                        }
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, step)) = leave else { return Ok(Outcome::Unbounded) };
            if step.is_nz() {
                degenerate = 0;
            } else {
                degenerate += 1;
            }
            self.pivot(r, q, &alpha);
        }
    }

    /// Dual simplex from a dual-feasible basis until the basic values are nonnegative.
    fn dual(&mut self) -> Result<Outcome> {
        let cost = self.cost.clone();
        let mut degenerate = 0usize;
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(Error::Internal("simplex pivot limit reached".into()));
            }
            let bland = degenerate >= DEGENERATE_SWITCH;
            let mut leave: Option<usize> = None;
            for i in 0..self.xb.len() {
                if !self.xb[i].is_neg() {
                    continue;
                }
                match leave {
                    None => leave = Some(i),
                    Some(l) => {
                        let take = if bland { self.basis[i] < self.basis[l] } else { self.xb[i] < self.xb[l] };
                        if take {
                            leave = Some(i);
                        }
                    }
                }
            }
            let Some(r) = leave else { return Ok(Outcome::Optimal) };
            let y = self.duals(&cost);
            let rho = self.binv[r].clone();
            let mut enter: Option<(usize, S, S)> = None;
            for j in 0..self.cols.len() {
                if self.pos[j].is_some() || self.is_artificial(j) {
                    continue;
                }
                let mut a = S::zero();
                for (i, v) in &self.cols[j] {
                    if rho[*i].is_nz() {
                        a = a.add(&rho[*i].mul(v));
                    }
                }
                if !a.is_neg() {
                    continue;
                }
                let mut d = self.reduced_cost(&cost, &y, j);
                if d.is_neg() {
                    d = S::zero();
                }
                let ratio = d.div(&a.neg());
                let take = match &enter {
                    None => true,
                    Some((_, br, ba)) => {
                        let diff = ratio.sub(br);
                        if diff.is_neg() {
                            true
                        } else if diff.is_nz() {
                            false
                        } else {
                            !bland && a.abs_val() > ba.abs_val()
                        }
                    }
                };
                if take {
                    enter = Some((j, ratio, a));
                }
            }
            let Some((q, ratio, _)) = enter else { return Ok(Outcome::Infeasible) };
            if ratio.is_nz() {
                degenerate = 0;
            } else {
                degenerate += 1;
            }
            let alpha = self.column(q);
            self.pivot(r, q, &alpha);
        }
    }

    fn phase_one(&mut self) -> Result<Outcome> {
        if self.phase_one_done {
            return Ok(Outcome::Optimal);
        }
        let c1: Vec<S> =
            (0..self.cols.len()).map(|j| if self.is_artificial(j) { S::one() } else { S::zero() }).collect();
        // Artificials may leave but never re-enter; phase one is bounded below by zero.
        self.primal(&c1)?;
        let infeas = self
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &j)| self.is_artificial(j))
            .fold(S::zero(), |acc, (i, _)| acc.add(&self.xb[i]));
        if infeas.is_pos() {
            return Ok(Outcome::Infeasible);
        }
        for r in 0..self.b.len() {
            if !self.is_artificial(self.basis[r]) {
                continue;
            }
            let rho = self.binv[r].clone();
            let mut found = None;
            for j in 0..self.cols.len() {
                if self.pos[j].is_some() || self.is_artificial(j) {
                    continue;
                }
                let mut a = S::zero();
                for (i, v) in &self.cols[j] {
                    if rho[*i].is_nz() {
                        a = a.add(&rho[*i].mul(v));
                    }
                }
                if a.is_nz() {
                    found = Some(j);
                    break;
                }
            }
            if let Some(q) = found {
                let alpha = self.column(q);
                self.pivot(r, q, &alpha);
            }
        }
        self.phase_one_done = true;
        Ok(Outcome::Optimal)
    }

    fn primal_feasible(&self) -> bool {
        self.xb.iter().enumerate().all(|(i, x)| {
            !x.is_neg() && (!self.is_artificial(self.basis[i]) || !x.is_nz())
        })
    }

    fn dual_feasible(&self) -> bool {
        let y = self.duals(&self.cost);
        (0..self.cols.len())
            .filter(|&j| self.pos[j].is_none() && !self.is_artificial(j))
            .all(|j| !self.reduced_cost(&self.cost, &y, j).is_neg())
    }

    /// Runs to optimality from whatever basis the tableau holds.
    pub fn solve(&mut self) -> Result<Outcome> {
        if !self.phase_one_done {
            if self.phase_one()? == Outcome::Infeasible {
                return Ok(Outcome::Infeasible);
            }
        } else if !self.primal_feasible() {
            let artificial_off = self
                .basis
                .iter()
                .enumerate()
                .any(|(i, &j)| self.is_artificial(j) && self.xb[i].is_nz());
            if artificial_off || !self.dual_feasible() {
                return Err(Error::Internal("basis is neither primal nor dual feasible".into()));
            }
            if self.dual()? == Outcome::Infeasible {
                return Ok(Outcome::Infeasible);
            }
        }
        let cost = self.cost.clone();
        self.primal(&cost)
    }

    /// Appends an inequality row, keeping the current basis plus the new row's slack.
    pub fn add_row(&mut self, c: &Constraint) -> Result<()> {
        let coef: i64 = match c.sense {
            Sense::Ge => -1,
            Sense::Le => 1,
            Sense::Eq => return Err(Error::InvalidArgument("only inequality rows can be appended".into())),
        };
        let r = self.b.len();
        let m = r + 1;
        let mut dense = vec![S::zero(); self.nvars];
        for (j, a) in &c.terms {
            let v = S::from_rat(a);
            dense[*j] = dense[*j].add(&v);
        }
        for (j, a) in dense.iter().enumerate() {
            if a.is_nz() {
                self.cols[j].push((r, a.clone()));
            }
        }
        let s = S::from_rat(&rational::int(coef));
        self.cols.push(vec![(r, s.clone())]);
        self.kinds.push(ColKind::Slack(r));
        self.cost.push(S::zero());
        self.pos.push(None);
        self.b.push(S::from_rat(&c.rhs));
        // New inverse row: s^{-1} (e_new - a_B^T B^{-1}).
        let mut new_row = vec![S::zero(); m];
        for (i, &j) in self.basis.iter().enumerate() {
            let a = if j < self.nvars { dense[j].clone() } else { S::zero() };
            if !a.is_nz() {
                continue;
            }
            for k in 0..r {
                let v = &self.binv[i][k];
                if v.is_nz() {
                    new_row[k] = new_row[k].sub(&a.mul(v));
                }
            }
        }
        for x in new_row.iter_mut() {
            *x = x.div(&s);
        }
        new_row[r] = S::one().div(&s);
        for row in self.binv.iter_mut() {
            row.push(S::zero());
        }
        self.binv.push(new_row);
        let mut val = S::from_rat(&c.rhs);
        for (i, &j) in self.basis.iter().enumerate() {
            if j < self.nvars && dense[j].is_nz() {
                val = val.sub(&dense[j].mul(&self.xb[i]));
            }
        }
        self.xb.push(val.div(&s));
        let slack = self.cols.len() - 1;
        self.basis.push(slack);
        self.pos[slack] = Some(r);
        Ok(())
    }

    /// Re-optimizes after rows were appended to an optimal tableau.
    pub fn reoptimize(&mut self) -> Result<Outcome> {
        if self.dual()? == Outcome::Infeasible {
            return Ok(Outcome::Infeasible);
        }
        let cost = self.cost.clone();
        self.primal(&cost)
    }

    /// Values of the structural variables at the current basis.
    pub fn values(&self) -> Vec<S> {
        let mut x = vec![S::zero(); self.nvars];
        for (i, &j) in self.basis.iter().enumerate() {
            if j < self.nvars {
                x[j] = if self.xb[i].is_neg() { S::zero() } else { self.xb[i].clone() };
            }
        }
        x
    }

    pub fn objective(&self) -> S {
        self.basis
            .iter()
            .enumerate()
            .fold(S::zero(), |acc, (i, &j)| if self.cost[j].is_nz() { acc.add(&self.cost[j].mul(&self.xb[i])) } else { acc })
    }
}
