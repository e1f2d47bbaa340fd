//! Lower-envelope curves and shortest paths in the concatenation graph.
//!
//! The concatenation graph on nodes `1..=n` has an arc `(o, l)` for `o < l` of length
//! `C_l * (n - (o + l)/2)`. A path `1 = l_0 < ... < l_h = n` models running partial tours
//! of cost `C_{l_1}, C_{l_2}, ...` one after another.

use std::cmp::Ordering;
use std::sync::OnceLock;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

fn mu_residual(mu: f64) -> f64 {
    mu * mu.ln() - mu - 1.0
}

/// Root of `μ ln μ = μ + 1` by bisection on `[3, 4]`, to residual at most `tolerance`.
pub fn mu_star(tolerance: f64) -> f64 {
    let (mut lo, mut hi) = (3.0f64, 4.0f64);
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let r = mu_residual(mid);
        if r.abs() <= tolerance || hi - lo <= f64::EPSILON * 4.0 {
            break;
        }
        if r > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    mid
}

/// `μ*` to residual `1e-12`, computed once.
pub fn mu() -> f64 {
    static MU: OnceLock<f64> = OnceLock::new();
    *MU.get_or_init(|| mu_star(1e-12))
}

/// Length of arc `(o, l)` in `CG(C_1..C_n)`; indices are 1-based.
pub fn edge_length(c: &[Rational], n: usize, o: usize, l: usize) -> Result<Rational> {
    if !(1 <= o && o < l && l <= n && l <= c.len()) {
        return Err(Error::InvalidArgument(format!("arc ({o},{l}) outside 1..={n}")));
    }
    Ok(arc_length(&c[l - 1], n as i64, o as i64, l as i64))
}

fn arc_length(cost: &Rational, total: i64, o: i64, l: i64) -> Rational {
    cost * rational::frac(2 * total - o - l, 2)
}

/// Lower convex hull of a set of (coverage, cost) points.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeCurve {
    points: Vec<(i64, Rational)>,
    corners: Vec<(i64, Rational)>,
}

fn cross(o: &(i64, Rational), a: &(i64, Rational), b: &(i64, Rational)) -> Rational {
    let ax = rational::int(a.0 - o.0);
    let bx = rational::int(b.0 - o.0);
    ax * (&b.1 - &o.1) - (&a.1 - &o.1) * bx
}

/// Builds the lower envelope; at equal coverage only the cheapest point can be a corner.
pub fn lower_envelope(points: &[(i64, Rational)]) -> Result<EnvelopeCurve> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("empty point set".into()));
    }
    let mut sorted: Vec<(i64, Rational)> = points.to_vec();
    sorted.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    sorted.dedup_by(|b, a| a.0 == b.0);
    let mut hull: Vec<(i64, Rational)> = Vec::new();
    for p in sorted {
        while hull.len() >= 2 && !cross(&hull[hull.len() - 2], &hull[hull.len() - 1], &p).is_positive() {
            hull.pop();
        }
        hull.push(p);
    }
    Ok(EnvelopeCurve { points: points.to_vec(), corners: hull })
}

impl EnvelopeCurve {
    pub fn points(&self) -> &[(i64, Rational)] {
        &self.points
    }

    pub fn corners(&self) -> &[(i64, Rational)] {
        &self.corners
    }

    pub fn domain(&self) -> (i64, i64) {
        (self.corners[0].0, self.corners[self.corners.len() - 1].0)
    }

    pub fn is_corner(&self, x: i64) -> bool {
        self.corners.iter().any(|c| c.0 == x)
    }

    /// `f(x)` by interpolation between bracketing corners; `None` outside the domain.
    pub fn evaluate(&self, x: &Rational) -> Option<Rational> {
        let (lo, hi) = self.domain();
        if *x < rational::int(lo) || *x > rational::int(hi) {
            return None;
        }
        for w in self.corners.windows(2) {
            let (x0, x1) = (rational::int(w[0].0), rational::int(w[1].0));
            if *x <= x1 {
                let t = (x - &x0) / (&x1 - &x0);
                return Some(&w[0].1 + (&w[1].1 - &w[0].1) * t);
            }
        }
        Some(self.corners[0].1.clone())
    }

    pub fn evaluate_int(&self, x: i64) -> Option<Rational> {
        self.evaluate(&rational::int(x))
    }
}

/// Exact integral of the envelope over `[lo, hi]`.
pub fn envelope_integral(curve: &EnvelopeCurve, lo: &Rational, hi: &Rational) -> Result<Rational> {
    if lo > hi {
        return Err(Error::InvalidArgument("integration range is reversed".into()));
    }
    let (fl, fh) = (curve.evaluate(lo), curve.evaluate(hi));
    if fl.is_none() || fh.is_none() {
        return Err(Error::InvalidArgument("integration range outside the curve domain".into()));
    }
    let mut xs: Vec<Rational> = vec![lo.clone()];
    for c in curve.corners() {
        let cx = rational::int(c.0);
        if cx > *lo && cx < *hi {
            xs.push(cx);
        }
    }
    xs.push(hi.clone());
    let mut total = Rational::zero();
    for w in xs.windows(2) {
        let a = curve.evaluate(&w[0]).expect("inside domain");
        let b = curve.evaluate(&w[1]).expect("inside domain");
        total += (a + b) * (&w[1] - &w[0]) / rational::int(2);
    }
    Ok(total)
}

/// A path `1 = l_0 < ... < l_h = N` in the concatenation graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcatPath {
    pub nodes: Vec<i64>,
    pub length: Rational,
}

fn better(a: &(Rational, Vec<i64>), b: &(Rational, Vec<i64>)) -> bool {
    match a.0.cmp(&b.0) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => match a.1.len().cmp(&b.1.len()) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => a.1 < b.1,
        },
    }
}

/// Shortest path from coverage 1 to `total` whose nodes are corners of `curve`.
/// The arc `(o, l)` costs `f(l) * (total - (o + l)/2)`. Ties prefer fewer hops, then the
/// lexicographically smaller node sequence.
pub fn shortest_path_over_corners(curve: &EnvelopeCurve, total: i64) -> Result<ConcatPath> {
    let corners = curve.corners();
    if corners[0].0 != 1 || !corners[0].1.is_zero() {
        return Err(Error::InvalidArgument("envelope must start at the point (1, 0)".into()));
    }
    let last = corners.len() - 1;
    if corners[last].0 != total {
        return Err(Error::InvalidArgument(format!("envelope must end at coverage {total}")));
    }
    let mut best: Vec<Option<(Rational, Vec<i64>)>> = vec![None; corners.len()];
    best[0] = Some((Rational::zero(), vec![1]));
    for j in 1..corners.len() {
        for i in 0..j {
            let Some((len_i, path_i)) = &best[i] else { continue };
            let cand_len = len_i + arc_length(&corners[j].1, total, corners[i].0, corners[j].0);
            let mut cand_path = path_i.clone();
            cand_path.push(corners[j].0);
            let cand = (cand_len, cand_path);
            if best[j].as_ref().is_none_or(|b| better(&cand, b)) {
                best[j] = Some(cand);
            }
        }
    }
    let (length, nodes) = best[last].clone().expect("last corner reachable");
    Ok(ConcatPath { nodes, length })
}

fn check_sequence(c: &[Rational]) -> Result<()> {
    if c.is_empty() {
        return Err(Error::InvalidArgument("empty cost sequence".into()));
    }
    if !c[0].is_zero() {
        return Err(Error::InvalidArgument("C_1 must be 0".into()));
    }
    if c.iter().any(|v| v.is_negative()) {
        return Err(Error::InvalidArgument("costs must be nonnegative".into()));
    }
    Ok(())
}

/// Exact shortest `1 ⇝ n` path in `CG(C_1..C_n)`, searched over extreme points only.
pub fn shortest_concat_path(c: &[Rational]) -> Result<ConcatPath> {
    check_sequence(c)?;
    let points: Vec<(i64, Rational)> = c.iter().enumerate().map(|(i, v)| (i as i64 + 1, v.clone())).collect();
    let curve = lower_envelope(&points)?;
    shortest_path_over_corners(&curve, c.len() as i64)
}

/// Shortest path over all `n` nodes, without the extreme-point restriction.
pub fn shortest_concat_path_full(c: &[Rational]) -> Result<ConcatPath> {
    check_sequence(c)?;
    let n = c.len();
    let mut best: Vec<Option<(Rational, Vec<i64>)>> = vec![None; n];
    best[0] = Some((Rational::zero(), vec![1]));
    for j in 1..n {
        for i in 0..j {
            let (len_i, path_i) = best[i].as_ref().expect("all earlier nodes reachable");
            let cand_len = len_i + arc_length(&c[j], n as i64, i as i64 + 1, j as i64 + 1);
            let mut cand_path = path_i.clone();
            cand_path.push(j as i64 + 1);
            let cand = (cand_len, cand_path);
            if best[j].as_ref().is_none_or(|b| better(&cand, b)) {
                best[j] = Some(cand);
            }
        }
    }
    let (length, nodes) = best[n - 1].clone().expect("reachable");
    Ok(ConcatPath { nodes, length })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn seq(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn mu_star_solves_its_equation() {
        let mu = mu_star(1e-9);
        assert!(mu_residual(mu).abs() <= 1e-9);
        assert!((mu - 3.59112).abs() < 1e-5);
        assert!(mu < 3.5912);
        let coarse = mu_star(0.5);
        assert!(mu_residual(coarse).abs() <= 0.5 && (3.0..=4.0).contains(&coarse));
    }

    #[test]
    fn edge_lengths() {
        let c = seq(&[0, 2, 6]);
        assert_eq!(edge_length(&c, 3, 1, 2).unwrap(), int(3));
        assert_eq!(edge_length(&c, 3, 1, 3).unwrap(), int(6));
        assert_eq!(edge_length(&c, 3, 2, 3).unwrap(), int(3));
        assert!(edge_length(&c, 3, 2, 2).is_err());
        assert!(edge_length(&c, 3, 0, 2).is_err());
    }

    #[test]
    fn envelopes() {
        let convex = lower_envelope(&[(1, int(0)), (2, int(2)), (3, int(6))]).unwrap();
        assert_eq!(convex.corners().len(), 3);
        let chord = lower_envelope(&[(1, int(0)), (2, int(5)), (3, int(6))]).unwrap();
        assert_eq!(chord.corners(), &[(1, int(0)), (3, int(6))]);
        assert_eq!(chord.evaluate_int(2).unwrap(), int(3));
        let dup = lower_envelope(&[(1, int(0)), (2, int(2)), (2, int(1))]).unwrap();
        assert_eq!(dup.corners(), &[(1, int(0)), (2, int(1))]);
        assert!(lower_envelope(&[]).is_err());
        let collinear = lower_envelope(&[(1, int(0)), (2, int(1)), (3, int(2))]).unwrap();
        assert_eq!(collinear.corners().len(), 2);
    }

    #[test]
    fn integrals() {
        let chord = lower_envelope(&[(1, int(0)), (3, int(6))]).unwrap();
        assert_eq!(envelope_integral(&chord, &int(1), &int(3)).unwrap(), int(6));
        let convex = lower_envelope(&[(1, int(0)), (2, int(2)), (3, int(6))]).unwrap();
        assert_eq!(envelope_integral(&convex, &int(1), &int(3)).unwrap(), int(5));
        assert_eq!(envelope_integral(&convex, &frac(3, 2), &frac(3, 2)).unwrap(), int(0));
        assert!(envelope_integral(&convex, &int(0), &int(3)).is_err());
    }

    #[test]
    fn shortest_paths() {
        let p = shortest_concat_path(&seq(&[0, 2, 6])).unwrap();
        assert_eq!(p.length, int(6));
        assert_eq!(p.nodes, vec![1, 3]);
        let z = shortest_concat_path(&seq(&[0, 0, 0, 0])).unwrap();
        assert_eq!(z.length, int(0));
        assert_eq!(z.nodes, vec![1, 4]);
        let one = shortest_concat_path(&seq(&[0])).unwrap();
        assert_eq!(one.nodes, vec![1]);
        assert_eq!(one.length, int(0));
        assert!(shortest_concat_path(&seq(&[1, 2])).is_err());
    }
}
