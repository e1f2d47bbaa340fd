//! Random integer metric instances.

use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::instance::MetricInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    /// Shortest-path closure of a complete graph with random edge weights.
    Random,
    /// Distinct integer points on a line.
    EuclidLine,
    /// Integer points in a square, distances rounded up.
    EuclidPlane,
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(Self::Random),
            "euclid-line" => Ok(Self::EuclidLine),
            "euclid-plane" => Ok(Self::EuclidPlane),
            _ => Err(Error::InvalidArgument(format!("unknown metric kind `{s}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GenOptions {
    pub n: usize,
    pub k: usize,
    pub kind: MetricKind,
    /// Largest edge weight or coordinate.
    pub scale: i64,
    /// All vehicles start at node 0.
    pub single_depot: bool,
}

impl GenOptions {
    pub fn new(n: usize, k: usize, kind: MetricKind) -> Self {
        Self { n, k, kind, scale: 10, single_depot: false }
    }

    pub fn single_depot(mut self) -> Self {
        self.single_depot = true;
        self
    }

    pub fn scale(mut self, scale: i64) -> Self {
        self.scale = scale;
        self
    }
}

/// Cost matrix of the chosen kind with all off-diagonal entries at least 1.
pub fn random_metric<R: Rng>(rng: &mut R, n: usize, kind: MetricKind, scale: i64) -> Vec<Vec<i64>> {
    let scale = scale.max(1);
    match kind {
        MetricKind::Random => {
            let mut d = vec![vec![0i64; n]; n];
            for u in 0..n {
                for v in u + 1..n {
                    let w = rng.gen_range(1..=scale);
                    d[u][v] = w;
                    d[v][u] = w;
                }
            }
            for m in 0..n {
                for u in 0..n {
                    for v in 0..n {
                        let via = d[u][m] + d[m][v];
                        if via < d[u][v] {
                            d[u][v] = via;
                        }
                    }
                }
            }
            d
        }
        MetricKind::EuclidLine => {
            let span = (scale.max(n as i64)) as usize;
            let mut xs: Vec<i64> = (0..=span as i64).collect();
            xs.shuffle(rng);
            xs.truncate(n);
            (0..n).map(|u| (0..n).map(|v| (xs[u] - xs[v]).abs()).collect()).collect()
        }
        MetricKind::EuclidPlane => {
            let mut pts: Vec<(i64, i64)> = Vec::with_capacity(n);
            while pts.len() < n {
                let p = (rng.gen_range(0..=scale), rng.gen_range(0..=scale));
                if !pts.contains(&p) {
                    pts.push(p);
                }
            }
            let dist = |a: (i64, i64), b: (i64, i64)| {
                let sq = (a.0 - b.0).pow(2) + (a.1 - b.1).pow(2);
                let mut r = (sq as f64).sqrt().ceil() as i64;
                while r * r < sq {
                    r += 1;
                }
                while r > 0 && (r - 1) * (r - 1) >= sq {
                    r -= 1;
                }
                r
            };
            (0..n).map(|u| (0..n).map(|v| dist(pts[u], pts[v])).collect()).collect()
        }
    }
}

/// Random instance; vehicles start at nodes drawn from the first `k` nodes (duplicates allowed).
pub fn random_instance<R: Rng>(rng: &mut R, opts: &GenOptions) -> Result<MetricInstance> {
    if opts.n < 2 || opts.k < 1 || opts.k >= opts.n {
        return Err(Error::InvalidArgument(format!("need n ≥ 2 and 1 ≤ k < n, got n={} k={}", opts.n, opts.k)));
    }
    let cost = random_metric(rng, opts.n, opts.kind, opts.scale);
    let roots: Vec<usize> =
        (0..opts.k).map(|_| if opts.single_depot { 0 } else { rng.gen_range(0..opts.k) }).collect();
    let names = (0..opts.n).map(|i| format!("v{i}")).collect();
    MetricInstance::new(names, roots, cost, None, None, None)
}

/// Random weights in `1..=max_w` for clients.
pub fn random_weights<R: Rng>(rng: &mut R, inst: &MetricInstance, max_w: i64) -> Vec<i64> {
    (0..inst.n()).map(|v| if inst.is_root(v) { 1 } else { rng.gen_range(1..=max_w.max(1)) }).collect()
}

/// Random service times in `0..=max_d` for clients.
pub fn random_service<R: Rng>(rng: &mut R, inst: &MetricInstance, max_d: i64) -> Vec<i64> {
    (0..inst.n()).map(|v| if inst.is_root(v) { 0 } else { rng.gen_range(0..=max_d.max(0)) }).collect()
}

/// Random nonempty allowed-depot sets for clients.
pub fn random_allowed<R: Rng>(rng: &mut R, inst: &MetricInstance) -> Vec<Option<Vec<usize>>> {
    let roots = inst.distinct_roots();
    (0..inst.n())
        .map(|v| {
            if inst.is_root(v) {
                return None;
            }
            let mut pick: Vec<usize> = roots.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
            if pick.is_empty() {
                pick.push(*roots.choose(rng).expect("at least one root"));
            }
            Some(pick)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_metrics_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for kind in [MetricKind::Random, MetricKind::EuclidLine, MetricKind::EuclidPlane] {
            for n in 2..8 {
                let opts = GenOptions::new(n, 1.max(n / 3), kind);
                let inst = random_instance(&mut rng, &opts).unwrap();
                assert_eq!(inst.n(), n);
                let w = random_weights(&mut rng, &inst, 4);
                let d = random_service(&mut rng, &inst, 3);
                let a = random_allowed(&mut rng, &inst);
                inst.clone().with_weights(w).unwrap().with_service(d).unwrap().with_allowed(a).unwrap();
            }
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(random_instance(&mut rng, &GenOptions::new(3, 3, MetricKind::Random)).is_err());
        assert!("nope".parse::<MetricKind>().is_err());
    }
}
