//! Shared pieces of the routing formulations: root groups, arc metrics and min-cut separation.

use num_traits::Zero;

use crate::flow::FlowNetwork;
use crate::instance::MetricInstance;
use crate::rational::{self, Rational};

/// Vehicles that start at the same node; they are interchangeable in every formulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootGroup {
    pub root: usize,
    pub vehicles: Vec<usize>,
}

impl RootGroup {
    pub fn size(&self) -> usize {
        self.vehicles.len()
    }
}

/// Groups vehicles by depot node, in order of first appearance.
pub fn root_groups(inst: &MetricInstance) -> Vec<RootGroup> {
    let mut groups: Vec<RootGroup> = Vec::new();
    for (i, &r) in inst.roots().iter().enumerate() {
        match groups.iter_mut().find(|g| g.root == r) {
            Some(g) => g.vehicles.push(i),
            None => groups.push(RootGroup { root: r, vehicles: vec![i] }),
        }
    }
    groups
}

/// Which arc lengths a formulation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcMetric {
    /// `c(u,v)`.
    Plain,
    /// `c(u,v) + d(v)`: a rooted tree directed away from the root costs its mixed length.
    ServiceDirected,
    /// `c(u,v) + (d(u) + d(v)) / 2`.
    ServiceHalf,
}

impl ArcMetric {
    /// The metric LP3-style arc formulations use for this instance.
    pub fn for_arcs(inst: &MetricInstance) -> Self {
        if inst.has_service() {
            ArcMetric::ServiceDirected
        } else {
            ArcMetric::Plain
        }
    }

    /// The metric path-column formulations use for this instance.
    pub fn for_paths(inst: &MetricInstance) -> Self {
        if inst.has_service() {
            ArcMetric::ServiceHalf
        } else {
            ArcMetric::Plain
        }
    }
}

/// Dense directed cost matrix under `metric`.
pub fn arc_costs(inst: &MetricInstance, metric: ArcMetric) -> Vec<Vec<Rational>> {
    let n = inst.n();
    (0..n)
        .map(|u| {
            (0..n)
                .map(|v| {
                    if u == v {
                        return Rational::zero();
                    }
                    match metric {
                        ArcMetric::Plain => rational::int(inst.c(u, v)),
                        ArcMetric::ServiceDirected => rational::int(inst.service_arc_cost(u, v)),
                        ArcMetric::ServiceHalf => inst.half_service_cost(u, v),
                    }
                })
                .collect()
        })
        .collect()
}

/// Minimum `s → t` cut under arc capacities; returns its value and the sink side.
pub(crate) fn min_cut(n: usize, arcs: &[(usize, usize, Rational)], s: usize, t: usize) -> (Rational, Vec<bool>) {
    let mut net: FlowNetwork<Rational> = FlowNetwork::new(n);
    for (u, v, c) in arcs {
        net.add_edge(*u, *v, c.clone());
    }
    let f = net.max_flow(s, t);
    let side = net.source_side(s);
    (f, side.into_iter().map(|b| !b).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn groups_merge_duplicate_roots() {
        let inst = MetricInstance::on_line(&[0, 1, 3, 4], &[0, 3, 0]).unwrap();
        let g = root_groups(&inst);
        assert_eq!(g, vec![RootGroup { root: 0, vehicles: vec![0, 2] }, RootGroup { root: 3, vehicles: vec![1] }]);
    }

    #[test]
    fn service_metrics() {
        let inst = MetricInstance::on_line(&[0, 1, 3], &[0]).unwrap().with_service(vec![0, 2, 1]).unwrap();
        let d = arc_costs(&inst, ArcMetric::ServiceDirected);
        assert_eq!(d[0][1], int(3));
        assert_eq!(d[1][0], int(1));
        let h = arc_costs(&inst, ArcMetric::ServiceHalf);
        assert_eq!(h[1][2], frac(7, 2));
        assert_eq!(h[2][1], frac(7, 2));
    }

    #[test]
    fn cut_sides() {
        let arcs = vec![(0, 1, frac(1, 2)), (1, 2, int(1)), (0, 2, frac(1, 4))];
        let (f, sink) = min_cut(3, &arcs, 0, 2);
        assert_eq!(f, frac(3, 4));
        assert!(sink[2] && !sink[0]);
    }
}
