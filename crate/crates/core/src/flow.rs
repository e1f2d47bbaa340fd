//! Dinic max-flow over integer or exact rational capacities.

use std::collections::VecDeque;
use std::ops::{Add, Sub};

use num_traits::Zero;

/// Capacity values usable by [`FlowNetwork`].
pub trait Capacity: Clone + Ord + Zero + Add<Output = Self> + Sub<Output = Self> {}

impl<T: Clone + Ord + Zero + Add<Output = T> + Sub<Output = T>> Capacity for T {}

#[derive(Debug, Clone)]
struct Edge<C> {
    to: usize,
    cap: C,
}

/// Residual network; edge `2i` and its reverse `2i + 1`.
#[derive(Debug, Clone)]
pub struct FlowNetwork<C: Capacity> {
    edges: Vec<Edge<C>>,
    adj: Vec<Vec<usize>>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl<C: Capacity> FlowNetwork<C> {
    pub fn new(n: usize) -> Self {
        Self { edges: Vec::new(), adj: vec![Vec::new(); n], level: vec![0; n], iter: vec![0; n] }
    }

    pub fn add_edge(&mut self, u: usize, v: usize, cap: C) {
        if u == v || cap.is_zero() {
            return;
        }
        self.adj[u].push(self.edges.len());
        self.edges.push(Edge { to: v, cap });
        self.adj[v].push(self.edges.len());
        self.edges.push(Edge { to: u, cap: C::zero() });
    }

    fn bfs(&mut self, s: usize) {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &e in &self.adj[u] {
                let Edge { to, cap } = &self.edges[e];
                if !cap.is_zero() && self.level[*to] < 0 {
                    self.level[*to] = self.level[u] + 1;
                    q.push_back(*to);
                }
            }
        }
    }

    fn dfs(&mut self, u: usize, t: usize, limit: Option<C>) -> C {
        if u == t {
            return limit.expect("sink reached with a finite bottleneck");
        }
        while self.iter[u] < self.adj[u].len() {
            let e = self.adj[u][self.iter[u]];
            let to = self.edges[e].to;
            if !self.edges[e].cap.is_zero() && self.level[to] == self.level[u] + 1 {
                let cap = self.edges[e].cap.clone();
                let bound = match &limit {
                    Some(l) if *l < cap => l.clone(),
                    _ => cap,
                };
                let pushed = self.dfs(to, t, Some(bound));
                if !pushed.is_zero() {
                    self.edges[e].cap = self.edges[e].cap.clone() - pushed.clone();
                    self.edges[e ^ 1].cap = self.edges[e ^ 1].cap.clone() + pushed.clone();
                    return pushed;
                }
            }
            self.iter[u] += 1;
        }
        C::zero()
    }

    /// Maximum `s → t` flow; the network keeps the residual capacities afterwards.
    pub fn max_flow(&mut self, s: usize, t: usize) -> C {
        let mut total = C::zero();
        if s == t {
            return total;
        }
        loop {
            self.bfs(s);
            if self.level[t] < 0 {
                return total;
            }
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let f = self.dfs(s, t, None);
                if f.is_zero() {
                    break;
                }
                total = total + f;
            }
        }
    }

    /// Nodes reachable from `s` in the residual network (source side of a min cut).
    pub fn source_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &e in &self.adj[u] {
                let Edge { to, cap } = &self.edges[e];
                if !cap.is_zero() && !seen[*to] {
                    seen[*to] = true;
                    stack.push(*to);
                }
            }
        }
        seen
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, Rational};

    #[test]
    fn integer_flow_and_cut() {
        let mut g: FlowNetwork<u64> = FlowNetwork::new(4);
        g.add_edge(0, 1, 3);
        g.add_edge(0, 2, 2);
        g.add_edge(1, 2, 1);
        g.add_edge(1, 3, 2);
        g.add_edge(2, 3, 3);
        assert_eq!(g.max_flow(0, 3), 5);
        let side = g.source_side(0);
        assert!(side[0] && !side[3]);
    }

    #[test]
    fn rational_flow() {
        let mut g: FlowNetwork<Rational> = FlowNetwork::new(3);
        g.add_edge(0, 1, frac(1, 2));
        g.add_edge(1, 2, frac(1, 3));
        g.add_edge(0, 2, frac(1, 4));
        assert_eq!(g.max_flow(0, 2), frac(7, 12));
    }

    #[test]
    fn disconnected_is_zero() {
        let mut g: FlowNetwork<u64> = FlowNetwork::new(3);
        g.add_edge(1, 0, 4);
        assert_eq!(g.max_flow(0, 2), 0);
    }
}
