//! Approximation algorithms for the multi-depot k-vehicle minimum latency problem,
//! together with the arborescence packing, prize-collecting tree and LP machinery
//! they rely on, and brute-force oracles for checking their guarantees.

pub mod arb_packing;
pub mod concat_graph;
pub mod error;
pub mod flow;
pub mod generate;
pub mod instance;
pub mod lp;
pub mod oracles;
pub mod pc_tree;
pub mod rational;
pub mod solvers;
pub mod tours;

pub use error::{Error, Result};
pub use instance::{evaluate_plan, parse_instance, time_horizon, MetricInstance, RoutePlan, TimeHorizon};
pub use rational::Rational;
