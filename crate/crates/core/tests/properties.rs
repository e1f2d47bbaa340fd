use kmlp_core::arb_packing::{pack_arborescences, verify_packing, WeightedDigraph};
use kmlp_core::concat_graph::{lower_envelope, mu, shortest_concat_path};
use kmlp_core::generate::{random_allowed, random_instance, random_service, random_weights, GenOptions, MetricKind};
use kmlp_core::instance::route_latencies;
use kmlp_core::lp::pclp_for_instance;
use kmlp_core::oracles::{bnslb, exact_kmlp, exact_pc_paths};
use kmlp_core::pc_tree::{coverage_tree, uniform_pc_tree};
use kmlp_core::rational::{int, to_f64, Rational};
use kmlp_core::solvers::{solve, Algorithm, SolverConfig};
use kmlp_core::{evaluate_plan, time_horizon, Error, MetricInstance};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn kind(i: u8) -> MetricKind {
    [MetricKind::Random, MetricKind::EuclidLine, MetricKind::EuclidPlane][i as usize % 3]
}

fn instance(seed: u64, n: usize, k: usize, metric: u8, single: bool) -> MetricInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let opts = GenOptions::new(n, k.min(n - 1), kind(metric));
    let opts = if single { opts.single_depot() } else { opts };
    random_instance(&mut rng, &opts).unwrap()
}

fn variant(inst: MetricInstance, seed: u64, which: u8) -> MetricInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    match which % 4 {
        0 => inst,
        1 => {
            let w = random_weights(&mut rng, &inst, 4);
            inst.with_weights(w).unwrap()
        }
        2 => {
            let d = random_service(&mut rng, &inst, 3);
            inst.with_service(d).unwrap()
        }
        _ => {
            let a = random_allowed(&mut rng, &inst);
            inst.with_allowed(a).unwrap()
        }
    }
}

fn direct_lower_bound(inst: &MetricInstance) -> i64 {
    inst.clients()
        .into_iter()
        .map(|v| {
            let best = inst.allowed_roots(v).iter().map(|&r| inst.c(r, v)).min().unwrap();
            inst.weight(v) * (best + inst.service(v))
        })
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trivial_routes_do_not_change_latency(seed in any::<u64>(), n in 2usize..8, k in 1usize..4, m in 0u8..3) {
        let inst = instance(seed, n, k, m, false);
        let plan = time_horizon(&inst).plan;
        let base = evaluate_plan(&inst, &plan).unwrap();
        let mut padded = plan.clone();
        padded.routes.push(vec![inst.root(0)]);
        prop_assert_eq!(evaluate_plan(&inst, &padded).unwrap(), base);
    }

    #[test]
    fn horizon_certifies_its_plan(seed in any::<u64>(), n in 2usize..9, k in 1usize..4, m in 0u8..3, w in 0u8..4) {
        let inst = variant(instance(seed, n, k, m, false), seed, w);
        let h = time_horizon(&inst);
        let eval = evaluate_plan(&inst, &h.plan).unwrap();
        prop_assert!(eval.latency.iter().all(|&l| l <= h.t));
        for r in &h.plan.routes {
            prop_assert!(route_latencies(&inst, r).iter().all(|&l| l <= h.t));
        }
        prop_assert!(eval.total >= int(direct_lower_bound(&inst)));
    }

    #[test]
    fn concat_path_scales_linearly(c in proptest::collection::vec(0i64..=100, 1..20), lambda in 1i64..7) {
        let mut seq: Vec<Rational> = c.iter().map(|&x| int(x)).collect();
        seq[0] = int(0);
        let base = shortest_concat_path(&seq).unwrap();
        let scaled: Vec<Rational> = seq.iter().map(|x| x * int(lambda)).collect();
        let big = shortest_concat_path(&scaled).unwrap();
        prop_assert_eq!(&big.length, &(&base.length * int(lambda)));
        prop_assert_eq!(&big.nodes, &base.nodes);
        let points: Vec<(i64, Rational)> = seq.iter().enumerate().map(|(i, v)| (i as i64 + 1, v.clone())).collect();
        let curve = lower_envelope(&points).unwrap();
        let f_sum: Rational = (1..=seq.len() as i64).map(|l| curve.evaluate_int(l).unwrap()).sum();
        prop_assert!(to_f64(&base.length) <= mu() / 2.0 * to_f64(&f_sum) * (1.0 + 1e-12));
    }

    #[test]
    fn packing_meets_guarantees(
        arcs in proptest::collection::vec((0usize..5, 0usize..5, 1u64..=5), 0..14),
        k in 0u64..=4,
    ) {
        let n = 5;
        let mut w = vec![vec![0u64; n]; n];
        for &(u, v, x) in arcs.iter().filter(|a| a.0 != a.1) {
            w[u][v] = x;
        }
        // Make every non-root node at least as heavy inbound as outbound.
        for u in 1..n {
            let indeg: u64 = (0..n).map(|a| w[a][u]).sum();
            let outdeg: u64 = w[u].iter().sum();
            w[0][u] += outdeg.saturating_sub(indeg);
        }
        let list: Vec<(usize, usize, u64)> =
            (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).filter(|&(u, v)| w[u][v] > 0).map(|(u, v)| (u, v, w[u][v])).collect();
        let d = WeightedDigraph::from_arcs(n, &list);
        let fam = pack_arborescences(&d, 0, k).unwrap();
        let rep = verify_packing(&d, 0, k, &fam);
        prop_assert!(rep.passed(), "{:?}", rep.problems);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn uniform_tree_beats_path_collections(seed in any::<u64>(), n in 2usize..6, num in 0i64..30, den in 1i64..4) {
        let inst = instance(seed, n, 1, 0, true);
        let root = inst.root(0);
        let lambda = Rational::new(num.into(), den.into());
        let tree = uniform_pc_tree(&inst, root, &lambda).unwrap();
        let pi = vec![lambda.clone(); n];
        let paths = exact_pc_paths(&inst, root, &pi).unwrap();
        prop_assert!(tree.objective <= paths.value);
        let lp = pclp_for_instance(&inst, root, &pi).unwrap();
        prop_assert!(lp.lp.objective <= paths.value);
    }

    #[test]
    fn probed_trees_grow_with_lambda(seed in any::<u64>(), n in 3usize..7, b in 1usize..7) {
        let inst = instance(seed, n, 1, 0, true);
        let (_, log) = coverage_tree(&inst, inst.root(0), b.min(n)).unwrap();
        let mut probes: Vec<(Rational, usize)> = log.probes.iter().map(|(l, t)| (l.clone(), t.node_count())).collect();
        probes.sort();
        for w in probes.windows(2) {
            prop_assert!(w[0].1 <= w[1].1, "{:?}", probes);
        }
    }

    #[test]
    fn oracles_are_consistent(seed in any::<u64>(), n in 2usize..7, k in 1usize..3, w in 0u8..4) {
        let inst = variant(instance(seed, n, k, 0, false), seed, w);
        let exact = exact_kmlp(&inst).unwrap();
        prop_assert_eq!(&evaluate_plan(&inst, &exact.witness).unwrap().total, &exact.value);
        let plain = instance(seed, n, k, 0, false);
        let table = bnslb(&plain).unwrap();
        prop_assert!(exact_kmlp(&plain).unwrap().value >= table.sum());
        for l in 1..=n {
            if l > 1 {
                prop_assert!(table.value(l) >= table.value(l - 1));
            }
            let paths = &table.witnesses[l - 1];
            let longest = paths.iter().map(|p| (1..p.len()).map(|j| plain.c(p[j - 1], p[j])).sum::<i64>()).max().unwrap();
            prop_assert_eq!(&int(longest), table.value(l));
            let mut covered: Vec<usize> = paths.iter().flatten().copied().chain(plain.roots().iter().copied()).collect();
            covered.sort_unstable();
            covered.dedup();
            prop_assert!(covered.len() >= l);
        }
    }

    #[test]
    fn every_solver_is_feasible(seed in any::<u64>(), n in 2usize..7, k in 1usize..4, m in 0u8..3, w in 0u8..4, rand_dir in any::<bool>()) {
        let multi = variant(instance(seed, n, k, m, false), seed, w);
        let single = instance(seed, n, k, m, true);
        let mut cfg = SolverConfig::with_seed(seed);
        cfg.derandomize = !rand_dir;
        for alg in Algorithm::ALL {
            for inst in [&multi, &single] {
                match solve(inst, alg, &cfg) {
                    Ok(rep) => {
                        let eval = evaluate_plan(inst, &rep.plan).unwrap();
                        prop_assert_eq!(&eval.total, &rep.cost);
                        prop_assert!(rep.cost <= rep.latency_bound);
                        prop_assert!(eval.total >= int(direct_lower_bound(inst)));
                    }
                    Err(Error::Unsupported(_)) => {}
                    Err(e) => prop_assert!(false, "{alg}: {e}"),
                }
            }
        }
        let comb = solve(&single, Algorithm::KmlpComb, &cfg).unwrap();
        prop_assert_eq!(comb.plan.routes.len(), single.k());
    }
}
