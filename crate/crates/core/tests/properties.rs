use proptest::prelude::*;

use bidensity::bilpa::{self, BilpaConfig};
use bidensity::exact;
use bidensity::graph::{parse_edge_list, BipartiteGraph, EdgeRow, Side};
use bidensity::partition::Partition;
use bidensity::quality;

const TOL: f64 = 1e-12;

fn graph_strategy(max_side: usize) -> impl Strategy<Value = BipartiteGraph> {
    (1..=max_side, 1..=max_side)
        .prop_flat_map(|(p, q)| (Just(p), Just(q), prop::collection::vec(any::<bool>(), p * q)))
        .prop_filter_map("needs an edge", |(p, q, cells)| {
            let edges: Vec<_> = (0..p * q).filter(|&x| cells[x]).map(|x| (x / q, x % q)).collect();
            if edges.is_empty() {
                return None;
            }
            Some(BipartiteGraph::from_indexed(p, q, &edges).unwrap())
        })
}

/// Like [`graph_strategy`] but every node has an edge, so the graph survives
/// a trip through the edge-list format.
fn covered_graph_strategy(max_side: usize) -> impl Strategy<Value = BipartiteGraph> {
    (1..=max_side, 1..=max_side)
        .prop_flat_map(|(p, q)| (Just(p), Just(q), prop::collection::vec(any::<bool>(), p * q)))
        .prop_map(|(p, q, mut cells)| {
            for i in 0..p {
                if !(0..q).any(|j| cells[i * q + j]) {
                    cells[i * q + i % q] = true;
                }
            }
            for j in 0..q {
                if !(0..p).any(|i| cells[i * q + j]) {
                    cells[(j % p) * q + j] = true;
                }
            }
            let edges: Vec<_> = (0..p * q).filter(|&x| cells[x]).map(|x| (x / q, x % q)).collect();
            BipartiteGraph::from_indexed(p, q, &edges).unwrap()
        })
}

/// Graph plus a hard labeling with up to `k` labels.
fn labeled_strategy(max_side: usize, k: usize) -> impl Strategy<Value = (BipartiteGraph, Vec<usize>, Vec<usize>)> {
    graph_strategy(max_side).prop_flat_map(move |g| {
        let (p, q) = (g.p(), g.q());
        (Just(g), prop::collection::vec(0..k, p), prop::collection::vec(0..k, q))
    })
}

fn is_biclique(g: &BipartiteGraph) -> bool {
    g.edge_count() == g.p() * g.q()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn edge_list_round_trip(g in covered_graph_strategy(8)) {
        let text = g.to_edge_list_string();
        let back = parse_edge_list(&text).unwrap();
        prop_assert_eq!(back.to_edge_list_string(), text);
        let id_edges = |h: &BipartiteGraph| {
            let mut e: Vec<(String, String)> = h
                .edges()
                .iter()
                .map(|&(i, j)| (h.id(Side::U, i).to_string(), h.id(Side::V, j).to_string()))
                .collect();
            e.sort();
            e
        };
        prop_assert_eq!(id_edges(&back), id_edges(&g));
        for side in [Side::U, Side::V] {
            let mut a = back.ids(side).to_vec();
            let mut b = g.ids(side).to_vec();
            a.sort();
            b.sort();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn degree_sums_match_edge_count(g in graph_strategy(10)) {
        let du: usize = (0..g.p()).map(|i| g.degree(Side::U, i)).sum();
        let dv: usize = (0..g.q()).map(|j| g.degree(Side::V, j)).sum();
        prop_assert_eq!(du, g.edge_count());
        prop_assert_eq!(dv, g.edge_count());
    }

    #[test]
    fn graph_density_bounds(g in graph_strategy(8)) {
        let d = g.density();
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert_eq!(d == 1.0, is_biclique(&g));
    }

    #[test]
    fn partition_density_bounds((g, u, v) in labeled_strategy(8, 4)) {
        let part = Partition::hard(&u, &v);
        let report = quality::partition_density(&g, &part).unwrap();
        let d = report.partition_density;
        prop_assert!((-TOL..=1.0 + TOL).contains(&d));
        prop_assert!((report.recomputed_density() - d).abs() < TOL);
        // D = 1 exactly when no edge crosses communities and every community
        // holding an edge is a biclique
        let all_internal = g.edges().iter().all(|&(i, j)| u[i] == v[j]);
        let all_bicliques = report
            .per_community
            .iter()
            .all(|c| c.internal == 0.0 || c.density == 1.0);
        prop_assert_eq!((d - 1.0).abs() < TOL, all_internal && all_bicliques);
    }

    #[test]
    fn density_ignores_labels_and_node_order(
        (g, u, v) in labeled_strategy(7, 4),
        shift in 1usize..10,
        seed in any::<u64>(),
    ) {
        let base = quality::density(&g, &Partition::hard(&u, &v)).unwrap();
        let relabeled = quality::density(
            &g,
            &Partition::hard(
                &u.iter().map(|l| (l + shift) * 7).collect::<Vec<_>>(),
                &v.iter().map(|l| (l + shift) * 7).collect::<Vec<_>>(),
            ),
        )
        .unwrap();
        prop_assert!((base - relabeled).abs() < TOL);

        let rotate = |n: usize, by: u64| -> Vec<usize> { (0..n).map(|i| (i + by as usize) % n).collect() };
        let up = rotate(g.p(), seed);
        let vp = rotate(g.q(), seed / 3);
        let h = g.permuted(&up, &vp);
        let mut u2 = vec![0; g.p()];
        let mut v2 = vec![0; g.q()];
        for i in 0..g.p() {
            u2[up[i]] = u[i];
        }
        for j in 0..g.q() {
            v2[vp[j]] = v[j];
        }
        let permuted = quality::density(&h, &Partition::hard(&u2, &v2)).unwrap();
        prop_assert!((base - permuted).abs() < TOL);
    }

    #[test]
    fn delta_matches_two_evaluations(
        (g, u, v) in labeled_strategy(8, 4),
        pick in any::<prop::sample::Index>(),
        target in any::<prop::sample::Index>(),
    ) {
        let part = Partition::hard(&u, &v);
        let nodes = g.p() + g.q();
        let x = pick.index(nodes);
        let (side, index) = if x < g.p() { (Side::U, x) } else { (Side::V, x - g.p()) };
        let others: Vec<usize> = (0..part.community_count())
            .filter(|&c| !part.contains(side, index, c))
            .collect();
        prop_assume!(!others.is_empty());
        let label = others[target.index(others.len())];
        let delta = quality::delta_density(&g, &part, side, index, label).unwrap();
        let before = quality::density(&g, &part).unwrap();
        let after = quality::density(&g, &part.with_added(side, index, label).unwrap()).unwrap();
        prop_assert!((delta.exact - (after - before)).abs() < TOL);
    }

    #[test]
    fn unit_weights_match_unweighted(
        g in covered_graph_strategy(7),
        labels in prop::collection::vec(0usize..3, 14),
    ) {
        let u = &labels[..g.p()];
        let v = &labels[7..7 + g.q()];
        let rows = |weight: Option<f64>| -> Vec<EdgeRow> {
            g.edges()
                .iter()
                .map(|&(i, j)| EdgeRow { u: g.id(Side::U, i).into(), v: g.id(Side::V, j).into(), weight })
                .collect()
        };
        // both built from the same rows, so node indices agree
        let plain = BipartiteGraph::from_edge_list(rows(None)).unwrap();
        let w = BipartiteGraph::from_edge_list(rows(Some(1.0))).unwrap();
        prop_assert!(w.is_weighted());
        let part = Partition::hard(u, v);
        let a = quality::density(&plain, &part).unwrap();
        let b = quality::density(&w, &part).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn bilpa_run_invariants(g in graph_strategy(12), theta in 0.5f64..=1.0) {
        let cfg = BilpaConfig::default().with_theta(theta);
        let out = bilpa::run(&g, &cfg).unwrap();
        let part = &out.partition;
        for side in [Side::U, Side::V] {
            for set in part.side_memberships(side) {
                prop_assert!(!set.is_empty());
            }
        }
        let hard = bilpa::run(&g, &BilpaConfig::default()).unwrap();
        prop_assert!(hard.partition.is_hard());
        let t = &out.trace;
        prop_assert!(t.sweeps_run >= 1 && t.sweeps_run <= cfg.iter_max);
        prop_assert_eq!(t.d_history.len(), t.sweeps_run);
        prop_assert!(t.d_history.iter().all(|d| (0.0..=1.0).contains(d)));
        let best = t.d_history.iter().cloned().fold(0.0, f64::max);
        prop_assert!((t.d_history[t.best_sweep - 1] - best).abs() < TOL);
        // pure function of its inputs
        let again = bilpa::run(&g, &cfg).unwrap();
        prop_assert_eq!(&again.partition, part);
        prop_assert_eq!(&again.trace, t);
    }

    #[test]
    fn hard_bilpa_keeps_the_best_sweep(g in graph_strategy(12)) {
        let out = bilpa::run(&g, &BilpaConfig::default()).unwrap();
        let best = out.trace.d_history.iter().cloned().fold(0.0, f64::max);
        prop_assert!(out.report.partition_density >= best - TOL);
    }

    #[test]
    fn rearranged_rows_are_grouped((g, u, v) in labeled_strategy(8, 3)) {
        let part = Partition::hard(&u, &v);
        let order = bilpa::rearrange_matrix(&g, &part).unwrap();
        let lu = part.primary_labels(Side::U);
        let rows: Vec<usize> = order.rows.iter().map(|&i| lu[i]).collect();
        prop_assert!(rows.windows(2).all(|w| w[0] <= w[1]));
        let mut sorted = order.rows.clone();
        sorted.sort();
        prop_assert_eq!(sorted, (0..g.p()).collect::<Vec<_>>());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn relaxation_never_hurts(g in graph_strategy(3), k in 1usize..=2) {
        let hard = exact::solve_model1(&g, k).unwrap();
        let soft = exact::solve_model2(&g, k, k).unwrap();
        prop_assert!(soft.best_d >= hard.best_d - TOL);
        prop_assert!(soft.best_d <= 1.0 + TOL);
    }

    #[test]
    fn exact_result_is_consistent(g in graph_strategy(4), k in 1usize..=3) {
        let res = exact::solve_model1(&g, k).unwrap();
        let again = quality::density(&g, &res.best_partition).unwrap();
        prop_assert!((again - res.best_d).abs() < TOL);
        prop_assert!(res.optima_count >= 1);
        prop_assert!(res.best_partition.community_count() <= k);
    }

    #[test]
    fn exact_invariant_under_node_permutation(g in graph_strategy(4), seed in any::<u64>()) {
        let rotate = |n: usize, by: u64| -> Vec<usize> { (0..n).map(|i| (i + by as usize) % n).collect() };
        let up = rotate(g.p(), seed);
        let vp: Vec<usize> = rotate(g.q(), seed >> 7).into_iter().rev().collect();
        let h = g.permuted(&up, &vp);
        let a = exact::solve_model1(&g, 2).unwrap();
        let b = exact::solve_model1(&h, 2).unwrap();
        prop_assert!((a.best_d - b.best_d).abs() < TOL);
        prop_assert_eq!(a.optima_count, b.optima_count);
        // the optimum of g, carried through the permutation, is optimal in h
        let lu = a.best_partition.primary_labels(Side::U);
        let lv = a.best_partition.primary_labels(Side::V);
        let mut u2 = vec![0; g.p()];
        let mut v2 = vec![0; g.q()];
        for i in 0..g.p() {
            u2[up[i]] = lu[i];
        }
        for j in 0..g.q() {
            v2[vp[j]] = lv[j];
        }
        let carried = quality::density(&h, &Partition::hard(&u2, &v2)).unwrap();
        prop_assert!((carried - b.best_d).abs() < TOL);
    }
}
