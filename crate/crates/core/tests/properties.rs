//! Randomised checks on small deterministic graphs.

mod common;

use approx::assert_relative_eq;
use common::perron;
use gvbound::graphs::Edge;
use gvbound::gv::GvProblem;
use gvbound::product::{adjacency_matrix, build_b, build_d, build_t, default_marks, reduce_to_b};
use gvbound::{LabelledGraph, SolverConfig};
use proptest::prelude::*;

/// Strongly connected graphs on up to four states; each state has an optional
/// successor per label.
fn graph() -> impl Strategy<Value = LabelledGraph> {
    (1usize..=4)
        .prop_flat_map(|n| (Just(n), prop::collection::vec(prop::option::of(0..n), 2 * n)))
        .prop_filter_map("needs an edge", |(n, succ)| {
            let edges: Vec<Edge> = succ
                .iter()
                .enumerate()
                .filter_map(|(k, to)| to.map(|to| Edge { from: k / 2, to, label: (k % 2) as u64 }))
                .collect();
            let states = (0..n).map(|i| format!("q{i}")).collect();
            LabelledGraph::new(1, states, edges).ok()
        })
        .prop_filter("needs a strongly connected graph", |g| gvbound::graphs::validate(g).irreducible)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn pair_matrix_identities(g in graph()) {
        let cfg = SolverConfig::default().with_shift(1.0);
        let a = perron(&adjacency_matrix(&g).constant_values().to_dense());
        let b = build_b(&g);
        prop_assert_eq!(&reduce_to_b(&build_t(&g), g.num_states()), &b);
        let b0 = gvbound::eigen::spectral_radius(&b.eval(0.0).unwrap(), &cfg).unwrap();
        let b1 = gvbound::eigen::spectral_radius(&b.eval(1.0).unwrap(), &cfg).unwrap();
        assert_relative_eq!(b0, a, max_relative = 1e-8);
        assert_relative_eq!(b1, a * a, max_relative = 1e-8);
        if let Some(marks) = default_marks(&g) {
            let d = build_d(&g, &marks);
            for y in [0.0, 0.3, 1.0] {
                prop_assert_eq!(d.eval(1.0, y).unwrap().max_abs_diff(&b.eval(y).unwrap()), 0.0);
            }
        }
    }

    #[test]
    fn gv_rate_is_bounded_and_non_increasing(g in graph()) {
        let gv = GvProblem::new(&g, &SolverConfig::default()).unwrap();
        let cap = gv.capacity();
        prop_assert!(cap <= 1.0 + 1e-12);
        let mut prev = f64::INFINITY;
        for k in 0..8 {
            let delta = 0.06 * k as f64;
            let rate = gv.fixed_delta(delta).unwrap().rate;
            prop_assert!(rate >= 0.0 && rate <= cap + 1e-9, "rate {} at δ={}", rate, delta);
            prop_assert!(rate <= prev + 1e-9, "rate rises at δ={}", delta);
            prev = rate;
        }
        assert_relative_eq!(gv.fixed_delta(0.0).unwrap().rate, cap, max_relative = 1e-8);
    }
}
