use proptest::prelude::*;

use ultrasmall::bounds::{cm_distance_bound, cm_growth_sequence, cm_mk_first_moment, i_k, ModelKind};
use ultrasmall::structure::{CmExplorer, PamExplorer};
use ultrasmall::{
    bfs, census_mkc_cm, diameter, generate_cm, generate_pam, quantile_sequence, DegreeSequence, PamParams,
    DiameterMethod, MultiGraph, PowerLawSpec,
};

fn degree_vec() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(1u32..7, 1..40)
}

fn pam_params() -> impl Strategy<Value = (u32, f64)> {
    (1u32..4).prop_flat_map(|m| (Just(m), (-(m as f64) + 0.05)..3.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cm_preserves_degrees(d in degree_vec(), seed in any::<u64>()) {
        let seq = DegreeSequence::new(d).unwrap().fix_parity();
        let g = generate_cm(&seq, seed).unwrap();
        prop_assert_eq!(g.degrees(), seq.degrees().to_vec());
        prop_assert_eq!(2 * g.num_edges() as u64, seq.ell());
    }

    #[test]
    fn cm_is_reproducible(d in degree_vec(), seed in any::<u64>()) {
        let seq = DegreeSequence::new(d).unwrap().fix_parity();
        let a: Vec<_> = generate_cm(&seq, seed).unwrap().edges().collect();
        let b: Vec<_> = generate_cm(&seq, seed).unwrap().edges().collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn pam_degree_total_is_conserved((m, delta) in pam_params(), t in 1u32..30, seed in any::<u64>()) {
        let g = generate_pam(PamParams::new(m, delta).unwrap(), t, seed).unwrap();
        for s in 1..=t {
            for j in 1..=m {
                let total: u32 = (1..=s).map(|v| g.degree_at(v, s, j).unwrap()).sum();
                prop_assert_eq!(total, 2 * (m * (s - 1) + j));
            }
        }
        let view = g.undirected_view();
        prop_assert_eq!(view.degrees(), g.degrees().to_vec());
    }

    #[test]
    fn pam_targets_are_not_younger((m, delta) in pam_params(), t in 1u32..60, seed in any::<u64>()) {
        let g = generate_pam(PamParams::new(m, delta).unwrap(), t, seed).unwrap();
        for w in 1..=t {
            for &x in g.out_edges(w) {
                prop_assert!(x >= 1 && x <= w);
            }
        }
    }

    #[test]
    fn exploration_is_deterministic(seed in any::<u64>(), k in 1u32..4) {
        let seq = quantile_sequence(PowerLawSpec { tau: 2.5, d_min: 3, n: 200 }).unwrap().fix_parity();
        let g = generate_cm(&seq, seed).unwrap();
        let mut reused = CmExplorer::new(&g);
        for v in (0..200).step_by(17) {
            let a = reused.explore(v, k, None).unwrap();
            let b = CmExplorer::new(&g).explore(v, k, None).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn pam_levels_follow_recursion((m, delta) in pam_params(), t in 2u32..200, seed in any::<u64>(), k in 1u32..4) {
        let g = generate_pam(PamParams::new(m, delta).unwrap(), t, seed).unwrap();
        let mut ex = PamExplorer::new(&g);
        for root in 1..=t {
            let e = ex.explore(root, k, None).unwrap();
            let coll = e.collisions_per_level();
            for l in 1..=k as usize {
                prop_assert_eq!(e.levels[l].len() + coll[l - 1], m as usize * e.levels[l - 1].len());
            }
        }
    }

    #[test]
    fn cm_levels_bounded_by_budget(seed in any::<u64>(), k in 1u32..4) {
        let seq = quantile_sequence(PowerLawSpec { tau: 2.5, d_min: 3, n: 300 }).unwrap().fix_parity();
        let g = generate_cm(&seq, seed).unwrap();
        let mut ex = CmExplorer::new(&g);
        for v in 0..300 {
            let e = ex.explore(v, k, None).unwrap();
            let coll = e.collisions_per_level();
            let mut clean = true;
            for l in 1..=k as usize {
                let budget = if l == 1 { 3 } else { 2 };
                let filled = e.levels[l].len() + coll[l - 1];
                prop_assert!(filled <= budget * e.levels[l - 1].len());
                // A collision inside level l can also eat a sibling's half-edge,
                // so equality needs no collisions up to and including l.
                clean &= coll[l - 1] == 0;
                if clean {
                    prop_assert_eq!(filled, budget * e.levels[l - 1].len());
                }
            }
        }
    }

    #[test]
    fn cm_mkc_balls_have_tree_size(seed in any::<u64>(), k in 1u32..3) {
        let seq = quantile_sequence(PowerLawSpec { tau: 2.5, d_min: 2, n: 400 }).unwrap().fix_parity();
        let g = generate_cm(&seq, seed).unwrap();
        let census = census_mkc_cm(&g, k).unwrap();
        let size = i_k(ModelKind::Cm, 2, k).unwrap() + 1;
        prop_assert_eq!(census.count, census.members.len());
        for &v in &census.members {
            let r = bfs(&g, v).unwrap();
            let ball = r.distances.iter().filter(|&&d| d <= k).count() as u64;
            prop_assert_eq!(ball, size);
        }
    }

    #[test]
    fn first_moment_nonincreasing_in_k(n in 2_000usize..20_000, d_min in 2u32..4) {
        let seq = quantile_sequence(PowerLawSpec { tau: 2.5, d_min, n }).unwrap().fix_parity();
        let mut prev = f64::INFINITY;
        for k in 1..5 {
            let Ok(e) = cm_mk_first_moment(&seq, k) else { break };
            prop_assert!(e <= prev * (1.0 + 1e-12), "k={} e={} prev={}", k, e, prev);
            prev = e;
        }
    }

    #[test]
    fn distance_bound_monotone_in_k_bar(n in 5_000usize..50_000, da in 3u32..6, db in 3u32..6) {
        let seq = quantile_sequence(PowerLawSpec { tau: 2.5, d_min: 3, n }).unwrap().fix_parity();
        let g = cm_growth_sequence(n as u64, 2.5, 0.05, 9).unwrap();
        let mut prev = 0.0;
        for k_bar in 0..=4 {
            let b = cm_distance_bound(&seq, da, db, k_bar, &g).unwrap();
            prop_assert!(b >= prev, "k_bar={} b={} prev={}", k_bar, b, prev);
            prev = b;
        }
    }

    #[test]
    fn ifub_matches_all_sources(n in 2usize..60, raw in prop::collection::vec((0u32..60, 0u32..60), 0..120)) {
        let edges: Vec<(u32, u32)> = raw.into_iter().map(|(a, b)| (a % n as u32, b % n as u32)).collect();
        let g = MultiGraph::from_edges(n, &edges).unwrap();
        let exact = diameter(&g, DiameterMethod::AllSources).unwrap();
        let fast = diameter(&g, DiameterMethod::Ifub).unwrap();
        prop_assert_eq!(exact.diam, fast.diam);
        prop_assert_eq!(exact.component_fraction, fast.component_fraction);
    }
}
