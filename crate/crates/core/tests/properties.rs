use emergent_spanner::hierarchy::{
    build_deformable_spanner, build_hierarchy, check_hierarchy, cousin_pair_wspd, DeformableSpanner,
};
use emergent_spanner::instance::{generate, random_geometric_matrix, Distribution};
use emergent_spanner::metric::{is_s_well_separated, Metric, NewPoint};
use emergent_spanner::order::{OrderStrategy, PairOrder};
use emergent_spanner::sim::{check_invariants, run_construction, JoinOrder};
use emergent_spanner::spanner::{build_spanner, induced_wspd};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cloud(seed: u64, n: usize) -> Metric {
    generate(Distribution::Uniform, n, 2, seed).unwrap()
}

fn strategy(k: usize) -> OrderStrategy {
    match k {
        0 => OrderStrategy::Random,
        1 => OrderStrategy::Lexicographic,
        2 => OrderStrategy::DecreasingDistance,
        _ => OrderStrategy::IncreasingDistance,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn messages_and_stores_equal_induced_members(seed in 0u64..10_000, n in 2usize..80, s in 1.1f64..5.0, k in 0usize..4) {
        let m = cloud(seed, n);
        let order = PairOrder { strategy: strategy(k), seed };
        let sim = run_construction(&m, s, &order).unwrap();
        let w = induced_wspd(&m, sim.graph());
        let members: usize = w.pairs.iter().map(|p| p.size()).sum();
        prop_assert_eq!(sim.total_store(), members);
        prop_assert_eq!(sim.message_count() as usize, members);
        let global: Vec<_> = build_spanner(&m, s, &order).unwrap().edges().map(|e| (e.u, e.v, e.seq)).collect();
        let local: Vec<_> = sim.graph().edges().map(|e| (e.u, e.v, e.seq)).collect();
        prop_assert_eq!(local, global);
        for x in 0..n {
            for rec in &sim.agent(x).store {
                prop_assert!(rec.my_dist <= rec.r);
                prop_assert_eq!(rec.r, rec.len / (2.0 * s + 2.0));
            }
        }
    }

    #[test]
    fn churn_restores_invariants(seed in 0u64..10_000, n in 5usize..50, events in 1usize..20) {
        let m = cloud(seed, n);
        let mut sim = run_construction(&m, 2.0, &PairOrder::random(seed)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        for _ in 0..events {
            let present = sim.present_ids();
            if rng.gen_bool(0.5) && present.len() > 2 {
                sim.delete_node(present[rng.gen_range(0..present.len())]).unwrap();
            } else if rng.gen_bool(0.5) && present.len() < sim.metric().len() {
                let absent: Vec<usize> = (0..sim.metric().len()).filter(|&i| !sim.is_present(i)).collect();
                sim.join(absent[rng.gen_range(0..absent.len())], &JoinOrder::Descending).unwrap();
            } else {
                let p = vec![rng.gen::<f64>(), rng.gen::<f64>()];
                sim.insert_node(NewPoint::Coords(p), &JoinOrder::Random(rng.gen())).unwrap();
            }
        }
        let report = check_invariants(&sim, true).unwrap();
        prop_assert!(report.is_clean_except_nn(), "{:?}", report);
    }

    #[test]
    fn hierarchy_invariants(seed in 0u64..10_000, n in 1usize..120, c in 4.0f64..20.0) {
        let m = cloud(seed, n);
        let h = build_hierarchy(&m).unwrap();
        prop_assert!(check_hierarchy(&m, &h).is_clean());
        let ds = build_deformable_spanner(&m, &h, c).unwrap();
        prop_assert!(ds.max_level_degree() as f64 <= ds.degree_bound(2));
        let w = cousin_pair_wspd(&m, &h, &ds);
        for pair in &w.pairs {
            prop_assert!(is_s_well_separated(&m, &pair.members_a, &pair.members_b, c / 4.0 - 1.0));
        }
    }

    #[test]
    fn separation_constant_matches(s in 1.1f64..8.0) {
        let c = DeformableSpanner::c_for_separation(s);
        prop_assert!((c / 4.0 - 1.0 - s).abs() < 1e-12);
    }
}

#[test]
fn graph_metric_churn() {
    let m = random_geometric_matrix(40, 12).unwrap();
    let mut sim = run_construction(&m, 2.0, &PairOrder::random(12)).unwrap();
    for y in [3, 17, 25] {
        sim.delete_node(y).unwrap();
    }
    sim.join(17, &JoinOrder::Ascending).unwrap();
    let report = check_invariants(&sim, true).unwrap();
    assert!(report.is_clean_except_nn(), "{report:?}");
}
