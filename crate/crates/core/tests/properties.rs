//! Invariants over randomly generated spaces, datasets and intents.

mod common;

use buyer_privacy::allocation::{
    allocate, crossover, is_feasible, AllocationConfig, AllocationMethod,
};
use buyer_privacy::attacks::{
    infer_pseudo_pi, intent_bounds, within_threshold, PValueConfig, PurchaseSet,
};
use buyer_privacy::domain::{Cell, Intent};
use buyer_privacy::expansion::{expand, ExpansionConfig};
use buyer_privacy::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn expansion_is_private_and_covers_the_true_intent(
        seed in any::<u64>(),
        lambda in 0.02f64..=1.0,
        alpha in 0.0f64..=1.0,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let space = common::random_space(&mut rng, 5, 6);
        let data = common::random_dataset(&mut rng, &space);
        let ti = common::random_intent(&mut rng, &space);
        let attack = common::random_attack(&mut rng);
        match expand(&data, &ti, &ExpansionConfig::new(lambda, alpha, attack)) {
            Ok(x) => {
                prop_assert!(ti.is_subset_of(&x.published));
                prop_assert!(within_threshold(x.bounds.upper, lambda));
                let again = intent_bounds(&data, attack, &ti, &x.published).unwrap();
                prop_assert_eq!(again, x.bounds);
                let direct = common::direct_upper(&data, attack, &ti, &x.published);
                prop_assert!((direct - x.bounds.upper).abs() < 1e-12);
            }
            Err(Error::Infeasible { floor, .. }) => {
                let all = Intent::all(&space);
                let f = intent_bounds(&data, attack, &ti, &all).unwrap().upper;
                prop_assert_eq!(f, floor);
                prop_assert!(f > lambda);
            }
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn lambda_one_publishes_the_true_intent(seed in any::<u64>(), alpha in 0.0f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let space = common::random_space(&mut rng, 5, 6);
        let data = common::random_dataset(&mut rng, &space);
        let ti = common::random_intent(&mut rng, &space);
        let attack = common::random_attack(&mut rng);
        let x = expand(&data, &ti, &ExpansionConfig::new(1.0, alpha, attack)).unwrap();
        prop_assert_eq!(x.published, ti);
        prop_assert!(x.trace.is_empty());
    }

    #[test]
    fn looser_lambda_stops_on_a_prefix_of_the_trace(
        seed in any::<u64>(),
        l1 in 0.02f64..1.0,
        gap in 0.0f64..1.0,
        alpha in 0.0f64..=1.0,
    ) {
        let l2 = l1 + gap * (1.0 - l1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let space = common::random_space(&mut rng, 4, 5);
        let data = common::random_dataset(&mut rng, &space);
        let ti = common::random_intent(&mut rng, &space);
        let attack = common::random_attack(&mut rng);
        if let Ok(tight) = expand(&data, &ti, &ExpansionConfig::new(l1, alpha, attack)) {
            let loose = expand(&data, &ti, &ExpansionConfig::new(l2, alpha, attack)).unwrap();
            prop_assert!(loose.trace.len() <= tight.trace.len());
            prop_assert_eq!(&tight.trace[..loose.trace.len()], &loose.trace[..]);
            prop_assert!(loose.published.is_subset_of(&tight.published));
            let records = |i: &Intent| data.records_in_intent(i).count;
            prop_assert!(records(&loose.published) <= records(&tight.published));
        }
    }

    #[test]
    fn pseudo_pi_is_the_smallest_cover(
        cells in prop::collection::vec((0usize..4, 0usize..3, 0usize..2, 1u64..5), 1..8),
    ) {
        let space = buyer_privacy::domain::DataSpace::new(vec![
            buyer_privacy::domain::Dimension::new("a", &["0", "1", "2", "3"], true),
            buyer_privacy::domain::Dimension::new("b", &["0", "1", "2"], false),
            buyer_privacy::domain::Dimension::new("c", &["0", "1"], false),
        ]).unwrap();
        let x = PurchaseSet::from_counts(
            cells.iter().map(|&(a, b, c, n)| (Cell(vec![a, b, c]), n)).collect::<Vec<_>>(),
        ).unwrap();
        let pi = infer_pseudo_pi(&x, &space).unwrap();
        prop_assert!(x.iter().all(|(c, _)| pi.contains(c)));
        prop_assert_eq!(pi, common::brute_force_pseudo_pi(&x, &space));
    }

    #[test]
    fn crossover_conserves_records(
        a in prop::collection::vec(0usize..6, 1..30),
        salt in any::<u64>(),
        point in 0usize..30,
    ) {
        let q = a.len();
        let mut rng = ChaCha8Rng::seed_from_u64(salt);
        let b: Vec<usize> = (0..q).map(|_| rng.random_range(0..6)).collect();
        let set = |v: &[usize]| PurchaseSet::from_cells(v.iter().map(|&x| Cell(vec![x]))).unwrap();
        let (x, y) = (set(&a), set(&b));
        let k = point.min(q);
        let (c1, c2) = crossover(&x, &y, k).unwrap();
        prop_assert_eq!(c1.q(), q as u64);
        prop_assert_eq!(c2.q(), q as u64);
        for v in 0..6 {
            let cell = Cell(vec![v]);
            prop_assert_eq!(
                c1.count(&cell) + c2.count(&cell),
                x.count(&cell) + y.count(&cell)
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn allocations_pass_the_exact_check(seed in any::<u64>(), method in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let space = common::random_space(&mut rng, 3, 4);
        let data = common::random_dataset(&mut rng, &space);
        let ti = common::random_intent(&mut rng, &space);
        let published = Intent::all(&space);
        let q = rng.random_range(5..40);
        let mut cfg = AllocationConfig::new(AllocationMethod::ALL[method], q, 0.5);
        cfg.z = 300;
        cfg.seed = seed;
        match allocate(&published, &ti, &data, &cfg) {
            Ok(a) => {
                prop_assert_eq!(a.purchase.q(), q);
                prop_assert!(a.purchase.iter().all(|(c, _)| published.contains(c) && data.freq(c) > 0));
                prop_assert!(is_feasible(&a.purchase, &ti, &data, 0.5, &PValueConfig::exact()).unwrap());
                for conf in common::independent_confidences(&a.purchase, &ti, &data) {
                    prop_assert!(conf <= 0.5 + 1e-9);
                }
            }
            Err(e) => prop_assert_eq!(e.kind(), "no_feasible_allocation"),
        }
    }
}
