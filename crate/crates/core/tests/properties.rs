mod common;

use offload_core::game::{self, Evaluator};
use offload_core::model::{self, AccessModel, Threshold};
use offload_core::scenario::{self, GenParams};
use offload_core::DecisionProfile;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn access_model() -> impl Strategy<Value = AccessModel> {
    prop_oneof![Just(AccessModel::Interference), Just(AccessModel::Contention)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn rate_decreases_with_interference(seed: u64, model in access_model(), lo in 0.0..50.0f64, gap in 1e-6..50.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = common::random_instance(&mut rng, model, 1, 1);
        let u = &inst.users[0];
        let r_lo = model::rate_at(&inst.env, u, lo);
        let r_hi = model::rate_at(&inst.env, u, lo + gap);
        prop_assert!(r_lo > r_hi);
        prop_assert!(model::cloud_overhead_at(&inst.env, u, lo) < model::cloud_overhead_at(&inst.env, u, lo + gap));
    }

    #[test]
    fn contention_shares_split_the_peak_rate(seed: u64, n in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = common::random_instance(&mut rng, AccessModel::Contention, n, 1);
        let a = DecisionProfile(vec![1; n]);
        let share: f64 = (0..n)
            .map(|i| model::uplink_rate(&inst.env, &inst.users, i, &a).unwrap() / inst.users[i].peak_rate)
            .sum();
        prop_assert!((share - 1.0).abs() < 1e-12);
    }

    #[test]
    fn potential_tracks_every_improving_deviation(
        seed: u64, model in access_model(), n in 1usize..9, m in 1usize..4,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = common::random_instance(&mut rng, model, n, m);
        let eval = Evaluator::for_instance(&inst);
        let a = common::random_profile(&mut rng, n, m);
        let loads = eval.loads(&a);
        let phi = eval.potential(&a);
        for user in 0..n {
            let current = eval.overhead_of(user, a[user], &a, &loads);
            for d in 0..=m {
                if eval.overhead_of(user, d, &a, &loads) < current {
                    let mut b = a.clone();
                    b.0[user] = d;
                    prop_assert!(eval.potential(&b) < phi, "user {} to {} in {}", user, d, a);
                }
            }
        }
    }

    #[test]
    fn potential_matches_free_function(seed: u64, model in access_model(), n in 0usize..9, m in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = common::random_instance(&mut rng, model, n, m);
        let a = common::random_profile(&mut rng, n, m);
        let direct = game::potential(&inst.env, &inst.users, &a);
        prop_assert_eq!(direct, Evaluator::for_instance(&inst).potential(&a));
    }

    /// Φ moves by exactly `Q_n` times the change of the mover's own term
    /// (received interference on a channel, threshold when local).
    #[test]
    fn potential_drop_equals_weighted_interference_change(
        seed: u64, model in access_model(), n in 1usize..8, m in 1usize..4,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = common::random_instance(&mut rng, model, n, m);
        let eval = Evaluator::for_instance(&inst);
        let a = common::random_profile(&mut rng, n, m);
        let loads = eval.loads(&a);
        let term = |user: usize, d: usize| match d {
            0 => game::potential_threshold(&inst.env, &inst.users[user]),
            c => eval.interference(user, c, &a, &loads),
        };
        for user in 0..n {
            for d in 0..=m {
                let mut b = a.clone();
                b.0[user] = d;
                let expected = eval.weight(user) * (term(user, d) - term(user, a[user]));
                let got = eval.potential(&b) - eval.potential(&a);
                let scale = 1.0 + eval.potential(&a).abs() + eval.potential(&b).abs();
                prop_assert!((got - expected).abs() <= 1e-9 * scale);
            }
        }
    }

    #[test]
    fn integer_instances_drop_by_at_least_q_min(seed: u64, model in access_model(), n in 1usize..8, m in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = common::random_integer_instance(&mut rng, model, n, m);
        let eval = Evaluator::for_instance(&inst);
        let q_min = eval.weights().iter().copied().fold(f64::INFINITY, f64::min);
        let a = common::random_profile(&mut rng, n, m);
        let loads = eval.loads(&a);
        for user in 0..n {
            for &d in &eval.best_response(user, &a, &loads).decisions {
                let mut b = a.clone();
                b.0[user] = d;
                prop_assert!(eval.potential(&a) - eval.potential(&b) >= q_min);
            }
        }
    }

    #[test]
    fn best_response_members_attain_the_minimum(seed: u64, model in access_model(), n in 1usize..8, m in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = common::random_instance(&mut rng, model, n, m);
        let eval = Evaluator::for_instance(&inst);
        let a = common::random_profile(&mut rng, n, m);
        let loads = eval.loads(&a);
        for user in 0..n {
            let set = eval.best_response(user, &a, &loads);
            let values: Vec<f64> = (0..=m).map(|d| eval.overhead_of(user, d, &a, &loads)).collect();
            let min = values.iter().copied().fold(f64::INFINITY, f64::min);
            prop_assert_eq!(set.best, min);
            prop_assert_eq!(set.current, values[a[user]]);
            prop_assert_eq!(set.is_empty(), min >= values[a[user]]);
            prop_assert_eq!(set.is_empty(), !eval.can_improve(user, &a, &loads));
            for &d in &set.decisions {
                prop_assert!(values[d] - min <= 1e-12 && values[d] < values[a[user]]);
            }
            prop_assert!(set.decisions.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn nash_cloud_users_are_beneficial(seed: u64, model in access_model(), n in 1usize..6, m in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = common::random_instance(&mut rng, model, n, m);
        let eval = Evaluator::for_instance(&inst);
        for a in offload_core::baselines::enumerate_nash(&inst).unwrap() {
            prop_assert!(eval.all_cloud_beneficial(&a));
        }
    }

    #[test]
    fn threshold_test_agrees_with_overhead_comparison(seed: u64, model in access_model(), mu in 0.0..40.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = common::random_instance(&mut rng, model, 1, 1);
        let u = &inst.users[0];
        let direct = model::cloud_overhead_at(&inst.env, u, mu) <= model::local_overhead(u);
        match model::beneficial_threshold(&inst.env, u) {
            Threshold::Finite(t) if (mu - t).abs() <= 1e-9 * t.abs().max(1e-300) => {}
            th => prop_assert_eq!(direct, th.admits(mu)),
        }
    }

    #[test]
    fn potential_is_bounded_by_weights_and_thresholds(seed: u64, model in access_model(), n in 1usize..9, m in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = common::random_nonnegative_instance(&mut rng, model, n, m);
        let eval = Evaluator::for_instance(&inst);
        let q_max = eval.weights().iter().copied().fold(0.0, f64::max);
        let t_max = (0..n).map(|i| eval.threshold(i).finite().unwrap()).fold(0.0, f64::max);
        let a = common::random_profile(&mut rng, n, m);
        let phi = eval.potential(&a);
        let nf = n as f64;
        prop_assert!(phi >= 0.0);
        prop_assert!(phi <= 0.5 * q_max * q_max * nf * nf + q_max * t_max * nf + 1e-9);
    }

    #[test]
    fn generated_scenarios_round_trip(seed: u64, n in 0usize..12, m in 1usize..6, contention: bool) {
        let params = GenParams {
            n,
            m,
            access_model: if contention { AccessModel::Contention } else { AccessModel::Interference },
            w_choices: vec![1.0, 2.0, 4.0],
            ..GenParams::default()
        };
        let scenario = scenario::generate(&params, seed).unwrap();
        let text = scenario::save_scenario(&scenario);
        let back = scenario::load_scenario(&text).unwrap();
        prop_assert_eq!(&back, &scenario);
        prop_assert_eq!(scenario::save_scenario(&back), text);
        prop_assert_eq!(back.instance().fingerprint(), scenario.instance().fingerprint());
    }
}
