use goalign::alignment::{
    all_hidden_goals, analyze, approx_value_in, approx_value_out, build_queue, make_simulated_oracle, probability_from_delta,
    query_value, run_elicitation, BruteForce, Direction,
};
use goalign::micro::{random_instance, MicroInstanceConfig};
use goalign::planner::{check_solvable, Planner, SearchLimits};
use goalign::task::simulate;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn micro(seed: u64) -> goalign::micro::MicroInstance {
    random_instance(&mut ChaCha8Rng::seed_from_u64(seed), &MicroInstanceConfig::default())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn complete_sound_and_within_budget(seed in any::<u64>()) {
        let m = micro(seed);
        let inst = &m.instance;
        let planner = Planner::default();
        for hidden in all_hidden_goals(inst) {
            let out = run_elicitation(inst, &mut make_simulated_oracle(hidden.clone()), &planner).unwrap();
            let solvable = check_solvable(&inst.robot_task(hidden.state().clone()), &SearchLimits::default()).unwrap();
            prop_assert_eq!(out.plan().is_some(), solvable);
            prop_assert!(out.query_count <= inst.baseline());
            prop_assert_eq!(out.query_count, out.transcript.len());
            if let Some(plan) = out.plan() {
                let end = simulate(plan, inst.robot_init(), inst.robot_domain()).unwrap();
                prop_assert!(hidden.state().is_subset(&end));
                prop_assert!(inst.goal_spec().union(&out.confirmed).is_subset(&end));
            }
        }
    }

    #[test]
    fn achievable_candidates_share_one_query_value(seed in any::<u64>()) {
        let m = micro(seed);
        let b = analyze(&m.instance, &Planner::default()).unwrap();
        let product: f64 = b.unachievable.iter().map(|f| b.p(f)).product();
        for &f in &b.candidates {
            prop_assert!((0.0..=1.0).contains(&b.p(f)));
            if !b.unachievable.contains(f) {
                prop_assert_eq!(query_value(f, &b), product);
            }
        }
        let q = build_queue(&b);
        prop_assert_eq!(q.len(), b.candidates.len());
        for w in q.windows(2) {
            prop_assert!(b.qvalue[&w[0]] >= b.qvalue[&w[1]]);
        }
    }

    /// The approximation bound, restricted to candidates whose product is
    /// over a non-empty set of unachievable fluents.
    #[test]
    fn bound_holds_when_product_is_nonempty(seed in any::<u64>()) {
        let m = micro(seed);
        let planner = Planner::default();
        let b = analyze(&m.instance, &planner).unwrap();
        let bf = BruteForce::new(&m.instance, &planner);
        for &f in &b.candidates {
            if !b.unachievable.is_empty() {
                let v = bf.value(&b, f, Direction::In).unwrap();
                prop_assert!(approx_value_in(f, &b) <= v + 1e-12, "in: f={} {} > {}", f, approx_value_in(f, &b), v);
            }
            if b.unachievable.iter().any(|g| g != f) {
                let v = bf.value(&b, f, Direction::Out).unwrap();
                prop_assert!(approx_value_out(f, &b) <= v + 1e-12, "out: f={} {} > {}", f, approx_value_out(f, &b), v);
            }
        }
    }

    #[test]
    fn elicitation_is_deterministic(seed in any::<u64>()) {
        let m = micro(seed);
        let planner = Planner::default();
        let a = run_elicitation(&m.instance, &mut make_simulated_oracle(m.hidden.clone()), &planner).unwrap();
        let b = run_elicitation(&m.instance, &mut make_simulated_oracle(m.hidden.clone()), &planner).unwrap();
        prop_assert_eq!(a.transcript, b.transcript);
        prop_assert_eq!(a.verdict, b.verdict);
    }
}

#[test]
fn probability_decreases_with_delta() {
    let ps: Vec<f64> = (0..=5).map(|d| probability_from_delta(1.0, d)).collect();
    assert_eq!(ps[0], 1.0);
    assert!(ps.windows(2).all(|w| w[0] > w[1]));
    assert!(ps.iter().skip(1).all(|&p| p < 1.0));
}
