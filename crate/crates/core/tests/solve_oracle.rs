use tailmdp::models::{
    beta_example_model, growth_model, random_finite_mdp, toy_finite_mdp, BetaModelParams, GrowthModelParams,
};
use tailmdp::numerics::StreamFactory;
use tailmdp::simulate::{estimate_reward_functional, EstimatorConfig};
use tailmdp::solve::*;
use tailmdp::{ExtendedReal, MdpError};

fn ext(v: f64) -> ExtendedReal {
    ExtendedReal::new(v).unwrap()
}

fn one_state(rewards: Vec<Vec<f64>>) -> FiniteMDP {
    let horizon = rewards.len();
    let n_actions = rewards[0].len();
    FiniteMDP::from_dense(DenseSpec {
        states: vec![vec![0.0]; horizon],
        actions: vec![vec![(0..n_actions).map(|a| a as f64).collect()]; horizon],
        rewards: rewards.iter().map(|r| vec![r.iter().map(|&v| ext(v)).collect()]).collect(),
        transitions: vec![vec![vec![vec![1.0]; n_actions]]; horizon - 1],
        initial: vec![1.0],
    })
    .unwrap()
}

#[test]
fn toy_value_and_policy() {
    let fm = toy_finite_mdp();
    let (values, policy) = value_iteration(&fm);
    let v = initial_value(&fm, &values);
    assert_eq!(v, ext(37.0 / 8.0));
    let (bv, bp) = brute_force_optimal(&fm, BRUTE_FORCE_LIMIT).unwrap();
    assert_eq!(bv, ext(37.0 / 8.0));
    assert_eq!(bp, policy);
    assert_eq!(evaluate_policy_exact(&fm, &policy), bv);
    // Unreachable states (t=1, s=1,2 and t=2, s=0) still get the action that
    // is optimal from there: V3 = [1, 2, 3], V2 = [3, 11/4, 13/4], and at
    // t=1 action 1 gives [37/8, 21/4, 113/32].
    assert_eq!(policy.actions, vec![vec![1, 1, 1], vec![1, 0, 0], vec![1, 0, 0]]);
    assert_eq!(values.values[1], vec![ext(3.0), ext(2.75), ext(3.25)]);
    assert_eq!(values.values[0], vec![ext(4.625), ext(5.25), ext(113.0 / 32.0)]);
}

#[test]
fn randomized_instances_match_brute_force() {
    for seed in 0..20 {
        let fm = random_finite_mdp(seed, 3, 2, 3);
        let (values, policy) = value_iteration(&fm);
        let v = initial_value(&fm, &values);
        let (bv, bp) = brute_force_optimal(&fm, BRUTE_FORCE_LIMIT).unwrap();
        if v.is_finite() {
            assert!((v.value() - bv.value()).abs() < 1e-12, "seed {seed}: {v} vs {bv}");
        } else {
            assert_eq!(v, bv, "seed {seed}");
        }
        assert_eq!(policy, bp, "seed {seed}");
    }
}

#[test]
fn zero_rewards() {
    let fm = one_state(vec![vec![0.0, 0.0]; 3]);
    let (values, policy) = value_iteration(&fm);
    assert!(values.values.iter().flatten().all(|v| *v == ExtendedReal::ZERO));
    assert_eq!(policy, PolicyTable::first_actions(&fm));
    assert_eq!(evaluate_policy_exact(&fm, &policy), ExtendedReal::ZERO);
}

#[test]
fn neg_inf_branch_never_chosen_over_finite() {
    let fm = one_state(vec![vec![f64::NEG_INFINITY, 1.0]]);
    let (values, policy) = value_iteration(&fm);
    assert_eq!(values.at(1, 0), ext(1.0));
    assert_eq!(policy.at(1, 0), 1);
}

#[test]
fn single_policy_instance() {
    let fm = one_state(vec![vec![2.5]; 2]);
    let (v, p) = brute_force_optimal(&fm, BRUTE_FORCE_LIMIT).unwrap();
    assert_eq!(v, ext(5.0));
    assert_eq!(p, PolicyTable::first_actions(&fm));
}

#[test]
fn too_many_policies_refused() {
    let fm = random_finite_mdp(0, 3, 2, 7);
    match brute_force_optimal(&fm, BRUTE_FORCE_LIMIT) {
        Err(MdpError::TooManyPolicies { count, .. }) => assert_eq!(count, 2f64.powi(21)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn beta_three_point_grid() {
    let m = beta_example_model(BetaModelParams::default()).unwrap();
    let fm = discretize(&m, 3, 8, 4).unwrap();
    for t in 1..=4 {
        assert_eq!(fm.states_at(t), &[0.0, 0.5, 1.0]);
        assert!(fm.choices(t, 2).iter().all(|c| c.reward.is_neg_inf()));
        assert_eq!(fm.choices(t, 1).len(), 3);
        assert_eq!(fm.choices(t, 2).len(), 8);
    }
    assert!(initial_value(&fm, &value_iteration(&fm).0).is_finite());
}

#[test]
fn discretized_rows_are_stochastic() {
    let m = beta_example_model(BetaModelParams::default()).unwrap();
    let fm = discretize(&m, 201, 8, 10).unwrap();
    for slice in &fm.slices()[..9] {
        for row in &slice.rows {
            assert!((row.sum() - 1.0).abs() < 1e-10);
        }
    }
    assert!((fm.initial().sum() - 1.0).abs() < 1e-10);
}

#[test]
fn non_markov_model_rejected() {
    let m = beta_example_model(BetaModelParams::default()).unwrap().markov(false);
    assert!(matches!(discretize(&m, 11, 8, 3), Err(MdpError::NotMarkov(_))));
}

#[test]
fn larger_action_budget_never_hurts() {
    let m = beta_example_model(BetaModelParams { p: 3, a_max: 8 }).unwrap();
    let small = solve_discretized(&m, 51, 3, 6).unwrap().value;
    let large = solve_discretized(&m, 51, 8, 6).unwrap().value;
    assert!(large >= small, "{large} < {small}");
}

#[test]
fn neg_inf_only_where_every_action_is_neg_inf() {
    let m = beta_example_model(BetaModelParams::default()).unwrap();
    let sol = solve_discretized(&m, 51, 8, 6).unwrap();
    for t in 1..=6 {
        for (s, v) in sol.values.values[t - 1].iter().enumerate() {
            if v.is_neg_inf() {
                assert!(sol.fm.choices(t, s).iter().all(|c| c.reward.is_neg_inf()), "t={t} s={s}");
            }
        }
    }
}

#[test]
fn growth_values_increase_with_capital() {
    let m = growth_model(GrowthModelParams::default()).unwrap();
    let sol = solve_discretized(&m, 51, 8, 8).unwrap();
    for row in &sol.values.values {
        assert!(row.iter().all(|v| v.is_finite()));
        assert!(row.windows(2).all(|w| w[1] >= w[0]));
    }
    // Rows are shared across consumption levels with equal savings.
    assert!(sol.fm.slice(1).rows.len() <= 51);
}

#[test]
fn csv_export() {
    let fm = toy_finite_mdp();
    let (values, policy) = value_iteration(&fm);
    let csv = tables_to_csv(&fm, &values, &policy);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,state_value,value,action");
    assert_eq!(lines.len(), 10);
    assert_eq!(lines[7], "3,0,1,1");
    assert!(lines[4].starts_with("2,0,"));
}

#[test]
fn toy_monte_carlo_matches_exact_evaluation() {
    let fm = toy_finite_mdp();
    let (_, policy) = value_iteration(&fm);
    let exact = evaluate_policy_exact(&fm, &policy).value();
    let model = fm.to_model_spec("toy");
    let e = estimate_reward_functional(
        &model,
        &policy.to_policy(&fm),
        3,
        100_000,
        &StreamFactory::new(17),
        &EstimatorConfig::default(),
    )
    .unwrap();
    assert!((e.value.value() - exact).abs() <= 3.0 * e.std_error, "{} vs {exact} (se {})", e.value, e.std_error);
}

#[test]
fn toy_kernel_frequencies() {
    use tailmdp::History;
    let model = toy_finite_mdp().to_model_spec("toy");
    let h = History::start(0.0);
    let n = 100_000;
    let mut counts = [0usize; 3];
    let mut rng = StreamFactory::new(4).stream("toy-kernel", 0);
    for _ in 0..n {
        counts[model.kernel_sample(&h, 1.0, &mut rng).unwrap() as usize] += 1;
    }
    for (c, p) in counts.iter().zip([0.0, 0.25, 0.75]) {
        let sd = (p * (1.0 - p) / n as f64).sqrt();
        assert!((*c as f64 / n as f64 - p).abs() <= 3.0 * sd + 1e-12, "{counts:?}");
    }
}

#[test]
fn policy_tables_are_deterministic_across_threads() {
    let m = beta_example_model(BetaModelParams::default()).unwrap();
    let run = |k| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .unwrap()
            .install(|| solve_discretized(&m, 51, 8, 5).unwrap())
    };
    let (a, b) = (run(1), run(3));
    assert_eq!(a.values, b.values);
    assert_eq!(a.policy, b.policy);
}
