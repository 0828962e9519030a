use proptest::prelude::*;
use tailmdp::models::{beta_example_model, growth_model, BetaModelParams, GrowthModelParams};
use tailmdp::verify::check_strong_coercivity;
use tailmdp::weakconv::{integrate, monotone_floor, truncate_outside};
use tailmdp::{ClosedSetSpec, DiscreteMeasure, ExtendedReal, ModelSpec, TestFunction};

fn beta() -> ModelSpec {
    beta_example_model(BetaModelParams::default()).unwrap()
}

fn unit() -> ClosedSetSpec {
    ClosedSetSpec::interval(0.0, 1.0).unwrap()
}

fn measure() -> impl Strategy<Value = DiscreteMeasure> {
    prop::collection::vec((0.0f64..=1.0, 1u32..20), 1..10).prop_map(|pts| {
        let total: u32 = pts.iter().map(|p| p.1).sum();
        let support = pts.iter().map(|p| p.0).collect();
        let weights = pts.iter().map(|p| p.1 as f64 / total as f64).collect();
        DiscreteMeasure::new(support, weights).unwrap()
    })
}

fn wave() -> TestFunction {
    TestFunction::from_fn("wave", unit(), |x| (9.0 * x).sin() * (1.0 + x))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn beta_envelope_dominates(x in 0.0f64..=1.0, a in 1u64..200, t in 1usize..12) {
        let m = beta();
        let h = m.synthetic_history(t, x);
        if m.actions_at(&h).contains(a as f64) {
            let lhs = m.reward_unchecked(&h, a as f64).positive_part().max(1.0);
            prop_assert!(lhs <= m.envelope_unchecked(&h) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn growth_envelope_dominates(frac in 0.0f64..=1.0, cons in 0.0f64..=1.0, t in 1usize..40) {
        let m = growth_model(GrowthModelParams::default()).unwrap();
        let hi = match m.state_space(t) { tailmdp::StateSpace::Interval { hi, .. } => hi, _ => unreachable!() };
        let x = frac * hi;
        let h = m.synthetic_history(t, x);
        let lhs = m.reward_unchecked(&h, cons * x).positive_part().max(1.0);
        prop_assert!(lhs <= m.envelope_unchecked(&h) * (1.0 + 1e-12));
    }

    #[test]
    fn beta_kernel_is_normalized(x in 0.0f64..=1.0, a in 1u64..50, t in 1usize..30) {
        let m = beta();
        let h = m.synthetic_history(t, x);
        let law = m.kernel().law(&h, a as f64);
        prop_assert!((law.normalization(1e-12) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn integral_is_linear(mu in measure(), nu in measure(), lambda in 0.0f64..=1.0) {
        let u = wave();
        let mix = mu.mixture(lambda, &nu).unwrap();
        let lhs = integrate(&mix, &u).value.value();
        let rhs = lambda * integrate(&mu, &u).value.value() + (1.0 - lambda) * integrate(&nu, &u).value.value();
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn truncation_is_below_u_and_equal_on_the_set(lo in 0.0f64..0.5, len in 0.01f64..0.5, x in 0.0f64..=1.0) {
        let u = wave();
        let ye = ClosedSetSpec::interval(lo, lo + len).unwrap();
        let ue = truncate_outside(&u, &ye, 2.0).unwrap();
        prop_assert!(ue.eval(x) <= u.eval(x));
        if ye.contains(x) {
            prop_assert_eq!(ue.eval(x), u.eval(x));
        } else {
            prop_assert_eq!(ue.eval(x), ExtendedReal::finite(-2.0));
        }
    }

    #[test]
    fn floor_integrals_fall_as_m_grows(mu in measure()) {
        let u = TestFunction::new("log", unit(), |x| if x == 0.0 { ExtendedReal::NEG_INF } else { ExtendedReal::finite(x.ln()) });
        let vals: Vec<f64> = [0.5, 1.0, 2.0, 5.0, 50.0].iter().map(|&m| integrate(&mu, &monotone_floor(&u, m)).value.value()).collect();
        prop_assert!(vals.windows(2).all(|w| w[1] <= w[0]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// Sub-intervals of a passing domain pass too.
    #[test]
    fn coercivity_monotone_in_domain(a in 0.1f64..0.3, b in 0.3f64..0.5, c in 0.6f64..0.8, d in 0.8f64..=1.0) {
        let m = beta();
        let keps = ClosedSetSpec::keps(0.1).unwrap();
        let sub = ClosedSetSpec::new(vec![(a, b), (c, d)]).unwrap();
        prop_assert!(sub.is_subset_of(&keps));
        let big = check_strong_coercivity(&m, 1, &keps, 1e-2, &[-10.0]).unwrap();
        let small = check_strong_coercivity(&m, 1, &sub, 1e-2, &[-10.0]).unwrap();
        prop_assert!(big.passed);
        prop_assert!(small.passed, "{}", tailmdp::ToReport::to_report(&small));
    }
}

#[test]
fn halving_the_step_keeps_a_passing_margin() {
    let m = beta();
    let keps = ClosedSetSpec::keps(0.1).unwrap();
    let coarse = check_strong_coercivity(&m, 1, &keps, 1e-2, &[]).unwrap();
    let fine = check_strong_coercivity(&m, 1, &keps, 5e-3, &[]).unwrap();
    assert!(coarse.passed && fine.passed);
    assert!(fine.usc_margin() <= coarse.usc_margin() + tailmdp::verify::USC_TOL);
}

#[test]
fn truncated_usc_function_stays_usc() {
    // x ↦ -x is usc; its truncation off [0.2, 0.7] must stay usc on [0, 1].
    let u = TestFunction::from_fn("-x", unit(), |x| -x);
    let ye = ClosedSetSpec::interval(0.2, 0.7).unwrap();
    let ue = truncate_outside(&u, &ye, 1.0).unwrap();
    for step in [1e-2, 1e-3] {
        let s = tailmdp::verify::usc_scan(&unit(), step, |x| ue.eval(x), tailmdp::verify::USC_TOL);
        assert!(s.margin <= tailmdp::verify::USC_TOL, "step {step}: {}", s.margin);
    }
}
