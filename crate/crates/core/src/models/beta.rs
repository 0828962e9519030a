//! Beta-kernel model on `[0, 1]` with integer actions.
//!
//! The reward is unbounded above near `x = 0`, equals `-inf` at `x = 1`, and
//! fails to be upper semicontinuous at `x = 0`; actions are unrestricted on
//! `(1/2, 1]`.

use crate::error::{MdpError, Result};
use crate::extended::ExtendedReal;
use crate::law::ScalarLaw;
use crate::mdp::{ActionSet, History, ModelSpec, StateSpace, TransitionKernel};
use crate::numerics::log_beta_function;

/// Second shape parameter of every transition law.
pub const KERNEL_SHAPE: f64 = 2.5;
pub const INITIAL_SHAPE: (f64, f64) = (1.0, 2.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BetaModelParams {
    /// Actions on `[0, 1/2]` are `{1, ..., p}`.
    pub p: u64,
    /// Enumeration cut-off for the positive-integer action sets.
    pub a_max: u64,
}

impl Default for BetaModelParams {
    fn default() -> Self {
        Self { p: 3, a_max: 8 }
    }
}

impl BetaModelParams {
    pub fn validate(&self) -> Result<()> {
        if self.p < 1 {
            return Err(MdpError::InvalidParameter("p must be >= 1".into()));
        }
        if self.a_max < self.p {
            return Err(MdpError::InvalidParameter(format!("a_max ({}) must be >= p ({})", self.a_max, self.p)));
        }
        Ok(())
    }
}

pub fn beta_reward(x: f64, a: f64) -> ExtendedReal {
    if x == 0.0 {
        ExtendedReal::ZERO
    } else if x == 1.0 {
        ExtendedReal::NEG_INF
    } else if x <= 0.5 {
        ExtendedReal::finite(1.0 / (a * a * x.sqrt()))
    } else {
        ExtendedReal::finite(-a / (1.0 - x).sqrt())
    }
}

pub fn beta_envelope(x: f64) -> f64 {
    if x == 0.0 || x > 0.5 {
        1.0
    } else {
        1.0 / x.sqrt()
    }
}

/// Law of `X_{t+1}` given `(t, x_t, a_t)`.
pub fn beta_transition(t: usize, x: f64, a: f64) -> ScalarLaw {
    ScalarLaw::Beta { alpha: t as f64 + x / a, beta: KERNEL_SHAPE }
}

/// Bound on the `Φ_t`-weighted mass of `[0, eps) ∪ (1/2, 1/2 + gamma)`.
///
/// For `t >= 2` this uses `1/B(t+1, 5/2)` times the integrals of
/// `y^{t-3/2}` and `y^{t-1}`; for `t = 1` the initial law is `Beta(1, 2)`
/// and the bound is exact.
pub fn beta_exclusion_bound(t: usize, eps: f64, gamma: f64) -> f64 {
    if t <= 1 {
        let outer = 0.5 - gamma;
        let mass_above_half = 0.25 - outer * outer;
        let b12 = log_beta_function(INITIAL_SHAPE.0, INITIAL_SHAPE.1).unwrap().exp();
        mass_above_half + 2.0 / b12 * eps.sqrt() * (1.0 - eps / 3.0)
    } else {
        let tf = t as f64;
        let lb = log_beta_function(tf + 1.0, KERNEL_SHAPE).unwrap();
        let near_zero = ((tf - 0.5) * eps.ln() - lb).exp() / (tf - 0.5);
        let near_half = ((0.5 + gamma).powi(t as i32) - 0.5f64.powi(t as i32)) / tf * (-lb).exp();
        near_zero + near_half
    }
}

/// `sup_π E^π[r_t^+]` bound: the exclusion bound at `eps = 1/2, gamma = 0`.
pub fn beta_tail_bound(t: usize) -> f64 {
    if t <= 1 {
        return beta_exclusion_bound(1, 0.5, 0.0);
    }
    let tf = t as f64;
    let lb = log_beta_function(tf + 1.0, KERNEL_SHAPE).unwrap();
    (-lb - (tf - 0.5).ln() + (tf - 0.5) * 0.5f64.ln()).exp()
}

pub fn beta_example_model(params: BetaModelParams) -> Result<ModelSpec> {
    params.validate()?;
    let BetaModelParams { p, a_max } = params;
    let compact: Vec<f64> = (1..=p).map(|a| a as f64).collect();
    let model = ModelSpec::new(
        "beta",
        |_| StateSpace::Interval { lo: 0.0, hi: 1.0 },
        move |h: &History| {
            // The boundary x = 1/2 belongs to the compact branch.
            if h.state() <= 0.5 {
                ActionSet::Finite(compact.clone())
            } else {
                ActionSet::PositiveIntegers { a_max }
            }
        },
        |h: &History, a| beta_reward(h.state(), a),
        TransitionKernel::new(|h: &History, a| beta_transition(h.time(), h.state(), a)),
        |h: &History| beta_envelope(h.state()),
        ScalarLaw::Beta { alpha: INITIAL_SHAPE.0, beta: INITIAL_SHAPE.1 },
    )
    .markov(true)
    .with_horizon_hint(12)
    .with_tail_bound(beta_tail_bound)
    .with_exclusion_bound(beta_exclusion_bound);
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate;

    fn model() -> ModelSpec {
        beta_example_model(BetaModelParams::default()).unwrap()
    }

    #[test]
    fn admissible_branches() {
        let m = model();
        let h = History::start(0.3);
        assert_eq!(m.admissible_actions(&h).unwrap(), ActionSet::Finite(vec![1.0, 2.0, 3.0]));
        let h = History::start(0.5);
        assert_eq!(m.admissible_actions(&h).unwrap(), ActionSet::Finite(vec![1.0, 2.0, 3.0]));
        let set = m.admissible_actions(&History::start(0.7)).unwrap();
        let e = set.enumerate().unwrap();
        assert_eq!(e.actions.len(), 8);
        assert!(e.truncated);
        assert!(set.contains(1000.0));
    }

    #[test]
    fn inadmissible_history_is_rejected_at_first_violation() {
        let m = model();
        let h = History::from_parts(vec![0.3, 0.6, 0.2], vec![2.0, 9.0]).unwrap();
        assert!(m.check_history(&h).is_ok());
        let h = History::from_parts(vec![0.3, 0.6, 0.2], vec![4.0, 9.0]).unwrap();
        assert_eq!(m.check_history(&h), Err(MdpError::InadmissibleHistory { index: 1 }));
        let h = History::from_parts(vec![0.3, 1.5], vec![1.0]).unwrap();
        assert_eq!(m.check_history(&h), Err(MdpError::StateOutOfSpace { index: 2 }));
    }

    #[test]
    fn reward_table() {
        let m = model();
        assert_eq!(m.reward(&History::start(0.0), 3.0).unwrap(), ExtendedReal::ZERO);
        assert!((m.reward(&History::start(0.25), 2.0).unwrap().value() - 0.5).abs() < 1e-15);
        assert!(m.reward(&History::start(1.0), 1.0).unwrap().is_neg_inf());
        assert!((m.reward(&History::start(0.75), 3.0).unwrap().value() + 6.0).abs() < 1e-12);
        assert!(m.reward(&History::start(0.25), 4.0).is_err());
        // a = 5 is only admissible at x = 0 when p >= 5.
        assert_eq!(beta_reward(0.0, 5.0), ExtendedReal::ZERO);
    }

    #[test]
    fn envelope_values() {
        let m = model();
        assert_eq!(m.envelope(&History::start(0.0)).unwrap(), 1.0);
        assert_eq!(m.envelope(&History::start(0.25)).unwrap(), 2.0);
        assert_eq!(m.envelope(&History::start(0.75)).unwrap(), 1.0);
    }

    #[test]
    fn kernel_density_is_beta_1_5_2_5() {
        let m = model();
        let h = History::start(0.5);
        let b = log_beta_function(1.5, 2.5).unwrap().exp();
        for y in [0.1f64, 0.5, 0.9] {
            let expected = y.powf(0.5) * (1.0 - y).powf(1.5) / b;
            let got = m.kernel().log_density(&h, 1.0, y).value().exp();
            assert!((got - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn initial_density_is_two_one_minus_x() {
        let m = model();
        for x in [0.0, 0.3, 0.9] {
            assert!((m.initial().log_density(x).value().exp() - 2.0 * (1.0 - x)).abs() < 1e-12);
        }
        let mass = integrate(|x| m.initial().log_density(x).value().exp(), 0.0, 1.0, 1e-12).value;
        assert!((mass - 1.0).abs() < 1e-8);
    }

    #[test]
    fn kernel_normalizes_on_grid() {
        let m = model();
        for t in 1..=10 {
            for i in 0..=10 {
                let x = i as f64 / 10.0;
                for a in 1..=8 {
                    let h = m.synthetic_history(t, x);
                    let law = m.kernel().law(&h, a as f64);
                    assert!((law.normalization(1e-11) - 1.0).abs() < 1e-8, "t={t} x={x} a={a}");
                }
            }
        }
    }

    #[test]
    fn tail_bound_at_two() {
        // B(3, 5/2) = 16/315.
        let expected = 315.0 / 16.0 / 1.5 * 0.5f64.powf(1.5);
        assert!((beta_tail_bound(2) - expected).abs() < 1e-12);
        assert!((beta_tail_bound(2) - 4.640_388_251_536_718).abs() < 1e-12);
    }

    #[test]
    fn tail_bound_ratio_tends_to_one_half() {
        let r = beta_tail_bound(401) / beta_tail_bound(400);
        assert!((r - 0.5).abs() < 5e-3, "{r}");
        assert!((2..60).all(|t| beta_tail_bound(t + 1) < beta_tail_bound(t)));
        let scaled = (2..=30).map(|t| beta_tail_bound(t) * 2f64.powi(t as i32) * (t as f64).powf(-2.5));
        assert!(scaled.fold(0.0, f64::max) < 10.0);
    }

    #[test]
    fn exclusion_bound_at_one() {
        // Closed form at t=1 with eps = gamma = 0.01: (eps - eps^2) + 4 sqrt(eps)(1 - eps/3).
        let v = beta_exclusion_bound(1, 0.01, 0.01);
        assert!((v - 0.408_566_666_666_666_67).abs() < 1e-12);
    }

    #[test]
    fn params_validated() {
        assert!(beta_example_model(BetaModelParams { p: 0, a_max: 8 }).is_err());
        assert!(beta_example_model(BetaModelParams { p: 5, a_max: 4 }).is_err());
    }
}
