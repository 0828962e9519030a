//! Capital accumulation with random income and power utility.
//!
//! Capital evolves as `X_{t+1} = (1 + rho)(X_t - A_t) + Ξ_t` with
//! consumption `A_t ∈ [0, X_t]` and reward `β^t A_t^σ`. States at time `t`
//! stay in `[0, k_t]`, which keeps the positive rewards summable whenever
//! `β (1 + rho)^σ < 1`.

use crate::error::{MdpError, Result};
use crate::extended::ExtendedReal;
use crate::law::ScalarLaw;
use crate::mdp::{ActionSet, History, ModelSpec, StateSpace, TransitionKernel};

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthModelParams {
    pub rho: f64,
    pub sigma: f64,
    pub beta_discount: f64,
    /// Upper end of the income support.
    pub z: f64,
    /// Initial capital.
    pub d: f64,
    /// Law of the income shocks, supported in `[0, z]`.
    pub income: ScalarLaw,
}

impl Default for GrowthModelParams {
    fn default() -> Self {
        Self {
            rho: 0.05,
            sigma: 0.5,
            beta_discount: 0.95,
            z: 1.0,
            d: 1.0,
            income: ScalarLaw::Uniform { lo: 0.0, hi: 1.0 },
        }
    }
}

impl GrowthModelParams {
    /// `β (1 + rho)^σ`, which must be below one.
    pub fn discount_growth_factor(&self) -> f64 {
        self.beta_discount * (1.0 + self.rho).powf(self.sigma)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(MdpError::InvalidParameter(m));
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return bad(format!("rho must be positive, got {}", self.rho));
        }
        if !(self.sigma > 0.0 && self.sigma < 1.0) {
            return bad(format!("sigma must lie in (0, 1), got {}", self.sigma));
        }
        if !(self.beta_discount > 0.0 && self.beta_discount < 1.0) {
            return bad(format!("beta must lie in (0, 1), got {}", self.beta_discount));
        }
        if !(self.z >= 1.0 && self.z.is_finite()) {
            return bad(format!("z must be >= 1, got {}", self.z));
        }
        if !(self.d > 0.0 && self.d.is_finite()) {
            return bad(format!("d must be positive, got {}", self.d));
        }
        let (lo, hi) = self.income.support();
        if lo < 0.0 || hi > self.z || matches!(self.income, ScalarLaw::Beta { .. }) {
            return bad(format!("income law must be a shiftable law supported in [0, {}]", self.z));
        }
        let f = self.discount_growth_factor();
        if !(f < 1.0) {
            return bad(format!("beta * (1 + rho)^sigma = {f} violates beta * (1 + rho)^sigma < 1"));
        }
        Ok(())
    }
}

/// `k_t = (1+rho)^t d + z (1+rho) [(1+rho)^{t-1} - 1] / rho`.
pub fn capital_bound_k(t: usize, params: &GrowthModelParams) -> f64 {
    assert!(t >= 1, "capital bound is defined for t >= 1");
    let g = 1.0 + params.rho;
    g.powi(t as i32) * params.d + params.z * g * (g.powi(t as i32 - 1) - 1.0) / params.rho
}

/// `m_t = k_t^σ`, the bound on the undiscounted utility at time `t`.
pub fn utility_bound_m(t: usize, params: &GrowthModelParams) -> f64 {
    capital_bound_k(t, params).powf(params.sigma)
}

pub fn growth_model(params: GrowthModelParams) -> Result<ModelSpec> {
    params.validate()?;
    let p = params.clone();
    let state_space = move |t: usize| StateSpace::Interval { lo: 0.0, hi: capital_bound_k(t.max(1), &p) };
    let (beta, sigma) = (params.beta_discount, params.sigma);
    let reward = move |h: &History, a: f64| ExtendedReal::finite(beta.powi(h.time() as i32) * a.powf(sigma));
    let (growth, income) = (1.0 + params.rho, params.income.clone());
    let kernel = TransitionKernel::new(move |h: &History, a| {
        income.shifted(growth * (h.state() - a).max(0.0)).expect("income law is shiftable")
    });
    let p = params.clone();
    let envelope = move |h: &History| utility_bound_m(h.time(), &p).max(1.0);
    let p = params.clone();
    let tail = move |t: usize| p.beta_discount.powi(t as i32) * utility_bound_m(t.max(1), &p);
    let model = ModelSpec::new(
        "growth",
        state_space,
        |h: &History| ActionSet::Interval { lo: 0.0, hi: h.state() },
        reward,
        kernel,
        envelope,
        ScalarLaw::Point(params.d),
    )
    .markov(true)
    .with_horizon_hint(20)
    .with_tail_bound(tail);
    Ok(model)
}
