//! Weak convergence against unbounded test functions on finitely supported
//! measures: integrals with split positive and negative parts, condition and
//! conclusion checkers, truncations and built-in scenarios.

mod checks;
mod measure;
mod scenarios;

use std::fmt;
use std::sync::Arc;

pub use checks::{
    check_aui, check_conclusion, check_convergence_conditions, AuiReport, AuiTarget, ConclusionReport,
    ConditionsReport, EpsConditions, Limit, AUI_TARGETS,
};
pub use measure::{empirical_measure, DiscreteMeasure, WEIGHT_SUM_TOL};
pub use scenarios::{default_ns, invsqrt_exclusion_radius, invsqrt_test_function, scenario, Scenario, SCENARIOS};

use crate::error::{MdpError, Result};
use crate::extended::ExtendedReal;
use crate::sets::ClosedSetSpec;

pub type EvalFn = dyn Fn(f64) -> ExtendedReal + Send + Sync;
pub type FamilyFn = dyn Fn(f64) -> Result<ClosedSetSpec> + Send + Sync;
pub type DeclaredSupFn = dyn Fn(&ClosedSetSpec) -> f64 + Send + Sync;

/// A function `u : Y -> [-inf, +inf)` with its closed family `ε -> Y_ε` and
/// the declared bound `M_ε` of `u⁺` on each member.
#[derive(Clone)]
pub struct TestFunction {
    name: String,
    eval: Arc<EvalFn>,
    domain: ClosedSetSpec,
    family: Option<Arc<FamilyFn>>,
    declared_sup: Option<Arc<DeclaredSupFn>>,
    sup_norm: Option<f64>,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("sup_norm", &self.sup_norm)
            .finish_non_exhaustive()
    }
}

impl TestFunction {
    pub fn new(
        name: impl Into<String>,
        domain: ClosedSetSpec,
        eval: impl Fn(f64) -> ExtendedReal + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), eval: Arc::new(eval), domain, family: None, declared_sup: None, sup_norm: None }
    }

    /// `u(x) = v` for finite `v`.
    pub fn from_fn(
        name: impl Into<String>,
        domain: ClosedSetSpec,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::new(name, domain, move |x| ExtendedReal::finite(f(x)))
    }

    pub fn with_family(mut self, family: impl Fn(f64) -> Result<ClosedSetSpec> + Send + Sync + 'static) -> Self {
        self.family = Some(Arc::new(family));
        self
    }

    pub fn with_declared_sup(mut self, sup: impl Fn(&ClosedSetSpec) -> f64 + Send + Sync + 'static) -> Self {
        self.declared_sup = Some(Arc::new(sup));
        self
    }

    /// Declares `sup |u| <= bound` on the whole domain.
    pub fn with_sup_norm(mut self, bound: f64) -> Self {
        self.sup_norm = Some(bound);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &ClosedSetSpec {
        &self.domain
    }

    pub fn sup_norm(&self) -> Option<f64> {
        self.sup_norm
    }

    pub fn eval(&self, x: f64) -> ExtendedReal {
        (self.eval)(x)
    }

    pub fn family(&self, eps: f64) -> Result<ClosedSetSpec> {
        match &self.family {
            Some(f) => f(eps),
            None => Err(MdpError::Unavailable("a closed family for the test function")),
        }
    }

    pub fn declared_sup_on(&self, set: &ClosedSetSpec) -> Option<f64> {
        self.declared_sup.as_ref().map(|f| f(set))
    }
}

/// `∫u dμ` with both parts kept; `value = -inf` whenever the negative part
/// is infinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub positive_part: f64,
    pub negative_part: f64,
    pub value: ExtendedReal,
}

impl Integral {
    fn from_parts(positive_part: f64, negative_part: f64) -> Self {
        let value = if negative_part.is_infinite() {
            ExtendedReal::NEG_INF
        } else {
            ExtendedReal::finite(positive_part - negative_part)
        };
        Self { positive_part, negative_part, value }
    }
}

pub fn integrate(mu: &DiscreteMeasure, u: &TestFunction) -> Integral {
    integrate_fn(mu, |x| u.eval(x))
}

pub(crate) fn integrate_fn(mu: &DiscreteMeasure, u: impl Fn(f64) -> ExtendedReal) -> Integral {
    let (mut pos, mut neg) = (0.0, 0.0);
    for (x, w) in mu.iter() {
        if w == 0.0 {
            continue;
        }
        let v = u(x);
        pos += w * v.positive_part();
        neg += w * v.negative_part();
    }
    Integral::from_parts(pos, neg)
}

/// Spacing of the net used to sample `|u|` in [`truncate_outside`].
pub const TRUNCATION_CHECK_STEP: f64 = 1e-3;

/// `u` on `Y_ε` and the constant `-sup_norm` elsewhere.
pub fn truncate_outside(u: &TestFunction, y_eps: &ClosedSetSpec, sup_norm: f64) -> Result<TestFunction> {
    if !(sup_norm > 0.0 && sup_norm.is_finite()) {
        return Err(MdpError::InvalidParameter(format!("sup_norm must be positive and finite, got {sup_norm}")));
    }
    for x in u.domain.net(TRUNCATION_CHECK_STEP).into_iter().flatten() {
        let v = u.eval(x);
        if v.is_neg_inf() || v.value().abs() > sup_norm {
            return Err(MdpError::Domain(format!("|u({x})| = {} exceeds sup_norm {sup_norm}", v.value().abs())));
        }
    }
    let inner = u.eval.clone();
    let set = y_eps.clone();
    let floor = ExtendedReal::finite(-sup_norm);
    let name = format!("{}_trunc[{}]", u.name, y_eps);
    Ok(TestFunction::new(name, u.domain.clone(), move |x| if set.contains(x) { inner(x) } else { floor })
        .with_sup_norm(sup_norm))
}

/// `max(u, -m)`.
pub fn monotone_floor(u: &TestFunction, m: f64) -> TestFunction {
    let inner = u.eval.clone();
    let floor = ExtendedReal::finite(-m);
    let mut out = TestFunction::new(format!("{} v -{m}", u.name), u.domain.clone(), move |x| inner(x).max(floor));
    out.family = u.family.clone();
    out.declared_sup = u.declared_sup.clone();
    // Flooring cannot increase |u|.
    out.sup_norm = u.sup_norm;
    out
}
