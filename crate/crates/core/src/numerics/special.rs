//! Beta-function numerics, backed by statrs.

use crate::error::{MdpError, Result};

/// Natural log of the beta function `B(a, b)`.
pub fn log_beta_function(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(MdpError::Domain(format!("beta function needs positive arguments, got ({a}, {b})")));
    }
    Ok(statrs::function::beta::ln_beta(a, b))
}

pub fn beta_function(a: f64, b: f64) -> Result<f64> {
    log_beta_function(a, b).map(f64::exp)
}

/// Regularized incomplete beta `I_x(a, b)`, i.e. the Beta(a, b) CDF at `x`.
pub fn beta_cdf(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        statrs::function::beta::beta_reg(a, b, x)
    }
}

/// Log-density of Beta(a, b) at `x`; `-inf` off the support.
pub fn beta_log_density(a: f64, b: f64, x: f64) -> f64 {
    if !(0.0..=1.0).contains(&x) {
        return f64::NEG_INFINITY;
    }
    let lb = statrs::function::beta::ln_beta(a, b);
    let lx = if a == 1.0 { 0.0 } else { (a - 1.0) * x.ln() };
    let l1x = if b == 1.0 { 0.0 } else { (b - 1.0) * (1.0 - x).ln() };
    let v = lx + l1x - lb;
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn known_values() {
        // Gamma(1)Gamma(2)/Gamma(3) = 1/2, B(1,1) = 1.
        assert!(rel(beta_function(1.0, 2.0).unwrap(), 0.5) < 1e-12);
        assert!(rel(beta_function(1.0, 1.0).unwrap(), 1.0) < 1e-12);
        // Gamma(2)Gamma(5/2)/Gamma(9/2) = (3/4 sqrt(pi)) / (105/16 sqrt(pi)) = 4/35.
        assert!(rel(beta_function(2.0, 2.5).unwrap(), 4.0 / 35.0) < 1e-12);
        assert!(rel(beta_function(3.0, 2.5).unwrap(), 16.0 / 315.0) < 1e-12);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(log_beta_function(0.0, 1.0).is_err());
        assert!(log_beta_function(1.0, -2.0).is_err());
    }

    #[test]
    fn cdf_closed_form_beta_1_2() {
        for x in [0.0, 0.1, 0.5, 0.9, 1.0] {
            let exact = 1.0 - (1.0 - x) * (1.0f64 - x);
            assert!((beta_cdf(1.0, 2.0, x) - exact).abs() < 1e-14);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn symmetry_and_recurrence(a in 0.05f64..40.0, b in 0.05f64..40.0) {
            let bab = beta_function(a, b).unwrap();
            prop_assert!(rel(beta_function(b, a).unwrap(), bab) < 1e-12);
            let next = beta_function(a + 1.0, b).unwrap();
            prop_assert!(rel(next, bab * a / (a + b)) < 1e-12);
        }
    }
}
