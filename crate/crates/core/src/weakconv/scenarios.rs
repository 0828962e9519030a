//! Built-in sequences, limits and test functions.

use std::sync::Arc;

use super::{empirical_measure, DiscreteMeasure, Limit, TestFunction};
use crate::error::{MdpError, Result};
use crate::extended::ExtendedReal;
use crate::law::ScalarLaw;
use crate::numerics::StreamFactory;
use crate::sets::ClosedSetSpec;

pub const SCENARIOS: [&str; 3] = ["beta12-invsqrt", "usc-counterexample", "bounded-control"];

const SAMPLE_TAG: &str = "weakconv-samples";

#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: &'static str,
    pub ns: Vec<usize>,
    pub seq: Vec<DiscreteMeasure>,
    pub limit: Limit,
    pub u: TestFunction,
    pub eps_list: Vec<f64>,
    pub net_step: f64,
    /// Allowed final margin for the conclusion check.
    pub tol: f64,
    pub c_grid: Vec<f64>,
}

pub fn default_ns(name: &str) -> Vec<usize> {
    match name {
        "usc-counterexample" => (0..11).map(|k| 1 << k).collect(),
        "bounded-control" => vec![100, 10_000],
        _ => vec![100, 1_000, 10_000, 100_000],
    }
}

/// `r` with `4 √r (1 - r/3) = eps / 4`: the `Beta(1, 2)` integral of
/// `x^{-1/2}` over `[0, r)` is then a quarter of `eps`.
pub fn invsqrt_exclusion_radius(eps: f64) -> f64 {
    let target = eps / 4.0;
    let f = |r: f64| 4.0 * r.sqrt() * (1.0 - r / 3.0);
    if target >= f(0.5) {
        return 0.5;
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    // Take the side whose exclusion integral stays within the target.
    lo
}

/// Pieces of `[0, 1]` not covered by `set`.
fn complement_in_unit(set: &ClosedSetSpec) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut cursor = 0.0f64;
    for &(lo, hi) in set.intervals() {
        if lo > cursor {
            out.push((cursor, lo.min(1.0)));
        }
        cursor = cursor.max(hi);
    }
    if cursor < 1.0 {
        out.push((cursor, 1.0));
    }
    out.retain(|&(a, b)| b > a);
    out
}

/// `∫_a^b g · 2(1 - x) dx` via an antiderivative, split at `1/2`.
fn beta12_piecewise(pieces: &[(f64, f64)], below_half: impl Fn(f64) -> f64, above_half: impl Fn(f64) -> f64) -> f64 {
    pieces
        .iter()
        .map(|&(a, b)| {
            let (a, b) = (a.clamp(0.0, 1.0), b.clamp(0.0, 1.0));
            let mut s = 0.0;
            if a < 0.5 {
                s += below_half(b.min(0.5)) - below_half(a);
            }
            if b > 0.5 {
                s += above_half(b) - above_half(a.max(0.5));
            }
            s
        })
        .sum()
}

/// `Beta(1, 2)` antiderivatives of `x^{-1/2} · 2(1-x)` and `2(1-x)`.
fn invsqrt_antiderivative(x: f64) -> f64 {
    4.0 * x.sqrt() - 4.0 / 3.0 * x.powf(1.5)
}

fn beta12_cdf(x: f64) -> f64 {
    2.0 * x - x * x
}

fn beta12_samples(seed: u64, n: usize) -> Vec<f64> {
    let law = ScalarLaw::beta(1.0, 2.0).expect("valid shapes");
    let mut rng = StreamFactory::new(seed).stream(SAMPLE_TAG, 0);
    (0..n).map(|_| law.sample(&mut rng)).collect()
}

fn unit() -> ClosedSetSpec {
    ClosedSetSpec::interval(0.0, 1.0).expect("unit interval")
}

/// Prefixes of one sample stream.
fn prefix_measures(samples: &[f64], ns: &[usize]) -> Result<Vec<DiscreteMeasure>> {
    ns.iter().map(|&n| empirical_measure(&samples[..n])).collect()
}

pub fn invsqrt_test_function() -> TestFunction {
    TestFunction::new("x^-1/2 on (0,1/2]", unit(), |x| {
        if x > 0.0 && x <= 0.5 {
            ExtendedReal::finite(x.sqrt().recip())
        } else {
            ExtendedReal::ZERO
        }
    })
    .with_family(|eps| ClosedSetSpec::interval(invsqrt_exclusion_radius(eps), 1.0))
    .with_declared_sup(|set| {
        let lo = set.bounds().0;
        if lo > 0.5 {
            0.0
        } else if lo > 0.0 {
            lo.sqrt().recip()
        } else {
            f64::INFINITY
        }
    })
}

pub fn scenario(name: &str, ns: Option<&[usize]>, seed: u64) -> Result<Scenario> {
    let ns = ns.map(<[usize]>::to_vec).unwrap_or_else(|| default_ns(name));
    if ns.is_empty() || ns.contains(&0) {
        return Err(MdpError::InvalidParameter("sample sizes must be positive and non-empty".into()));
    }
    let n_max = *ns.iter().max().unwrap();
    match name {
        "beta12-invsqrt" => {
            let samples = beta12_samples(seed, n_max);
            let value = 5.0 * 2f64.sqrt() / 3.0;
            Ok(Scenario {
                name: "beta12-invsqrt",
                seq: prefix_measures(&samples, &ns)?,
                ns,
                limit: Limit::ClosedForm {
                    value,
                    positive_part: value,
                    exclusion: Arc::new(|set| {
                        // u⁺ ∨ 1 is x^{-1/2} below 1/2 and 1 above.
                        beta12_piecewise(&complement_in_unit(set), invsqrt_antiderivative, beta12_cdf)
                    }),
                    provenance: "Beta(1,2) integral of x^-1/2 over (0,1/2] = 5 sqrt(2)/3".into(),
                },
                u: invsqrt_test_function(),
                eps_list: vec![0.5, 0.25, 0.1],
                net_step: 1e-3,
                tol: 0.05,
                c_grid: vec![1.0, 10.0, 100.0, 1e3, 1e4],
            })
        }
        "usc-counterexample" => {
            let u = TestFunction::from_fn("1{x>0}", unit(), |x| if x > 0.0 { 1.0 } else { 0.0 })
                .with_family(|_| ClosedSetSpec::interval(0.0, 1.0))
                .with_declared_sup(|_| 1.0)
                .with_sup_norm(1.0);
            Ok(Scenario {
                name: "usc-counterexample",
                seq: ns.iter().map(|&n| DiscreteMeasure::point_mass(1.0 / n as f64)).collect(),
                ns,
                limit: DiscreteMeasure::point_mass(0.0).into(),
                u,
                eps_list: vec![0.5, 0.1],
                net_step: 1e-3,
                tol: 1e-9,
                c_grid: vec![0.5, 2.0],
            })
        }
        "bounded-control" => {
            let samples = beta12_samples(seed, n_max);
            let u = TestFunction::from_fn("x", unit(), |x| x)
                .with_family(|_| ClosedSetSpec::interval(0.0, 1.0))
                .with_declared_sup(|set| set.bounds().1)
                .with_sup_norm(1.0);
            // 3 standard errors of the mean of Beta(1, 2) at the largest n.
            let sd = (1.0f64 / 18.0).sqrt();
            let tol = 3.0 * sd / (*ns.last().unwrap() as f64).sqrt();
            Ok(Scenario {
                name: "bounded-control",
                seq: prefix_measures(&samples, &ns)?,
                ns,
                limit: Limit::ClosedForm {
                    value: 1.0 / 3.0,
                    positive_part: 1.0 / 3.0,
                    exclusion: Arc::new(|set| beta12_piecewise(&complement_in_unit(set), beta12_cdf, beta12_cdf)),
                    provenance: "Beta(1,2) mean 1/3".into(),
                },
                u,
                eps_list: vec![0.5, 0.1, 0.01],
                net_step: 1e-3,
                tol,
                c_grid: vec![2.0, 10.0],
            })
        }
        other => Err(MdpError::InvalidParameter(format!(
            "unknown scenario {other:?}; expected one of {}",
            SCENARIOS.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate;

    #[test]
    fn radius_solves_the_exclusion_equation() {
        for eps in [0.5, 0.25, 0.1, 0.01] {
            let r = invsqrt_exclusion_radius(eps);
            let v = 4.0 * r.sqrt() * (1.0 - r / 3.0);
            assert!(v <= eps / 4.0 && (v - eps / 4.0).abs() < 1e-14, "{eps}: {v}");
        }
    }

    #[test]
    fn closed_form_exclusion_matches_quadrature() {
        let sc = scenario("beta12-invsqrt", Some(&[10]), 1).unwrap();
        let Limit::ClosedForm { exclusion, value, .. } = &sc.limit else { panic!() };
        let q = integrate(|x| x.sqrt().recip() * 2.0 * (1.0 - x), 0.0, 0.5, 1e-12).value;
        assert!((q - value).abs() < 1e-10);
        let set = ClosedSetSpec::new(vec![(0.01, 0.3), (0.6, 0.9)]).unwrap();
        let direct = integrate(|x| x.sqrt().recip() * 2.0 * (1.0 - x), 0.0, 0.01, 1e-13).value
            + integrate(|x| x.sqrt().recip() * 2.0 * (1.0 - x), 0.3, 0.5, 1e-13).value
            + integrate(|x| 2.0 * (1.0 - x), 0.5, 0.6, 1e-13).value
            + integrate(|x| 2.0 * (1.0 - x), 0.9, 1.0, 1e-13).value;
        assert!((exclusion(&set) - direct).abs() < 1e-10, "{} vs {direct}", exclusion(&set));
    }

    #[test]
    fn unknown_scenario_rejected() {
        assert!(matches!(scenario("nope", None, 1), Err(MdpError::InvalidParameter(_))));
    }

    #[test]
    fn prefixes_are_nested() {
        let sc = scenario("bounded-control", Some(&[3, 7]), 5).unwrap();
        assert_eq!(sc.seq[0].support(), &sc.seq[1].support()[..3]);
    }
}
