//! One-dimensional probability laws used for initial distributions, income
//! shocks and transition kernels.

use rand::{Rng, RngCore};
use rand_distr::{Beta, Distribution};

use crate::error::{MdpError, Result};
use crate::extended::ExtendedReal;
use crate::numerics::{beta_cdf, beta_log_density, integrate};

#[derive(Clone, Debug, PartialEq)]
pub enum ScalarLaw {
    Beta {
        alpha: f64,
        beta: f64,
    },
    Uniform {
        lo: f64,
        hi: f64,
    },
    Point(f64),
    /// Finitely supported law; `points` strictly increasing.
    Discrete {
        points: Vec<f64>,
        probs: Vec<f64>,
    },
}

impl ScalarLaw {
    pub fn beta(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(MdpError::InvalidParameter(format!("Beta({alpha}, {beta}) needs positive parameters")));
        }
        Ok(ScalarLaw::Beta { alpha, beta })
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi && lo.is_finite() && hi.is_finite()) {
            return Err(MdpError::InvalidParameter(format!("Uniform[{lo}, {hi}] is empty")));
        }
        Ok(ScalarLaw::Uniform { lo, hi })
    }

    pub fn discrete(points: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != probs.len() {
            return Err(MdpError::InvalidParameter("discrete law needs matching non-empty points and probs".into()));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(MdpError::InvalidParameter("discrete law points must be strictly increasing".into()));
        }
        let total: f64 = probs.iter().sum();
        if probs.iter().any(|&p| p < 0.0) || (total - 1.0).abs() > 1e-12 {
            return Err(MdpError::InvalidParameter(format!("discrete law probabilities sum to {total}")));
        }
        Ok(ScalarLaw::Discrete { points, probs })
    }

    pub fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        match self {
            ScalarLaw::Beta { alpha, beta } => {
                Beta::new(*alpha, *beta).expect("parameters validated at construction").sample(rng)
            }
            ScalarLaw::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            ScalarLaw::Point(p) => *p,
            ScalarLaw::Discrete { points, probs } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (x, p) in points.iter().zip(probs) {
                    acc += p;
                    if u < acc {
                        return *x;
                    }
                }
                // Rounding left a sliver above the cumulative sum.
                *points.iter().zip(probs).rev().find(|(_, p)| **p > 0.0).map(|(x, _)| x).unwrap()
            }
        }
    }

    /// Log-density w.r.t. Lebesgue measure, or log-pmf for atomic laws.
    pub fn log_density(&self, x: f64) -> ExtendedReal {
        let v = match self {
            ScalarLaw::Beta { alpha, beta } => beta_log_density(*alpha, *beta, x),
            ScalarLaw::Uniform { lo, hi } => {
                if (*lo..=*hi).contains(&x) {
                    -(hi - lo).ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
            ScalarLaw::Point(p) => {
                if x == *p {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
            ScalarLaw::Discrete { points, probs } => match points.iter().position(|&q| q == x) {
                Some(i) => probs[i].ln(),
                None => f64::NEG_INFINITY,
            },
        };
        ExtendedReal::new(v).unwrap_or(ExtendedReal::NEG_INF)
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, ScalarLaw::Point(_) | ScalarLaw::Discrete { .. })
    }

    /// `P(X <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            ScalarLaw::Beta { alpha, beta } => beta_cdf(*alpha, *beta, x),
            ScalarLaw::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            ScalarLaw::Point(p) => {
                if x >= *p {
                    1.0
                } else {
                    0.0
                }
            }
            ScalarLaw::Discrete { points, probs } => {
                points.iter().zip(probs).filter(|(q, _)| **q <= x).map(|(_, p)| p).sum()
            }
        }
    }

    /// Mass of `[lo, hi)`, or of `[lo, hi]` when `closed` is set.
    pub fn mass(&self, lo: f64, hi: f64, closed: bool) -> f64 {
        if hi < lo {
            return 0.0;
        }
        let inside = |x: f64| x >= lo && (x < hi || (closed && x == hi));
        match self {
            ScalarLaw::Beta { alpha, beta } => {
                if lo <= 0.0 && hi >= 1.0 {
                    1.0
                } else {
                    (beta_cdf(*alpha, *beta, hi) - beta_cdf(*alpha, *beta, lo)).max(0.0)
                }
            }
            ScalarLaw::Uniform { lo: a, hi: b } => {
                let overlap = hi.min(*b) - lo.max(*a);
                (overlap.max(0.0) / (b - a)).min(1.0)
            }
            ScalarLaw::Point(p) => {
                if inside(*p) {
                    1.0
                } else {
                    0.0
                }
            }
            ScalarLaw::Discrete { points, probs } => {
                points.iter().zip(probs).filter(|(q, _)| inside(**q)).map(|(_, p)| p).sum()
            }
        }
    }

    /// Smallest closed interval carrying all the mass.
    pub fn support(&self) -> (f64, f64) {
        match self {
            ScalarLaw::Beta { .. } => (0.0, 1.0),
            ScalarLaw::Uniform { lo, hi } => (*lo, *hi),
            ScalarLaw::Point(p) => (*p, *p),
            ScalarLaw::Discrete { points, .. } => (points[0], *points.last().unwrap()),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            ScalarLaw::Beta { alpha, beta } => alpha / (alpha + beta),
            ScalarLaw::Uniform { lo, hi } => 0.5 * (lo + hi),
            ScalarLaw::Point(p) => *p,
            ScalarLaw::Discrete { points, probs } => points.iter().zip(probs).map(|(x, p)| x * p).sum(),
        }
    }

    /// Law of `X + shift`. Beta laws cannot be shifted.
    pub fn shifted(&self, shift: f64) -> Result<Self> {
        match self {
            ScalarLaw::Uniform { lo, hi } => Ok(ScalarLaw::Uniform { lo: lo + shift, hi: hi + shift }),
            ScalarLaw::Point(p) => Ok(ScalarLaw::Point(p + shift)),
            ScalarLaw::Discrete { points, probs } => {
                Ok(ScalarLaw::Discrete { points: points.iter().map(|x| x + shift).collect(), probs: probs.clone() })
            }
            ScalarLaw::Beta { .. } => Err(MdpError::Unavailable("a shift of a beta law")),
        }
    }

    /// `E[g(X)]`, by quadrature for absolutely continuous laws.
    pub fn expectation<G: Fn(f64) -> f64>(&self, g: G, tol: f64) -> f64 {
        match self {
            ScalarLaw::Beta { alpha, beta } => {
                let (a, b) = (*alpha, *beta);
                integrate(|y| g(y) * beta_log_density(a, b, y).exp(), 0.0, 1.0, tol).value
            }
            ScalarLaw::Uniform { lo, hi } => integrate(&g, *lo, *hi, tol * (hi - lo)).value / (hi - lo),
            ScalarLaw::Point(p) => g(*p),
            ScalarLaw::Discrete { points, probs } => points.iter().zip(probs).map(|(x, p)| p * g(*x)).sum(),
        }
    }

    /// Total mass by quadrature of the density (or sum of the pmf).
    pub fn normalization(&self, tol: f64) -> f64 {
        match self {
            ScalarLaw::Point(_) => 1.0,
            ScalarLaw::Discrete { probs, .. } => probs.iter().sum(),
            _ => {
                let (lo, hi) = self.support();
                integrate(|y| self.log_density(y).value().exp(), lo, hi, tol).value
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::StreamFactory;

    #[test]
    fn beta_density_normalizes() {
        for (a, b) in [(1.0, 2.0), (1.5, 2.5), (10.3, 2.5)] {
            let law = ScalarLaw::beta(a, b).unwrap();
            assert!((law.normalization(1e-12) - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn beta_1_2_density_is_two_minus_two_x() {
        let law = ScalarLaw::beta(1.0, 2.0).unwrap();
        for x in [0.0, 0.25, 0.7] {
            assert!((law.log_density(x).value().exp() - 2.0 * (1.0 - x)).abs() < 1e-12);
        }
    }

    #[test]
    fn beta_sample_mean() {
        // Beta(1.5, 2.5): mean 0.375, variance ab/((a+b)^2(a+b+1)) = 3.75/80.
        let law = ScalarLaw::beta(1.5, 2.5).unwrap();
        let mut rng = StreamFactory::new(9).stream("beta-mean", 0);
        let n = 100_000;
        let mean = (0..n).map(|_| law.sample(&mut rng)).sum::<f64>() / n as f64;
        let sigma = (3.75f64 / 80.0 / n as f64).sqrt();
        assert!((mean - 0.375).abs() < 3.0 * sigma, "mean {mean}");
    }

    #[test]
    fn discrete_masses() {
        let law = ScalarLaw::discrete(vec![0.0, 1.0, 2.0], vec![0.25, 0.25, 0.5]).unwrap();
        assert_eq!(law.mass(0.0, 1.0, false), 0.25);
        assert_eq!(law.mass(0.0, 1.0, true), 0.5);
        assert_eq!(law.cdf(1.5), 0.5);
        assert!(ScalarLaw::discrete(vec![0.0, 1.0], vec![0.5, 0.6]).is_err());
    }

    #[test]
    fn point_mass_cells() {
        let law = ScalarLaw::Point(0.5);
        assert_eq!(law.mass(0.25, 0.5, false), 0.0);
        assert_eq!(law.mass(0.5, 0.75, false), 1.0);
        assert_eq!(law.mass(0.25, 0.5, true), 1.0);
    }
}
