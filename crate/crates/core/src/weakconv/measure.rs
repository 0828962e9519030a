use std::fmt::Write as _;

use crate::error::{MdpError, Result};

/// Weights must sum to one within this tolerance.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// A finitely supported probability measure on the real line.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure {
    support: Vec<f64>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(support: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if support.is_empty() {
            return Err(MdpError::Empty("measure support"));
        }
        if support.len() != weights.len() {
            return Err(MdpError::InvalidParameter(format!(
                "{} support points but {} weights",
                support.len(),
                weights.len()
            )));
        }
        if support.iter().any(|x| !x.is_finite()) {
            return Err(MdpError::InvalidParameter("support points must be finite".into()));
        }
        if weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(MdpError::InvalidParameter("weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL * weights.len().max(1) as f64 {
            return Err(MdpError::InvalidParameter(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { support, weights })
    }

    pub fn point_mass(x: f64) -> Self {
        Self { support: vec![x], weights: vec![1.0] }
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.support.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(x, w)| x * w).sum()
    }

    /// `μ(A)` for the set described by `inside`.
    pub fn mass_where(&self, inside: impl Fn(f64) -> bool) -> f64 {
        self.iter().filter(|&(x, _)| inside(x)).map(|(_, w)| w).sum()
    }

    /// `λ μ + (1 - λ) ν`, as a concatenation of supports.
    pub fn mixture(&self, lambda: f64, other: &DiscreteMeasure) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(MdpError::InvalidParameter(format!("mixture weight {lambda} outside [0, 1]")));
        }
        let support = self.support.iter().chain(&other.support).copied().collect();
        let weights =
            self.weights.iter().map(|w| w * lambda).chain(other.weights.iter().map(|w| w * (1.0 - lambda))).collect();
        Ok(Self { support, weights })
    }

    /// Two-column CSV `point,weight` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("point,weight\n");
        for (x, w) in self.iter() {
            writeln!(out, "{x},{w}").unwrap();
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut support = Vec::new();
        let mut weights = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || (i == 0 && line.starts_with("point")) {
                continue;
            }
            let parse = |s: Option<&str>| -> Result<f64> {
                s.map(str::trim)
                    .ok_or_else(|| MdpError::Parse { line: i + 1, msg: "expected two columns".into() })?
                    .parse::<f64>()
                    .map_err(|e| MdpError::Parse { line: i + 1, msg: e.to_string() })
            };
            let mut cols = line.split(',');
            support.push(parse(cols.next())?);
            weights.push(parse(cols.next())?);
            if cols.next().is_some() {
                return Err(MdpError::Parse { line: i + 1, msg: "expected two columns".into() });
            }
        }
        Self::new(support, weights)
    }
}

/// Uniform weights `1/n` on the samples; duplicates are kept.
pub fn empirical_measure(samples: &[f64]) -> Result<DiscreteMeasure> {
    if samples.is_empty() {
        return Err(MdpError::Empty("sample list"));
    }
    let w = 1.0 / samples.len() as f64;
    let weights = vec![w; samples.len()];
    DiscreteMeasure::new(samples.to_vec(), weights)
}
