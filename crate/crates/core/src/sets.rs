//! Closed subsets of the real line given as finite unions of closed intervals.

use std::fmt;

use crate::error::{MdpError, Result};

/// A finite union of pairwise disjoint closed intervals, stored sorted.
///
/// Applied to histories, the set constrains only the current state
/// coordinate; the earlier prefix is unconstrained.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedSetSpec {
    intervals: Vec<(f64, f64)>,
}

impl ClosedSetSpec {
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(MdpError::Empty("closed set needs at least one interval"));
        }
        for &(lo, hi) in &intervals {
            if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(MdpError::InvalidParameter(format!("bad interval [{lo}, {hi}]")));
            }
        }
        intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
        if intervals.windows(2).any(|w| w[0].1 >= w[1].0) {
            return Err(MdpError::InvalidParameter("intervals must be pairwise disjoint".into()));
        }
        Ok(Self { intervals })
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![(lo, hi)])
    }

    /// `[eps, 1/2] ∪ [1/2 + eps, 1]` for `eps` in `(0, 1/4]`.
    pub fn keps(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps <= 0.25) {
            return Err(MdpError::InvalidParameter(format!("eps must lie in (0, 1/4], got {eps}")));
        }
        Self::new(vec![(eps, 0.5), (0.5 + eps, 1.0)])
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(lo, hi)| lo <= x && x <= hi)
    }

    pub fn is_subset_of(&self, other: &ClosedSetSpec) -> bool {
        self.intervals.iter().all(|&(lo, hi)| other.intervals.iter().any(|&(a, b)| a <= lo && hi <= b))
    }

    /// Hull of the set.
    pub fn bounds(&self) -> (f64, f64) {
        (self.intervals[0].0, self.intervals.last().unwrap().1)
    }

    /// Evenly spaced points covering each interval, spacing at most `step`,
    /// endpoints included.
    pub fn net(&self, step: f64) -> Vec<Vec<f64>> {
        assert!(step > 0.0);
        self.intervals
            .iter()
            .map(|&(lo, hi)| {
                if hi == lo {
                    return vec![lo];
                }
                let n = ((hi - lo) / step).ceil().max(1.0) as usize;
                (0..=n).map(|i| if i == n { hi } else { lo + (hi - lo) * i as f64 / n as f64 }).collect()
            })
            .collect()
    }
}

impl fmt::Display for ClosedSetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.intervals.iter().map(|(a, b)| format!("[{a}, {b}]")).collect();
        f.write_str(&parts.join(" u "))
    }
}
