//! Numerical checkers for the tail condition, tight sets, envelope
//! domination, strong coercivity and kernel continuity.
//!
//! Every checker is a necessary-condition battery on finite nets; none is a
//! proof. Reports carry witnesses so failures can be inspected.

mod coercivity;
mod kernel;
mod usc;

use rayon::prelude::*;

pub use coercivity::{check_strong_coercivity, CoercivityReport, LevelSetBound, ACTION_CAP, LEVEL_SET_PROBES};
pub use kernel::{check_kernel_continuity, KernelContinuityReport, KERNEL_QUAD_TOL, KERNEL_TOL};
pub use usc::{point_margin, usc_scan, UscScan, UscWitness, LADDER_RUNGS, MAX_WITNESSES, USC_TOL};

use crate::error::{MdpError, Result};
use crate::mdp::{ModelSpec, StateSpace};
use crate::report::{Report, ToReport};
use crate::sets::ClosedSetSpec;
use crate::simulate::truncation_bound;

/// Sufficient check of the tail condition through the dominating series
/// `b_t >= sup_π E^π[r_t^+]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionCReport {
    pub t_max: usize,
    pub tol: f64,
    /// `b_1, ..., b_{t_max}`.
    pub per_t_bounds: Vec<f64>,
    /// `sum_{t > t_max} b_t`, summed until negligible.
    pub remainder: f64,
    /// Entry `n - 1` is `sup_{p >= n} sum_{t=n}^p b_t`, which for a
    /// nonnegative series is the full tail from `n`.
    pub partial_tail_sups: Vec<f64>,
    /// Smallest `n` whose tail is below `tol`.
    pub converged_at: Option<usize>,
    pub certified: bool,
}

/// Fails with [`MdpError::Unavailable`] when the model declares no bound
/// series: the condition then cannot be certified either way.
pub fn check_condition_c(model: &ModelSpec, t_max: usize, tol: f64) -> Result<ConditionCReport> {
    if t_max == 0 {
        return Err(MdpError::InvalidParameter("t_max must be positive".into()));
    }
    if !(tol > 0.0) {
        return Err(MdpError::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    if !model.has_tail_bound() {
        return Err(MdpError::Unavailable("a tail bound series; cannot certify"));
    }
    let per_t_bounds: Vec<f64> = (1..=t_max).map(|t| model.tail_bound(t)).collect::<Result<_>>()?;
    if let Some(b) = per_t_bounds.iter().find(|b| !(**b >= 0.0)) {
        return Err(MdpError::Domain(format!("tail bound {b} is not a nonnegative number")));
    }
    let remainder = truncation_bound(model, t_max)?;
    let mut partial_tail_sups = vec![0.0; t_max];
    let mut running = remainder;
    for n in (0..t_max).rev() {
        running += per_t_bounds[n];
        partial_tail_sups[n] = running;
    }
    let converged_at = partial_tail_sups.iter().position(|&s| s < tol).map(|i| i + 1);
    Ok(ConditionCReport {
        t_max,
        tol,
        certified: converged_at.is_some(),
        per_t_bounds,
        remainder,
        partial_tail_sups,
        converged_at,
    })
}

/// Dyadic search grid for the tight-set radius.
pub const TIGHT_SET_EXPONENTS: std::ops::RangeInclusive<i32> = 2..=20;

#[derive(Clone, Debug, PartialEq)]
pub struct TightSet {
    pub set: ClosedSetSpec,
    pub eps: f64,
    pub achieved_bound: f64,
}

/// The coarsest `K_ε`, `ε = 2^{-k}`, whose exclusion bound (with `γ = ε`)
/// falls below `target`.
pub fn find_tight_set(model: &ModelSpec, t: usize, target: f64) -> Result<TightSet> {
    if t == 0 {
        return Err(MdpError::InvalidParameter("t must be >= 1".into()));
    }
    if !(target > 0.0) {
        return Err(MdpError::InvalidParameter(format!("target must be positive, got {target}")));
    }
    let mut best = (f64::INFINITY, f64::NAN);
    for k in TIGHT_SET_EXPONENTS {
        let eps = 2f64.powi(-k);
        let bound = model.exclusion_bound(t, eps, eps)?;
        if bound < target {
            return Ok(TightSet { set: ClosedSetSpec::keps(eps)?, eps, achieved_bound: bound });
        }
        if bound < best.0 {
            best = (bound, eps);
        }
    }
    Err(MdpError::TargetUnreachable { target, best: best.0, eps: best.1 })
}

/// Relative slack in `max(1, r⁺) <= Φ`.
pub const ENVELOPE_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct EnvelopeViolation {
    pub x: f64,
    pub action: f64,
    /// `max(1, r⁺)`.
    pub lhs: f64,
    pub envelope: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnvelopeReport {
    pub t: usize,
    pub passed: bool,
    /// Number of `(x, a)` pairs tested.
    pub checked: usize,
    pub violations: usize,
    /// Largest `max(1, r⁺) / Φ`.
    pub worst_ratio: f64,
    /// Up to [`MAX_WITNESSES`] violations, worst first, ties by `x`.
    pub witnesses: Vec<EnvelopeViolation>,
}

/// Net points of the state space at `t`: `n_points` evenly spaced points
/// for intervals, every point for finite sets.
fn state_net(model: &ModelSpec, t: usize, n_points: usize) -> Vec<f64> {
    match model.state_space(t) {
        StateSpace::Finite(v) => v,
        StateSpace::Interval { lo, hi } => {
            let n = n_points.max(2);
            (0..n).map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect()
        }
    }
}

pub fn check_envelope_domination(
    model: &ModelSpec,
    t: usize,
    n_points: usize,
    action_cap: usize,
) -> Result<EnvelopeReport> {
    if t == 0 {
        return Err(MdpError::InvalidParameter("t must be >= 1".into()));
    }
    let per_point: Vec<(usize, Vec<EnvelopeViolation>, f64)> = state_net(model, t, n_points)
        .par_iter()
        .map(|&x| {
            let h = model.synthetic_history(t, x);
            let phi = model.envelope_unchecked(&h);
            let actions = model.actions_at(&h).enumerate_capped(action_cap).actions;
            let mut bad = Vec::new();
            let mut worst = 0.0f64;
            for &a in &actions {
                let lhs = model.reward_unchecked(&h, a).positive_part().max(1.0);
                worst = worst.max(lhs / phi);
                if lhs > phi * (1.0 + ENVELOPE_SLACK) {
                    bad.push(EnvelopeViolation { x, action: a, lhs, envelope: phi });
                }
            }
            (actions.len(), bad, worst)
        })
        .collect();
    let checked = per_point.iter().map(|p| p.0).sum();
    let worst_ratio = per_point.iter().map(|p| p.2).fold(0.0, f64::max);
    let mut all: Vec<EnvelopeViolation> = per_point.into_iter().flat_map(|p| p.1).collect();
    let violations = all.len();
    all.sort_by(|a, b| (b.lhs / b.envelope).total_cmp(&(a.lhs / a.envelope)).then(a.x.total_cmp(&b.x)));
    all.truncate(MAX_WITNESSES);
    Ok(EnvelopeReport { t, passed: violations == 0, checked, violations, worst_ratio, witnesses: all })
}

impl ToReport for ConditionCReport {
    fn to_report(&self) -> Report {
        Report::new("condition_c")
            .field("certified", self.certified)
            .field("t_max", self.t_max)
            .field("tol", self.tol)
            .opt("converged_at", self.converged_at)
            .field("remainder", self.remainder)
            .list("per_t_bounds", &self.per_t_bounds)
            .list("partial_tail_sups", &self.partial_tail_sups)
    }
}

impl ToReport for TightSet {
    fn to_report(&self) -> Report {
        Report::new("tight_set")
            .field("set", &self.set)
            .field("eps", self.eps)
            .field("achieved_bound", self.achieved_bound)
    }
}

impl ToReport for EnvelopeReport {
    fn to_report(&self) -> Report {
        Report::new("envelope")
            .field("passed", self.passed)
            .field("t", self.t)
            .field("checked", self.checked)
            .field("violations", self.violations)
            .field("worst_ratio", self.worst_ratio)
            .list(
                "witnesses",
                self.witnesses
                    .iter()
                    .map(|w| format!("x={} a={} max(1,r+)={} envelope={}", w.x, w.action, w.lhs, w.envelope)),
            )
    }
}
