//! Net-based upper-semicontinuity margins.
//!
//! At a net point `y` the function is probed at `y ± r_k` with
//! `r_k = step · 2^{-k}`, `k = 0..=LADDER_RUNGS`, keeping only probes inside
//! the domain where the function is defined. The local excess is
//! `max(sup over the finest rung − u(y), 0)`, i.e. the `limsup` gap seen as
//! the radius shrinks; at `u(y) = -inf` the probes must keep falling.

use rayon::prelude::*;

use crate::extended::ExtendedReal;
use crate::sets::ClosedSetSpec;

pub const LADDER_RUNGS: i32 = 32;

/// Default relative tolerance: a point passes when its excess is at most
/// `USC_TOL · (1 + |u(y)|)`.
pub const USC_TOL: f64 = 1e-6;

/// Excess of the ladder limit over `u0`, scaled by `1 + |u0|`; `+inf` when
/// `u0 = -inf` but nearby values stay bounded below.
pub fn point_margin(
    y: f64,
    u0: ExtendedReal,
    domain: &ClosedSetSpec,
    step: f64,
    f: impl Fn(f64) -> Option<ExtendedReal>,
) -> f64 {
    let mut rungs: Vec<ExtendedReal> = Vec::with_capacity(LADDER_RUNGS as usize + 1);
    for k in 0..=LADDER_RUNGS {
        let r = step * 2f64.powi(-k);
        let best = [y - r, y + r].into_iter().filter(|&p| p != y && domain.contains(p)).filter_map(&f).max();
        match best {
            Some(b) => rungs.push(b),
            None if rungs.is_empty() => continue,
            // Probes have left the representable neighbourhood.
            None => break,
        }
    }
    let Some(&finest) = rungs.last() else { return 0.0 };
    if u0.is_finite() {
        if finest.is_neg_inf() {
            return 0.0;
        }
        return (finest.value() - u0.value()).max(0.0) / (1.0 + u0.value().abs());
    }
    if finest.is_neg_inf() {
        return 0.0;
    }
    let mid = rungs[rungs.len() / 2];
    let falling = rungs[rungs.len() / 2..].windows(2).all(|w| w[1] <= w[0]);
    if falling && finest.value() < mid.value() - 1.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct UscWitness {
    pub x: f64,
    /// Action index, for functions of `(x, a)`.
    pub action: Option<f64>,
    pub value: ExtendedReal,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UscScan {
    /// Largest scaled excess over the net.
    pub margin: f64,
    pub points: usize,
    /// Worst points, largest margin first.
    pub witnesses: Vec<UscWitness>,
}

pub const MAX_WITNESSES: usize = 10;

pub(crate) fn collect_scan(all: Vec<UscWitness>, tol: f64) -> UscScan {
    let points = all.len();
    let margin = all.iter().map(|w| w.margin).fold(0.0, f64::max);
    let mut witnesses: Vec<UscWitness> = all.into_iter().filter(|w| w.margin > tol).collect();
    witnesses.sort_by(|a, b| b.margin.total_cmp(&a.margin));
    witnesses.truncate(MAX_WITNESSES);
    UscScan { margin, points, witnesses }
}

/// Scan a function of one variable over the net of `domain`.
pub fn usc_scan(domain: &ClosedSetSpec, step: f64, f: impl Fn(f64) -> ExtendedReal + Sync, tol: f64) -> UscScan {
    let net: Vec<f64> = domain.net(step).into_iter().flatten().collect();
    let all = net
        .par_iter()
        .map(|&y| {
            let u0 = f(y);
            UscWitness { x: y, action: None, value: u0, margin: point_margin(y, u0, domain, step, |p| Some(f(p))) }
        })
        .collect();
    collect_scan(all, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> ClosedSetSpec {
        ClosedSetSpec::interval(0.0, 1.0).unwrap()
    }

    #[test]
    fn continuous_function_has_tiny_margin() {
        let s = usc_scan(&unit(), 1e-2, |x| ExtendedReal::finite((5.0 * x).sin()), USC_TOL);
        assert!(s.margin < 1e-9, "{}", s.margin);
        assert!(s.witnesses.is_empty());
    }

    #[test]
    fn upward_jump_is_caught() {
        // u = 1 on (0, 1], u(0) = 0: not usc at 0.
        let s = usc_scan(&unit(), 1e-2, |x| ExtendedReal::finite(if x > 0.0 { 1.0 } else { 0.0 }), USC_TOL);
        assert_eq!(s.margin, 1.0);
        assert_eq!(s.witnesses[0].x, 0.0);
    }

    #[test]
    fn downward_jump_is_usc() {
        let s = usc_scan(&unit(), 1e-2, |x| ExtendedReal::finite(if x > 0.5 { 0.0 } else { 1.0 }), USC_TOL);
        assert_eq!(s.margin, 0.0);
    }

    #[test]
    fn diverging_neg_inf_point_passes_but_isolated_one_fails() {
        let diverging = |x: f64| {
            if x == 1.0 {
                ExtendedReal::NEG_INF
            } else {
                ExtendedReal::finite(-1.0 / (1.0 - x).sqrt())
            }
        };
        let s = usc_scan(&unit(), 1e-2, diverging, USC_TOL);
        assert!(s.margin < USC_TOL);
        assert!(s.witnesses.is_empty());
        let isolated = |x: f64| if x == 1.0 { ExtendedReal::NEG_INF } else { ExtendedReal::ZERO };
        assert_eq!(usc_scan(&unit(), 1e-2, isolated, USC_TOL).margin, f64::INFINITY);
    }

    #[test]
    fn probes_stay_inside_domain() {
        let d = ClosedSetSpec::new(vec![(0.0, 0.4), (0.6, 1.0)]).unwrap();
        // The jump at 0.5 lies in the gap.
        let s = usc_scan(&d, 1e-2, |x| ExtendedReal::finite(if x > 0.5 { 10.0 } else { 0.0 }), USC_TOL);
        assert_eq!(s.margin, 0.0);
    }
}
