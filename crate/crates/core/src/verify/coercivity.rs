use rayon::prelude::*;

use super::usc::{collect_scan, point_margin, UscScan, UscWitness, USC_TOL};
use crate::error::{MdpError, Result};
use crate::extended::ExtendedReal;
use crate::mdp::{ActionSet, ModelSpec};
use crate::report::{Report, ToReport};
use crate::sets::ClosedSetSpec;

/// Actions per state scanned by the coercivity and continuity checkers.
pub const ACTION_CAP: usize = 16;

/// Beyond the enumerated integers, actions `a_max · 2^k` for `k = 1..=20`
/// are probed for level-set membership.
pub const LEVEL_SET_PROBES: i32 = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct LevelSetBound {
    pub beta: f64,
    /// Largest action with `r(x, a) >= β` over the net; `None` if no action
    /// reaches the level.
    pub max_action: Option<f64>,
    /// Some state still reaches the level at the largest probe.
    pub unbounded: bool,
    /// State attaining `max_action`, or the first unbounded one.
    pub witness: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoercivityReport {
    pub t: usize,
    pub domain: ClosedSetSpec,
    pub net_step: f64,
    pub passed: bool,
    pub usc: UscScan,
    pub level_sets: Vec<LevelSetBound>,
}

impl CoercivityReport {
    pub fn usc_margin(&self) -> f64 {
        self.usc.margin
    }
}

pub fn check_strong_coercivity(
    model: &ModelSpec,
    t: usize,
    domain: &ClosedSetSpec,
    net_step: f64,
    betas: &[f64],
) -> Result<CoercivityReport> {
    if t == 0 {
        return Err(MdpError::InvalidParameter("t must be >= 1".into()));
    }
    if !(net_step > 0.0 && net_step <= 1e-2) {
        return Err(MdpError::InvalidParameter(format!("net_step must lie in (0, 1e-2], got {net_step}")));
    }
    let net: Vec<f64> = domain.net(net_step).into_iter().flatten().collect();
    let reward_at = |x: f64, a: f64| -> Option<ExtendedReal> {
        let h = model.synthetic_history(t, x);
        model.actions_at(&h).contains(a).then(|| model.reward_unchecked(&h, a))
    };

    let all: Vec<UscWitness> = net
        .par_iter()
        .flat_map_iter(|&y| {
            let h = model.synthetic_history(t, y);
            let actions = model.actions_at(&h).enumerate_capped(ACTION_CAP).actions;
            actions
                .into_iter()
                .map(|a| {
                    let u0 = model.reward_unchecked(&h, a);
                    let margin = point_margin(y, u0, domain, net_step, |p| reward_at(p, a));
                    UscWitness { x: y, action: Some(a), value: u0, margin }
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let usc = collect_scan(all, USC_TOL);

    let level_sets = betas
        .iter()
        .map(|&beta| {
            let level = ExtendedReal::finite(beta);
            let per_point: Vec<(f64, Option<f64>, bool)> = net
                .par_iter()
                .map(|&x| {
                    let h = model.synthetic_history(t, x);
                    let set = model.actions_at(&h);
                    let mut candidates = set.enumerate_capped(ACTION_CAP).actions;
                    if let ActionSet::PositiveIntegers { a_max } = set {
                        candidates.extend((1..=LEVEL_SET_PROBES).map(|k| a_max as f64 * 2f64.powi(k)));
                    }
                    let top = *candidates.last().expect("non-empty admissible set");
                    let reaches = |a: f64| model.reward_unchecked(&h, a) >= level;
                    let best = candidates
                        .iter()
                        .copied()
                        .filter(|&a| reaches(a))
                        .fold(None, |m: Option<f64>, a| Some(m.map_or(a, |m| m.max(a))));
                    let unbounded = set.is_truncated() && reaches(top);
                    (x, best, unbounded)
                })
                .collect();
            let unbounded_at = per_point.iter().find(|p| p.2).map(|p| p.0);
            let best = per_point.iter().filter_map(|&(x, a, _)| a.map(|a| (a, x))).fold(
                None,
                |m: Option<(f64, f64)>, (a, x)| match m {
                    Some((ma, _)) if ma >= a => m,
                    _ => Some((a, x)),
                },
            );
            LevelSetBound {
                beta,
                max_action: best.map(|b| b.0),
                unbounded: unbounded_at.is_some(),
                witness: unbounded_at.or(best.map(|b| b.1)),
            }
        })
        .collect::<Vec<_>>();

    let passed = usc.margin <= USC_TOL && level_sets.iter().all(|l| !l.unbounded);
    Ok(CoercivityReport { t, domain: domain.clone(), net_step, passed, usc, level_sets })
}

impl ToReport for CoercivityReport {
    fn to_report(&self) -> Report {
        Report::new("coercivity")
            .field("passed", self.passed)
            .field("t", self.t)
            .field("domain", &self.domain)
            .field("net_step", self.net_step)
            .field("net_points", self.usc.points)
            .field("usc_margin", self.usc.margin)
            .children(
                "level_sets",
                self.level_sets
                    .iter()
                    .map(|l| {
                        Report::new(format!("beta={}", l.beta))
                            .opt("max_action", l.max_action)
                            .field("unbounded", l.unbounded)
                            .opt("witness", l.witness)
                    })
                    .collect(),
            )
            .list(
                "witnesses",
                self.usc.witnesses.iter().map(|w| {
                    format!(
                        "x={} a={} r={} margin={}",
                        w.x,
                        w.action.map_or("-".into(), |a| a.to_string()),
                        w.value,
                        w.margin
                    )
                }),
            )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{beta_example_model, BetaModelParams};

    fn beta() -> ModelSpec {
        beta_example_model(BetaModelParams::default()).unwrap()
    }

    #[test]
    fn full_domain_fails_near_zero() {
        let full = ClosedSetSpec::interval(0.0, 1.0).unwrap();
        let r = check_strong_coercivity(&beta(), 1, &full, 1e-3, &[-10.0]).unwrap();
        assert!(!r.passed);
        assert!(r.usc_margin() > 10.0);
        assert!(r.usc.witnesses[0].x < 1e-2, "{}", r.to_report());
    }

    #[test]
    fn keps_passes() {
        let k = ClosedSetSpec::keps(0.1).unwrap();
        let r = check_strong_coercivity(&beta(), 1, &k, 1e-3, &[-10.0, 0.0]).unwrap();
        assert!(r.passed, "{}", r.to_report());
        assert!(r.usc_margin() < 1e-6);
        // a ≤ 10 √(1 - x) ≤ 10 √0.4 on [0.6, 1].
        assert_eq!(r.level_sets[0].max_action, Some(6.0));
        assert!(r.level_sets.iter().all(|l| !l.unbounded));
    }

    #[test]
    fn zero_reward_passes_with_zero_margin() {
        let m = beta().with_reward(|_, _| ExtendedReal::ZERO);
        // Compact action slices only: on (1/2, 1] every action reaches any
        // level below zero.
        let d = ClosedSetSpec::new(vec![(0.0, 0.3), (0.35, 0.5)]).unwrap();
        let r = check_strong_coercivity(&m, 2, &d, 1e-2, &[-1.0]).unwrap();
        assert!(r.passed);
        assert_eq!(r.usc_margin(), 0.0);
        let d = ClosedSetSpec::interval(0.7, 1.0).unwrap();
        let r = check_strong_coercivity(&m, 2, &d, 1e-2, &[-1.0]).unwrap();
        assert_eq!(r.usc_margin(), 0.0);
        assert!(r.level_sets[0].unbounded);
    }

    #[test]
    fn unbounded_level_set_flagged() {
        // Reward independent of the action on the unrestricted branch.
        let m = beta().with_reward(|h, _| ExtendedReal::finite(-h.state()));
        let d = ClosedSetSpec::interval(0.6, 1.0).unwrap();
        let r = check_strong_coercivity(&m, 1, &d, 1e-2, &[-5.0]).unwrap();
        assert!(!r.passed);
        assert!(r.level_sets[0].unbounded);
    }

    #[test]
    fn coarse_step_rejected() {
        let d = ClosedSetSpec::interval(0.0, 1.0).unwrap();
        assert!(check_strong_coercivity(&beta(), 1, &d, 0.1, &[]).is_err());
    }
}
