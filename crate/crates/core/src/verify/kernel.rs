use rayon::prelude::*;

use super::coercivity::ACTION_CAP;
use crate::error::{MdpError, Result};
use crate::mdp::ModelSpec;
use crate::report::{Report, ToReport};
use crate::sets::ClosedSetSpec;
use crate::weakconv::TestFunction;

/// `ω` must stay below this multiple of the declared `sup |g|`.
pub const KERNEL_TOL: f64 = 1e-2;
pub const KERNEL_QUAD_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct KernelContinuityReport {
    pub t: usize,
    pub domain: ClosedSetSpec,
    pub net_step: f64,
    /// Largest `|Q_t g(x, a) - Q_t g(x', a)|` over adjacent net points.
    pub omega: f64,
    /// `KERNEL_TOL · sup |g|`.
    pub allowance: f64,
    pub pairs: usize,
    /// `(x, x', a)` attaining `omega`.
    pub worst: Option<(f64, f64, f64)>,
    pub passed: bool,
}

/// Empirical modulus of continuity of `(x, a) -> ∫ g dQ_t(· | x, a)` on
/// the net of `domain`, one action at a time. `g` must declare its bound.
pub fn check_kernel_continuity(
    model: &ModelSpec,
    t: usize,
    g: &TestFunction,
    domain: &ClosedSetSpec,
    net_step: f64,
) -> Result<KernelContinuityReport> {
    let Some(bound) = g.sup_norm() else {
        return Err(MdpError::InvalidParameter(format!("test function {} has no declared bound", g.name())));
    };
    if t == 0 {
        return Err(MdpError::InvalidParameter("t must be >= 1".into()));
    }
    if !(net_step > 0.0) {
        return Err(MdpError::InvalidParameter(format!("net_step must be positive, got {net_step}")));
    }
    let qg = |x: f64, a: f64| {
        let h = model.synthetic_history(t, x);
        model.kernel().law(&h, a).expectation(|y| g.eval(y).value(), KERNEL_QUAD_TOL)
    };
    let pairs: Vec<(f64, f64)> = domain
        .net(net_step)
        .into_iter()
        .flat_map(|pts| pts.windows(2).map(|w| (w[0], w[1])).collect::<Vec<_>>())
        .collect();
    let diffs: Vec<(usize, f64, Option<(f64, f64, f64)>)> = pairs
        .par_iter()
        .map(|&(x, x2)| {
            let h = model.synthetic_history(t, x);
            let h2 = model.synthetic_history(t, x2);
            let set2 = model.actions_at(&h2);
            let mut count = 0;
            let mut worst = (0.0, None);
            for a in model.actions_at(&h).enumerate_capped(ACTION_CAP).actions {
                if !set2.contains(a) {
                    continue;
                }
                count += 1;
                let d = (qg(x, a) - qg(x2, a)).abs();
                if d > worst.0 || worst.1.is_none() {
                    worst = (d, Some((x, x2, a)));
                }
            }
            (count, worst.0, worst.1)
        })
        .collect();
    let n_pairs = diffs.iter().map(|d| d.0).sum();
    let (omega, worst) = diffs.iter().filter(|d| d.2.is_some()).fold((0.0f64, None), |acc, d| {
        if d.1 > acc.0 || acc.1.is_none() {
            (d.1, d.2)
        } else {
            acc
        }
    });
    let allowance = KERNEL_TOL * bound;
    Ok(KernelContinuityReport {
        t,
        domain: domain.clone(),
        net_step,
        passed: omega <= allowance,
        omega,
        allowance,
        pairs: n_pairs,
        worst,
    })
}

impl ToReport for KernelContinuityReport {
    fn to_report(&self) -> Report {
        Report::new("kernel_continuity")
            .field("passed", self.passed)
            .field("t", self.t)
            .field("domain", &self.domain)
            .field("net_step", self.net_step)
            .field("pairs", self.pairs)
            .field("omega", self.omega)
            .field("allowance", self.allowance)
            .opt("worst", self.worst.map(|(x, x2, a)| format!("x={x} x'={x2} a={a}")))
    }
}
