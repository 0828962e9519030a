use std::fmt;
use std::sync::Arc;

use super::{integrate, DiscreteMeasure, Integral, TestFunction};
use crate::error::{MdpError, Result};
use crate::report::{Report, ToReport};
use crate::sets::ClosedSetSpec;
use crate::verify::{usc_scan, UscScan, USC_TOL};

pub type ExclusionFn = dyn Fn(&ClosedSetSpec) -> f64 + Send + Sync;

/// The limit measure: either a measure we can sum over, or closed-form
/// integrals supplied with their provenance.
#[derive(Clone)]
pub enum Limit {
    Measure(DiscreteMeasure),
    ClosedForm {
        /// `∫u dμ`.
        value: f64,
        /// `∫u⁺ dμ`.
        positive_part: f64,
        /// `Y_ε -> ∫_{Y \ Y_ε} (u⁺ ∨ 1) dμ`.
        exclusion: Arc<ExclusionFn>,
        provenance: String,
    },
}

impl fmt::Debug for Limit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Limit::Measure(m) => f.debug_tuple("Measure").field(&m.len()).finish(),
            Limit::ClosedForm { value, provenance, .. } => {
                f.debug_struct("ClosedForm").field("value", value).field("provenance", provenance).finish()
            }
        }
    }
}

impl From<DiscreteMeasure> for Limit {
    fn from(m: DiscreteMeasure) -> Self {
        Limit::Measure(m)
    }
}

impl Limit {
    fn integral(&self, u: &TestFunction) -> Integral {
        match self {
            Limit::Measure(m) => integrate(m, u),
            Limit::ClosedForm { value, positive_part, .. } => Integral {
                positive_part: *positive_part,
                negative_part: positive_part - value,
                value: crate::extended::ExtendedReal::finite(*value),
            },
        }
    }

    fn exclusion(&self, u: &TestFunction, y_eps: &ClosedSetSpec) -> f64 {
        match self {
            Limit::Measure(m) => exclusion_integral(m, u, y_eps),
            Limit::ClosedForm { exclusion, .. } => exclusion(y_eps),
        }
    }

    fn describe(&self) -> String {
        match self {
            Limit::Measure(m) => format!("discrete measure with {} atoms", m.len()),
            Limit::ClosedForm { provenance, .. } => format!("closed form ({provenance})"),
        }
    }
}

/// `∫_{Y \ Y_ε} (u⁺ ∨ 1) dμ`, summed exactly.
fn exclusion_integral(mu: &DiscreteMeasure, u: &TestFunction, y_eps: &ClosedSetSpec) -> f64 {
    mu.iter().filter(|&(x, w)| w > 0.0 && !y_eps.contains(x)).map(|(x, w)| w * u.eval(x).positive_part().max(1.0)).sum()
}

/// Hypotheses at one `ε`.
#[derive(Clone, Debug)]
pub struct EpsConditions {
    pub eps: f64,
    pub y_eps: ClosedSetSpec,
    /// `∫u⁺ d(limit)`.
    pub limit_positive_part: f64,
    pub positive_part_finite: bool,
    /// `sup_n ∫_{Y \ Y_ε} (u⁺ ∨ 1) dμ_n` over the supplied sequence.
    pub sequence_exclusion_sup: f64,
    pub sequence_exclusion_holds: bool,
    pub limit_exclusion: f64,
    pub limit_exclusion_holds: bool,
    pub usc: UscScan,
    pub usc_holds: bool,
    pub declared_sup: Option<f64>,
    /// Largest `u⁺` seen on the net and on the measure supports inside `Y_ε`.
    pub sampled_sup: f64,
    pub declared_sup_holds: bool,
    /// (a), (b) on the limit, and (c). The sequence form of (b) is reported
    /// separately: on empirical measures it is subject to sampling noise.
    pub certified: bool,
}

#[derive(Clone, Debug)]
pub struct ConditionsReport {
    pub test_function: String,
    pub limit: String,
    pub per_eps: Vec<EpsConditions>,
    pub certified: bool,
}

/// Relative slack when comparing the declared `M_ε` with sampled values.
const DECLARED_SUP_SLACK: f64 = 1e-12;

pub fn check_convergence_conditions(
    seq: &[DiscreteMeasure],
    limit: &Limit,
    u: &TestFunction,
    eps_list: &[f64],
    net_step: f64,
) -> Result<ConditionsReport> {
    if !(net_step > 0.0) {
        return Err(MdpError::InvalidParameter(format!("net_step must be positive, got {net_step}")));
    }
    let limit_int = limit.integral(u);
    let mut per_eps = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        if !(eps > 0.0) {
            return Err(MdpError::InvalidParameter(format!("eps must be positive, got {eps}")));
        }
        let y_eps = u.family(eps)?;
        let positive_part_finite = limit_int.positive_part.is_finite();
        let sequence_exclusion_sup = seq.iter().map(|m| exclusion_integral(m, u, &y_eps)).fold(0.0, f64::max);
        let limit_exclusion = limit.exclusion(u, &y_eps);
        let usc = usc_scan(&y_eps, net_step, |x| u.eval(x), USC_TOL);
        let usc_holds = usc.margin <= USC_TOL;
        let on_net = y_eps.net(net_step).into_iter().flatten();
        let on_support = seq.iter().flat_map(|m| m.support().iter().copied()).filter(|&x| y_eps.contains(x));
        let sampled_sup = on_net.chain(on_support).map(|x| u.eval(x).positive_part()).fold(0.0, f64::max);
        let declared_sup = u.declared_sup_on(&y_eps);
        let declared_sup_holds =
            declared_sup.is_some_and(|m| sampled_sup <= m * (1.0 + DECLARED_SUP_SLACK) + DECLARED_SUP_SLACK);
        let limit_exclusion_holds = limit_exclusion < eps;
        per_eps.push(EpsConditions {
            eps,
            certified: positive_part_finite && limit_exclusion_holds && usc_holds && declared_sup_holds,
            y_eps,
            limit_positive_part: limit_int.positive_part,
            positive_part_finite,
            sequence_exclusion_holds: sequence_exclusion_sup < eps,
            sequence_exclusion_sup,
            limit_exclusion,
            limit_exclusion_holds,
            usc,
            usc_holds,
            declared_sup,
            sampled_sup,
            declared_sup_holds,
        });
    }
    Ok(ConditionsReport {
        test_function: u.name().to_string(),
        limit: limit.describe(),
        certified: !per_eps.is_empty() && per_eps.iter().all(|e| e.certified),
        per_eps,
    })
}

/// Running tail maxima of `∫u dμ_n` against `∫u d(limit)`.
#[derive(Clone, Debug)]
pub struct ConclusionReport {
    pub integrals: Vec<Integral>,
    /// `sup_{j >= k} ∫u dμ_j`.
    pub tail_sups: Vec<f64>,
    pub limit_value: f64,
    /// `tail_sups[k] - limit_value`.
    pub margins: Vec<f64>,
    /// `|∫u dμ_last - ∫u d(limit)|`.
    pub final_abs_gap: f64,
    pub tol: f64,
    /// The finite-sequence reading of `limsup ∫u dμ_n <= ∫u dμ`: the last
    /// margin is at most `tol`.
    pub holds: bool,
}

impl ConclusionReport {
    pub fn verdict(&self) -> &'static str {
        if self.holds {
            "HOLDS"
        } else {
            "VIOLATED"
        }
    }
}

pub fn check_conclusion(
    seq: &[DiscreteMeasure],
    limit: &Limit,
    u: &TestFunction,
    tol: f64,
) -> Result<ConclusionReport> {
    if seq.is_empty() {
        return Err(MdpError::Empty("measure sequence"));
    }
    let integrals: Vec<Integral> = seq.iter().map(|m| integrate(m, u)).collect();
    let mut tail_sups = vec![f64::NEG_INFINITY; integrals.len()];
    let mut running = f64::NEG_INFINITY;
    for (k, i) in integrals.iter().enumerate().rev() {
        running = running.max(i.value.value());
        tail_sups[k] = running;
    }
    let limit_value = limit.integral(u).value.value();
    let margins: Vec<f64> = tail_sups.iter().map(|s| s - limit_value).collect();
    let last = integrals.last().unwrap().value.value();
    let final_abs_gap = if last == limit_value { 0.0 } else { (last - limit_value).abs() };
    let holds = *margins.last().unwrap() <= tol;
    Ok(ConclusionReport { integrals, tail_sups, limit_value, margins, final_abs_gap, tol, holds })
}

/// Targets `ε` for which [`check_aui`] looks for a threshold.
pub const AUI_TARGETS: [f64; 2] = [0.1, 0.01];

#[derive(Clone, Debug, PartialEq)]
pub struct AuiTarget {
    pub eps: f64,
    /// Smallest `C` on the grid, and for it the smallest index `n₀`, with
    /// `∫_{|u| >= C} |u| dμ_n < ε` for every `n >= n₀` in the sequence.
    pub achieved: Option<(usize, f64)>,
}

#[derive(Clone, Debug)]
pub struct AuiReport {
    pub c_grid: Vec<f64>,
    /// `tails[k][j] = ∫_{|u| >= c_grid[j]} |u| dμ_k`.
    pub tails: Vec<Vec<f64>>,
    pub targets: Vec<AuiTarget>,
}

pub fn check_aui(seq: &[DiscreteMeasure], u: &TestFunction, c_grid: &[f64]) -> Result<AuiReport> {
    if c_grid.iter().any(|c| !(*c > 0.0)) {
        return Err(MdpError::InvalidParameter("c_grid entries must be positive".into()));
    }
    let mut c_grid = c_grid.to_vec();
    c_grid.sort_by(f64::total_cmp);
    let tails: Vec<Vec<f64>> = seq
        .iter()
        .map(|m| {
            let abs: Vec<(f64, f64)> = m
                .iter()
                .filter(|&(_, w)| w > 0.0)
                .map(|(x, w)| {
                    let v = u.eval(x);
                    (if v.is_neg_inf() { f64::INFINITY } else { v.value().abs() }, w)
                })
                .collect();
            c_grid.iter().map(|&c| abs.iter().filter(|&&(a, _)| a >= c).map(|&(a, w)| w * a).sum()).collect()
        })
        .collect();
    let targets = AUI_TARGETS
        .iter()
        .map(|&eps| {
            let achieved = (0..c_grid.len()).find_map(|j| {
                // Smallest n₀ such that every later tail is below eps.
                let mut n0 = tails.len();
                while n0 > 0 && tails[n0 - 1][j] < eps {
                    n0 -= 1;
                }
                (n0 < tails.len()).then_some((n0, c_grid[j]))
            });
            AuiTarget { eps, achieved }
        })
        .collect();
    Ok(AuiReport { c_grid, tails, targets })
}

impl ToReport for EpsConditions {
    fn to_report(&self) -> Report {
        Report::new(format!("eps={}", self.eps))
            .field("y_eps", &self.y_eps)
            .field("certified", self.certified)
            .field("limit_positive_part", self.limit_positive_part)
            .field("positive_part_finite", self.positive_part_finite)
            .field("limit_exclusion", self.limit_exclusion)
            .field("limit_exclusion_holds", self.limit_exclusion_holds)
            .field("sequence_exclusion_sup", self.sequence_exclusion_sup)
            .field("sequence_exclusion_holds", self.sequence_exclusion_holds)
            .field("usc_margin", self.usc.margin)
            .field("usc_holds", self.usc_holds)
            .opt("declared_sup", self.declared_sup)
            .field("sampled_sup", self.sampled_sup)
            .field("declared_sup_holds", self.declared_sup_holds)
            .list(
                "usc_witnesses",
                self.usc.witnesses.iter().map(|w| format!("x={} u={} margin={}", w.x, w.value, w.margin)),
            )
    }
}

impl ToReport for ConditionsReport {
    fn to_report(&self) -> Report {
        Report::new("conditions")
            .field("test_function", &self.test_function)
            .field("limit", &self.limit)
            .field("certified", self.certified)
            .children("per_eps", self.per_eps.iter().map(ToReport::to_report).collect())
    }
}

impl ToReport for ConclusionReport {
    fn to_report(&self) -> Report {
        Report::new("conclusion")
            .field("verdict", self.verdict())
            .field("limit_value", self.limit_value)
            .field("tol", self.tol)
            .field("final_margin", self.margins.last().copied().unwrap_or(f64::NAN))
            .field("final_abs_gap", self.final_abs_gap)
            .list("integrals", self.integrals.iter().map(|i| i.value))
            .list("margins", &self.margins)
    }
}

impl ToReport for AuiReport {
    fn to_report(&self) -> Report {
        Report::new("aui").list("c_grid", &self.c_grid).children(
            "targets",
            self.targets
                .iter()
                .map(|t| {
                    let r = Report::new(format!("eps={}", t.eps)).field("uniformly_integrable", t.achieved.is_some());
                    match t.achieved {
                        Some((n0, c)) => r.field("n0_index", n0).field("c", c),
                        None => r,
                    }
                })
                .collect(),
        )
    }
}
