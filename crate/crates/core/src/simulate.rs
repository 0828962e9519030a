//! Monte Carlo sampling of trajectories and estimation of the total-reward
//! functional `J(P^π) = Σ ∫ r_t⁺ dP^π − Σ ∫ r_t⁻ dP^π`.

use rand::RngCore;
use rayon::prelude::*;

use crate::error::{MdpError, Result};
use crate::extended::ExtendedReal;
use crate::mdp::{Action, History, ModelSpec, Policy, State};
use crate::numerics::StreamFactory;

/// Stream tag for trajectory `i` of an estimate.
pub const TRAJECTORY_TAG: &str = "trajectory";

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    /// `x_1, ..., x_T`.
    pub states: Vec<State>,
    /// `a_1, ..., a_T`.
    pub actions: Vec<Action>,
    /// `r_t(h_t, a_t)` for `t = 1..=T`.
    pub per_step_rewards: Vec<ExtendedReal>,
    pub seed_id: u64,
    /// Some action came from a truncated enumeration.
    pub truncated: bool,
}

impl Trajectory {
    pub fn horizon(&self) -> usize {
        self.states.len()
    }

    /// The history `h_t` (1-based `t`).
    pub fn history(&self, t: usize) -> History {
        History::from_parts(self.states[..t].to_vec(), self.actions[..t - 1].to_vec())
            .expect("trajectory prefix is well formed")
    }
}

/// Draw `(x_1, a_1, ..., x_T, a_T)` from `P^π`.
pub fn sample_trajectory(
    model: &ModelSpec,
    policy: &Policy,
    horizon: usize,
    rng: &mut dyn RngCore,
    seed_id: u64,
) -> Result<Trajectory> {
    if horizon == 0 {
        return Err(MdpError::InvalidParameter("horizon must be >= 1".into()));
    }
    let x1 = model.initial().sample(rng);
    let mut h = History::start(x1);
    let mut actions = Vec::with_capacity(horizon);
    let mut rewards = Vec::with_capacity(horizon);
    let mut truncated = false;
    for t in 1..=horizon {
        if !model.state_space(t).contains(h.state()) {
            return Err(MdpError::StateOutOfSpace { index: t });
        }
        let draw = policy.act(model, &h, rng)?;
        truncated |= draw.truncated;
        rewards.push(model.reward_unchecked(&h, draw.action));
        actions.push(draw.action);
        if t < horizon {
            let next = model.kernel().sample(&h, draw.action, rng);
            h.push(draw.action, next);
        }
    }
    let states = h.states().to_vec();
    Ok(Trajectory { states, actions, per_step_rewards: rewards, seed_id, truncated })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimatorConfig {
    /// A single positive step reward above this trips the positive-part flag.
    pub positive_flag_threshold: f64,
    /// A single finite step reward below minus this trips the negative-part flag.
    pub negative_flag_threshold: f64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self { positive_flag_threshold: 1e12, negative_flag_threshold: 1e12 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RewardEstimate {
    /// Estimate of `Σ_t ∫ r_t⁺`; `+inf` when the positive flag is set.
    pub positive_part: f64,
    /// Estimate of `Σ_t ∫ r_t⁻`; `+inf` when the negative flag is set.
    pub negative_part: f64,
    pub positive_infinite: bool,
    pub negative_infinite: bool,
    pub value: ExtendedReal,
    pub std_error: f64,
    pub n_samples: usize,
    pub horizon: usize,
    /// `Σ_{t > horizon} tail_bound(t)`, when the model declares one.
    pub truncation_bound: Option<f64>,
    /// Fraction of trajectories with a `-inf` step.
    pub neg_inf_fraction: f64,
    /// Fraction of trajectories that used a truncated action enumeration.
    pub truncated_fraction: f64,
    pub per_step_positive: Vec<f64>,
    pub per_step_positive_se: Vec<f64>,
    /// Mean of `r_t⁻`; `+inf` at steps where some trajectory hit `-inf`.
    pub per_step_negative: Vec<f64>,
}

struct PathSummary {
    positive: Vec<f64>,
    negative: Vec<f64>,
    neg_inf: bool,
    pos_flag: bool,
    neg_flag: bool,
    truncated: bool,
}

fn summarize(traj: &Trajectory, cfg: &EstimatorConfig) -> PathSummary {
    let mut s = PathSummary {
        positive: Vec::with_capacity(traj.horizon()),
        negative: Vec::with_capacity(traj.horizon()),
        neg_inf: false,
        pos_flag: false,
        neg_flag: false,
        truncated: traj.truncated,
    };
    for r in &traj.per_step_rewards {
        let (p, n) = (r.positive_part(), r.negative_part());
        s.neg_inf |= r.is_neg_inf();
        s.pos_flag |= p > cfg.positive_flag_threshold;
        s.neg_flag |= n.is_finite() && n > cfg.negative_flag_threshold;
        s.positive.push(p);
        s.negative.push(n);
    }
    s
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Monte Carlo estimate of `J` truncated at `horizon`. Trajectory `i` uses
/// stream `(seed, "trajectory", i)`, so results do not depend on the
/// number of worker threads.
pub fn estimate_reward_functional(
    model: &ModelSpec,
    policy: &Policy,
    horizon: usize,
    n_samples: usize,
    streams: &StreamFactory,
    cfg: &EstimatorConfig,
) -> Result<RewardEstimate> {
    if n_samples < 2 {
        return Err(MdpError::TooFewSamples(n_samples));
    }
    let summaries: Vec<PathSummary> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = streams.stream(TRAJECTORY_TAG, i);
            let id = streams.stream_id(TRAJECTORY_TAG, i);
            sample_trajectory(model, policy, horizon, &mut rng, id).map(|t| summarize(&t, cfg))
        })
        .collect::<Result<_>>()?;

    let n = n_samples as f64;
    let pos_flag = summaries.iter().any(|s| s.pos_flag);
    let neg_inf_count = summaries.iter().filter(|s| s.neg_inf).count();
    let neg_flag = neg_inf_count > 0 || summaries.iter().any(|s| s.neg_flag);

    let mut per_step_positive = Vec::with_capacity(horizon);
    let mut per_step_positive_se = Vec::with_capacity(horizon);
    let mut per_step_negative = Vec::with_capacity(horizon);
    let mut column = vec![0.0; n_samples];
    for t in 0..horizon {
        for (c, s) in column.iter_mut().zip(&summaries) {
            *c = s.positive[t];
        }
        let (m, se) = mean_and_se(&column);
        per_step_positive.push(m);
        per_step_positive_se.push(se);
        per_step_negative.push(summaries.iter().map(|s| s.negative[t]).sum::<f64>() / n);
    }

    let finite_totals: Vec<f64> = summaries
        .iter()
        .filter(|s| !s.neg_inf && !s.pos_flag && !s.neg_flag)
        .map(|s| s.positive.iter().sum::<f64>() - s.negative.iter().sum::<f64>())
        .collect();
    let std_error = if finite_totals.is_empty() { 0.0 } else { mean_and_se(&finite_totals).1 };

    let positive_part = if pos_flag { f64::INFINITY } else { per_step_positive.iter().sum() };
    let negative_part = if neg_flag { f64::INFINITY } else { per_step_negative.iter().sum() };
    let value = if neg_flag {
        ExtendedReal::NEG_INF
    } else if pos_flag {
        return Err(MdpError::UnboundedAbove);
    } else {
        ExtendedReal::finite(positive_part - negative_part)
    };

    Ok(RewardEstimate {
        positive_part,
        negative_part,
        positive_infinite: pos_flag,
        negative_infinite: neg_flag,
        value,
        std_error,
        n_samples,
        horizon,
        truncation_bound: truncation_bound(model, horizon).ok(),
        neg_inf_fraction: neg_inf_count as f64 / n,
        truncated_fraction: summaries.iter().filter(|s| s.truncated).count() as f64 / n,
        per_step_positive,
        per_step_positive_se,
        per_step_negative,
    })
}

/// Upper bound on `sup_π E^π[r_t⁺]`.
pub fn tail_bound(model: &ModelSpec, t: usize) -> Result<f64> {
    model.tail_bound(t)
}

/// Terms summed before a tail series is declared divergent.
pub const TAIL_SUM_MAX_TERMS: usize = 1_000_000;

/// `Σ_{t > after} tail_bound(t)`, summed until the terms stop contributing
/// in double precision. Returns `+inf` if that does not happen within
/// [`TAIL_SUM_MAX_TERMS`] terms.
pub fn truncation_bound(model: &ModelSpec, after: usize) -> Result<f64> {
    let mut sum = 0.0;
    for t in after + 1..=after + TAIL_SUM_MAX_TERMS {
        let b = model.tail_bound(t)?;
        if !b.is_finite() {
            return Ok(f64::INFINITY);
        }
        sum += b;
        if b == 0.0 || b <= sum * 1e-17 {
            return Ok(sum);
        }
    }
    Ok(f64::INFINITY)
}

impl crate::report::ToReport for RewardEstimate {
    fn to_report(&self) -> crate::report::Report {
        crate::report::Report::new("estimate")
            .field("value", self.value)
            .field("std_error", self.std_error)
            .field("positive_part", self.positive_part)
            .field("negative_part", self.negative_part)
            .field("positive_infinite", self.positive_infinite)
            .field("negative_infinite", self.negative_infinite)
            .field("n_samples", self.n_samples)
            .field("horizon", self.horizon)
            .opt("truncation_bound", self.truncation_bound)
            .field("neg_inf_fraction", self.neg_inf_fraction)
            .field("truncated_fraction", self.truncated_fraction)
            .list("per_step_positive", &self.per_step_positive)
            .list("per_step_positive_se", &self.per_step_positive_se)
            .list("per_step_negative", &self.per_step_negative)
    }
}
