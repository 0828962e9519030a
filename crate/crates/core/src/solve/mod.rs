//! Discretized backward induction, exact policy evaluation and a
//! brute-force oracle for tiny instances.

mod discretize;
mod dp;
mod finite;

use std::fmt::Write as _;

pub use discretize::{cell_row, discretize};
pub use dp::{
    brute_force_optimal, evaluate_policy_backward, evaluate_policy_exact, initial_value, value_iteration, PolicyTable,
    ValueTable, BRUTE_FORCE_LIMIT,
};
pub use finite::{Choice, DenseSpec, FiniteMDP, Provenance, Slice, SparseRow, ROW_SUM_TOL};

use crate::error::Result;
use crate::extended::ExtendedReal;
use crate::mdp::ModelSpec;
use crate::numerics::StreamFactory;
use crate::simulate::{estimate_reward_functional, EstimatorConfig, RewardEstimate};

/// CSV with columns `t,state_value,value,action`.
pub fn tables_to_csv(fm: &FiniteMDP, values: &ValueTable, policy: &PolicyTable) -> String {
    let mut out = String::from("t,state_value,value,action\n");
    for t in 1..=fm.horizon() {
        for (s, x) in fm.states_at(t).iter().enumerate() {
            let a = fm.choices(t, s)[policy.at(t, s)].action;
            writeln!(out, "{t},{x},{},{a}", values.at(t, s)).unwrap();
        }
    }
    out
}

/// The solution at one grid size.
#[derive(Clone, Debug)]
pub struct Solution {
    pub fm: FiniteMDP,
    pub values: ValueTable,
    pub policy: PolicyTable,
    pub value: ExtendedReal,
}

pub fn solve_discretized(model: &ModelSpec, n_states: usize, a_max: u64, horizon: usize) -> Result<Solution> {
    let fm = discretize(model, n_states, a_max, horizon)?;
    let (values, policy) = value_iteration(&fm);
    let value = initial_value(&fm, &values);
    Ok(Solution { fm, values, policy, value })
}

/// Values at `n` and at the refined grid `2n - 1`, which keeps every
/// coarse point (and so `1/2`) on the fine grid.
#[derive(Clone, Debug)]
pub struct Refinement {
    pub coarse: Solution,
    pub fine_n: usize,
    pub fine_value: ExtendedReal,
    /// `|V_fine - V_coarse|`: an estimate, not a certified bound.
    pub gap: f64,
}

pub fn refine(model: &ModelSpec, n_states: usize, a_max: u64, horizon: usize) -> Result<Refinement> {
    let coarse = solve_discretized(model, n_states, a_max, horizon)?;
    let fine_n = 2 * n_states - 1;
    let fine = solve_discretized(model, fine_n, a_max, horizon)?;
    let gap = match (coarse.value.is_finite(), fine.value.is_finite()) {
        (true, true) => (fine.value.value() - coarse.value.value()).abs(),
        (false, false) => 0.0,
        _ => f64::INFINITY,
    };
    Ok(Refinement { coarse, fine_n, fine_value: fine.value, gap })
}

/// Monte Carlo evaluation of a discretized policy on the original model.
#[derive(Clone, Debug)]
pub struct CrossCheck {
    pub dp_value: ExtendedReal,
    pub gap: f64,
    pub estimate: RewardEstimate,
    /// `|MC - DP|`.
    pub discrepancy: f64,
    /// `3 SE + gap`.
    pub allowance: f64,
    pub passed: bool,
}

pub fn cross_check(
    model: &ModelSpec,
    refinement: &Refinement,
    n_samples: usize,
    streams: &StreamFactory,
) -> Result<CrossCheck> {
    let sol = &refinement.coarse;
    let policy = sol.policy.to_policy(&sol.fm);
    let estimate =
        estimate_reward_functional(model, &policy, sol.fm.horizon(), n_samples, streams, &EstimatorConfig::default())?;
    let (discrepancy, allowance) = if estimate.value.is_finite() && sol.value.is_finite() {
        ((estimate.value.value() - sol.value.value()).abs(), 3.0 * estimate.std_error + refinement.gap)
    } else {
        (if estimate.value == sol.value { 0.0 } else { f64::INFINITY }, 3.0 * estimate.std_error + refinement.gap)
    };
    Ok(CrossCheck {
        dp_value: sol.value,
        gap: refinement.gap,
        passed: discrepancy <= allowance,
        estimate,
        discrepancy,
        allowance,
    })
}
