use std::collections::HashMap;

use rayon::prelude::*;

use super::finite::{Choice, FiniteMDP, Provenance, Slice, SparseRow};
use crate::error::{MdpError, Result};
use crate::law::ScalarLaw;
use crate::mdp::{ActionSet, CellGrid, ModelSpec, StateSpace};

/// Round to 12 significant digits so that laws differing only by
/// floating-point noise share one row.
fn quantize(v: f64) -> u64 {
    if v == 0.0 || !v.is_finite() {
        return v.to_bits();
    }
    let scale = 10f64.powi(11 - v.abs().log10().floor() as i32);
    ((v * scale).round() / scale).to_bits()
}

fn law_key(law: &ScalarLaw) -> Vec<u64> {
    match law {
        ScalarLaw::Beta { alpha, beta } => vec![0, quantize(*alpha), quantize(*beta)],
        ScalarLaw::Uniform { lo, hi } => vec![1, quantize(*lo), quantize(*hi)],
        ScalarLaw::Point(p) => vec![2, quantize(*p)],
        ScalarLaw::Discrete { points, probs } => {
            let mut k = vec![3];
            k.extend(points.iter().chain(probs).map(|v| quantize(*v)));
            k
        }
    }
}

/// Cell masses of `law` over `grid`, trimmed and renormalized.
pub fn cell_row(law: &ScalarLaw, grid: &CellGrid) -> SparseRow {
    let (lo, hi) = law.support();
    let (first, last) = (grid.cell_of(lo), grid.cell_of(hi));
    let mut dense = vec![0.0; grid.len()];
    for (k, d) in dense.iter_mut().enumerate().take(last + 1).skip(first) {
        let (a, b, closed) = grid.cell_bounds(k);
        *d = law.mass(a, b, closed);
    }
    // The atoms neighbouring a support endpoint can carry mass too.
    for &k in grid.atoms() {
        if k < first || k > last {
            let (a, b, closed) = grid.cell_bounds(k);
            dense[k] = law.mass(a, b, closed);
        }
    }
    let mut row = SparseRow::from_dense(&dense);
    let s = row.sum();
    if s > 0.0 {
        row.probs.iter_mut().for_each(|p| *p /= s);
    }
    row
}

/// Grid for time `t`: `n_states` uniform points on an interval state space,
/// or the listed points of a finite one.
fn base_grid(model: &ModelSpec, t: usize, n_states: usize) -> Result<CellGrid> {
    match model.state_space(t) {
        StateSpace::Interval { lo, hi } => CellGrid::uniform(lo, hi, n_states),
        StateSpace::Finite(mut v) => {
            v.sort_by(f64::total_cmp);
            v.dedup();
            CellGrid::midpoint(v)
        }
    }
}

fn enumerate_actions(set: &ActionSet, a_max: u64, grid: &[f64]) -> Vec<f64> {
    match set {
        ActionSet::Finite(v) => v.clone(),
        ActionSet::PositiveIntegers { .. } => (1..=a_max).map(|a| a as f64).collect(),
        ActionSet::Interval { lo, hi } => {
            let mut acts: Vec<f64> = grid.iter().copied().filter(|a| lo <= a && a <= hi).collect();
            if acts.first() != Some(lo) {
                acts.insert(0, *lo);
            }
            if acts.last() != Some(hi) {
                acts.push(*hi);
            }
            acts
        }
    }
}

/// Discretize a Markov model onto uniform state grids.
///
/// Interval action sets are restricted to the state-grid points they
/// contain. A grid point where every action earns `-inf` becomes a
/// zero-width cell, so a continuous kernel gives it no mass; otherwise the
/// isolated `-inf` at `x = 1` in the beta model would swallow the whole
/// neighbouring half-cell and make every value `-inf`.
pub fn discretize(model: &ModelSpec, n_states: usize, a_max: u64, horizon: usize) -> Result<FiniteMDP> {
    if !model.is_markov() {
        return Err(MdpError::NotMarkov(format!(
            "model '{}' may read the whole history; only models whose kernel and reward depend on (t, x_t, a_t) can be discretized",
            model.name()
        )));
    }
    if n_states < 3 || n_states % 2 == 0 {
        return Err(MdpError::InvalidParameter(format!(
            "n_states must be odd and >= 3 so the grid midpoint is exact, got {n_states}"
        )));
    }
    if horizon == 0 || a_max == 0 {
        return Err(MdpError::InvalidParameter("horizon and a_max must be >= 1".into()));
    }

    // Grids, actions and rewards for every slice.
    let mut grids = Vec::with_capacity(horizon);
    let mut all_choices: Vec<Vec<Vec<Choice>>> = Vec::with_capacity(horizon);
    for t in 1..=horizon {
        let mut grid = base_grid(model, t, n_states)?;
        let points = grid.points().to_vec();
        let choices: Vec<Vec<Choice>> = points
            .par_iter()
            .map(|&x| {
                let h = model.synthetic_history(t, x);
                let acts = enumerate_actions(&model.actions_at(&h), a_max, &points);
                acts.into_iter()
                    .map(|a| Choice { action: a, reward: model.reward_unchecked(&h, a), row: None })
                    .collect()
            })
            .collect();
        for (i, cs) in choices.iter().enumerate() {
            if cs.is_empty() {
                return Err(MdpError::Empty("admissible action set at a grid point"));
            }
            if cs.iter().all(|c| c.reward.is_neg_inf()) && points.len() > 1 {
                grid.make_atom(i);
            }
        }
        grids.push(grid);
        all_choices.push(choices);
    }

    // Transition rows, interned per slice by law.
    let mut slices = Vec::with_capacity(horizon);
    for (ti, (grid, mut choices)) in grids.iter().zip(all_choices).enumerate() {
        let t = ti + 1;
        let mut rows = Vec::new();
        if t < horizon {
            let laws: Vec<Vec<ScalarLaw>> = grid
                .points()
                .par_iter()
                .zip(&choices)
                .map(|(&x, cs)| {
                    let h = model.synthetic_history(t, x);
                    cs.iter().map(|c| model.kernel().law(&h, c.action)).collect()
                })
                .collect();
            let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
            let mut unique: Vec<ScalarLaw> = Vec::new();
            for (cs, ls) in choices.iter_mut().zip(laws) {
                for (c, law) in cs.iter_mut().zip(ls) {
                    let next = unique.len();
                    let r = *index.entry(law_key(&law)).or_insert_with(|| {
                        unique.push(law);
                        next
                    });
                    c.row = Some(r);
                }
            }
            let target = &grids[ti + 1];
            rows = unique.par_iter().map(|law| cell_row(law, target)).collect();
        }
        slices.push(Slice { grid: grid.clone(), choices, rows });
    }

    let initial = cell_row(model.initial(), &grids[0]);
    let provenance = Provenance::Discretized { model: model.name().to_string(), n_states, a_max, horizon };
    FiniteMDP::new(slices, initial, provenance)
}
