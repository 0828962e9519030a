use std::sync::Arc;

use crate::error::{MdpError, Result};
use crate::extended::ExtendedReal;
use crate::law::ScalarLaw;
use crate::mdp::{Action, ActionSet, CellGrid, History, ModelSpec, State, StateSpace, TransitionKernel};

/// Row sums must match 1 to this tolerance.
pub const ROW_SUM_TOL: f64 = 1e-10;

/// A probability row stored as a contiguous run of target indices starting
/// at `offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseRow {
    pub offset: usize,
    pub probs: Vec<f64>,
}

impl SparseRow {
    /// Trim exact zeros from both ends of a dense row.
    pub fn from_dense(dense: &[f64]) -> Self {
        let first = dense.iter().position(|&p| p != 0.0).unwrap_or(0);
        let last = dense.iter().rposition(|&p| p != 0.0).map_or(first, |i| i + 1);
        Self { offset: first, probs: dense[first..last.max(first)].to_vec() }
    }

    pub fn sum(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.probs.iter().enumerate().map(move |(k, &p)| (self.offset + k, p))
    }

    pub fn end(&self) -> usize {
        self.offset + self.probs.len()
    }

    /// `Σ p_k v_k` with `0 · (-inf) = 0`.
    pub fn expect(&self, values: &[ExtendedReal]) -> ExtendedReal {
        self.iter().map(|(k, p)| values[k].scale(p)).sum()
    }

    pub fn to_dense(&self, n: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        for (k, p) in self.iter() {
            v[k] = p;
        }
        v
    }
}

/// One admissible action at a state.
#[derive(Clone, Debug, PartialEq)]
pub struct Choice {
    pub action: Action,
    pub reward: ExtendedReal,
    /// Index into the slice's row table; `None` at the last time step.
    pub row: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Slice {
    pub grid: CellGrid,
    pub choices: Vec<Vec<Choice>>,
    /// Distributions over the next slice's states.
    pub rows: Vec<SparseRow>,
}

impl Slice {
    pub fn states(&self) -> &[State] {
        self.grid.points()
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Provenance {
    HandBuilt,
    Discretized { model: String, n_states: usize, a_max: u64, horizon: usize },
}

/// A fully enumerated finite-horizon MDP.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMDP {
    slices: Vec<Slice>,
    initial: SparseRow,
    provenance: Provenance,
}

/// Dense description used to hand-build small instances. `transitions[t][s][a]`
/// is a row over the states of time `t + 1`; the last time step needs none.
#[derive(Clone, Debug)]
pub struct DenseSpec {
    pub states: Vec<Vec<State>>,
    pub actions: Vec<Vec<Vec<Action>>>,
    pub rewards: Vec<Vec<Vec<ExtendedReal>>>,
    pub transitions: Vec<Vec<Vec<Vec<f64>>>>,
    pub initial: Vec<f64>,
}

impl FiniteMDP {
    pub fn new(slices: Vec<Slice>, initial: SparseRow, provenance: Provenance) -> Result<Self> {
        let fm = Self { slices, initial, provenance };
        fm.validate()?;
        Ok(fm)
    }

    pub fn from_dense(spec: DenseSpec) -> Result<Self> {
        let horizon = spec.states.len();
        if horizon == 0 {
            return Err(MdpError::Empty("horizon"));
        }
        if spec.actions.len() != horizon || spec.rewards.len() != horizon || spec.transitions.len() + 1 < horizon {
            return Err(MdpError::InvalidParameter("per-time tables disagree on the horizon".into()));
        }
        let mut slices = Vec::with_capacity(horizon);
        for t in 0..horizon {
            let grid = CellGrid::midpoint(spec.states[t].clone())?;
            let mut rows = Vec::new();
            let mut choices = Vec::with_capacity(grid.len());
            for s in 0..grid.len() {
                let acts = &spec.actions[t][s];
                let mut cs = Vec::with_capacity(acts.len());
                for (a, &action) in acts.iter().enumerate() {
                    let row = (t + 1 < horizon).then(|| {
                        rows.push(SparseRow::from_dense(&spec.transitions[t][s][a]));
                        rows.len() - 1
                    });
                    cs.push(Choice { action, reward: spec.rewards[t][s][a], row });
                }
                choices.push(cs);
            }
            slices.push(Slice { grid, choices, rows });
        }
        Self::new(slices, SparseRow::from_dense(&spec.initial), Provenance::HandBuilt)
    }

    fn validate(&self) -> Result<()> {
        let horizon = self.slices.len();
        if horizon == 0 {
            return Err(MdpError::Empty("horizon"));
        }
        let check_row = |row: &SparseRow, n: usize, what: &str| -> Result<()> {
            if row.end() > n || row.probs.iter().any(|&p| !(p >= 0.0)) || (row.sum() - 1.0).abs() > ROW_SUM_TOL {
                return Err(MdpError::InvalidParameter(format!("{what} is not a probability row (sum {})", row.sum())));
            }
            Ok(())
        };
        check_row(&self.initial, self.slices[0].len(), "initial row")?;
        for (t, slice) in self.slices.iter().enumerate() {
            if slice.choices.len() != slice.len() {
                return Err(MdpError::InvalidParameter(format!("time {}: choice table size mismatch", t + 1)));
            }
            let next = self.slices.get(t + 1).map(Slice::len);
            for (s, cs) in slice.choices.iter().enumerate() {
                if cs.is_empty() {
                    return Err(MdpError::InvalidParameter(format!("time {} state {s}: no actions", t + 1)));
                }
                for c in cs {
                    match (c.row, next) {
                        (Some(r), Some(n)) => {
                            let row = slice.rows.get(r).ok_or_else(|| {
                                MdpError::InvalidParameter(format!("time {}: missing row {r}", t + 1))
                            })?;
                            check_row(row, n, &format!("row {r} at time {}", t + 1))?;
                        }
                        (None, None) => {}
                        _ => {
                            return Err(MdpError::InvalidParameter(format!(
                                "time {}: transition rows must exist exactly before the last step",
                                t + 1
                            )))
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn horizon(&self) -> usize {
        self.slices.len()
    }

    /// Slice for 1-based time `t`.
    pub fn slice(&self, t: usize) -> &Slice {
        &self.slices[t - 1]
    }

    pub fn slices(&self) -> &[Slice] {
        &self.slices
    }

    pub fn states_at(&self, t: usize) -> &[State] {
        self.slice(t).states()
    }

    pub fn choices(&self, t: usize, s: usize) -> &[Choice] {
        &self.slice(t).choices[s]
    }

    pub fn row(&self, t: usize, s: usize, a: usize) -> Option<&SparseRow> {
        let slice = self.slice(t);
        slice.choices[s][a].row.map(|r| &slice.rows[r])
    }

    pub fn initial(&self) -> &SparseRow {
        &self.initial
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Number of deterministic Markov policies, as a float to survive overflow.
    pub fn policy_count(&self) -> f64 {
        self.slices.iter().flat_map(|s| s.choices.iter()).map(|c| c.len() as f64).product()
    }

    pub fn row_count(&self) -> usize {
        self.slices.iter().map(|s| s.rows.len()).sum()
    }

    /// View as a [`ModelSpec`] so the simulator can drive it. States and
    /// actions are identified by value.
    pub fn to_model_spec(&self, name: &str) -> ModelSpec {
        let fm = Arc::new(self.clone());
        let horizon = self.horizon();
        let index = |fm: &FiniteMDP, t: usize, x: f64| fm.slice(t).states().iter().position(|&s| s == x);
        let choice = move |fm: &FiniteMDP, h: &History, a: f64| -> Option<(usize, usize)> {
            let t = h.time().min(fm.horizon());
            let s = index(fm, t, h.state())?;
            let k = fm.choices(t, s).iter().position(|c| c.action == a)?;
            Some((s, k))
        };

        let f = fm.clone();
        let state_space = move |t: usize| StateSpace::Finite(f.states_at(t.clamp(1, horizon)).to_vec());
        let f = fm.clone();
        let admissible = move |h: &History| {
            let t = h.time().min(horizon);
            match index(&f, t, h.state()) {
                Some(s) => ActionSet::Finite(f.choices(t, s).iter().map(|c| c.action).collect()),
                None => ActionSet::Finite(Vec::new()),
            }
        };
        let f = fm.clone();
        let reward = move |h: &History, a: f64| match choice(&f, h, a) {
            Some((s, k)) => f.choices(h.time(), s)[k].reward,
            None => ExtendedReal::NEG_INF,
        };
        let f = fm.clone();
        let kernel = TransitionKernel::new(move |h: &History, a: f64| {
            let t = h.time();
            let (s, k) = choice(&f, h, a).expect("kernel queried at an admissible pair");
            match f.row(t, s, k) {
                Some(row) => {
                    let next = f.states_at(t + 1);
                    let (points, probs) = row.iter().filter(|&(_, p)| p > 0.0).map(|(j, p)| (next[j], p)).unzip();
                    ScalarLaw::Discrete { points, probs }
                }
                // Past the horizon: stay put.
                None => ScalarLaw::Point(h.state()),
            }
        });
        let init = {
            let states = self.states_at(1);
            let (points, probs) = self.initial.iter().filter(|&(_, p)| p > 0.0).map(|(j, p)| (states[j], p)).unzip();
            ScalarLaw::Discrete { points, probs }
        };
        ModelSpec::new(name, state_space, admissible, reward, kernel, |_: &History| f64::INFINITY, init)
            .markov(true)
            .with_horizon_hint(horizon)
    }
}
