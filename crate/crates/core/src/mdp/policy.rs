use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore};

use super::action::ActionSet;
use super::grid::CellGrid;
use super::history::{Action, History};
use super::model::ModelSpec;
use crate::error::{MdpError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolicyKind {
    DeterministicMarkovTable,
    UniformOverAdmissible,
    CustomStochastic,
}

/// One time slice of a deterministic Markov rule: the action for a state is
/// looked up by the grid cell containing it.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkovSlice {
    pub grid: CellGrid,
    pub actions: Vec<Action>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MarkovTable {
    slices: Vec<MarkovSlice>,
    /// Clamp table actions into interval action sets instead of failing.
    project: bool,
}

impl MarkovTable {
    pub fn new(slices: Vec<MarkovSlice>) -> Result<Self> {
        for (t, s) in slices.iter().enumerate() {
            if s.grid.len() != s.actions.len() {
                return Err(MdpError::InvalidParameter(format!(
                    "slice {} has {} cells but {} actions",
                    t + 1,
                    s.grid.len(),
                    s.actions.len()
                )));
            }
        }
        Ok(Self { slices, project: true })
    }

    /// Same action everywhere for `horizon` steps.
    pub fn constant(horizon: usize, action: Action) -> Self {
        let grid = CellGrid::midpoint(vec![0.0]).unwrap();
        let slices = (0..horizon).map(|_| MarkovSlice { grid: grid.clone(), actions: vec![action] }).collect();
        Self { slices, project: true }
    }

    /// Two-branch rule on a threshold: `low(t)` for `x <= threshold`, `high(t)` above.
    pub fn threshold(horizon: usize, threshold: f64, rule: impl Fn(usize) -> (Action, Action)) -> Self {
        let grid = CellGrid::with_edges(vec![threshold, threshold.next_up()], vec![threshold.next_up()]).unwrap();
        let slices = (1..=horizon)
            .map(|t| {
                let (low, high) = rule(t);
                MarkovSlice { grid: grid.clone(), actions: vec![low, high] }
            })
            .collect();
        Self { slices, project: true }
    }

    pub fn strict(mut self) -> Self {
        self.project = false;
        self
    }

    pub fn horizon(&self) -> usize {
        self.slices.len()
    }

    pub fn slices(&self) -> &[MarkovSlice] {
        &self.slices
    }

    pub fn lookup(&self, t: usize, x: f64) -> Result<Action> {
        let slice = self.slices.get(t.wrapping_sub(1)).ok_or(MdpError::PolicyUndefined { time: t })?;
        Ok(slice.actions[slice.grid.cell_of(x)])
    }
}

pub type CustomActFn = dyn Fn(&History, &mut dyn RngCore) -> Action + Send + Sync;

#[derive(Clone)]
pub enum Policy {
    MarkovTable(MarkovTable),
    UniformOverAdmissible,
    Custom { name: String, act: Arc<CustomActFn> },
}

impl fmt::Debug for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Policy::MarkovTable(t) => f.debug_tuple("MarkovTable").field(&t.horizon()).finish(),
            Policy::UniformOverAdmissible => f.write_str("UniformOverAdmissible"),
            Policy::Custom { name, .. } => f.debug_tuple("Custom").field(name).finish(),
        }
    }
}

/// An action together with whether it came from a truncated enumeration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolicyDraw {
    pub action: Action,
    pub truncated: bool,
}

impl Policy {
    pub fn custom(
        name: impl Into<String>,
        act: impl Fn(&History, &mut dyn RngCore) -> Action + Send + Sync + 'static,
    ) -> Self {
        Policy::Custom { name: name.into(), act: Arc::new(act) }
    }

    pub fn kind(&self) -> PolicyKind {
        match self {
            Policy::MarkovTable(_) => PolicyKind::DeterministicMarkovTable,
            Policy::UniformOverAdmissible => PolicyKind::UniformOverAdmissible,
            Policy::Custom { .. } => PolicyKind::CustomStochastic,
        }
    }

    /// Draw `a_t ~ π_t(· | h)`. The caller vouches for `h`; only the drawn
    /// action is checked against `Ψ_t(h)`.
    pub fn act(&self, model: &ModelSpec, h: &History, rng: &mut dyn RngCore) -> Result<PolicyDraw> {
        let set = model.actions_at(h);
        let violation = |action| MdpError::PolicyViolation { time: h.time(), state: h.state(), action };
        match self {
            Policy::MarkovTable(table) => {
                let raw = table.lookup(h.time(), h.state())?;
                let action = if set.contains(raw) {
                    raw
                } else if table.project && matches!(set, ActionSet::Interval { .. }) {
                    set.project(raw).unwrap()
                } else {
                    return Err(violation(raw));
                };
                Ok(PolicyDraw { action, truncated: false })
            }
            Policy::UniformOverAdmissible => match &set {
                ActionSet::Interval { lo, hi } => {
                    let u: f64 = rng.random();
                    Ok(PolicyDraw { action: (lo + (hi - lo) * u).min(*hi), truncated: false })
                }
                _ => {
                    let e = set.enumerate().expect("discrete sets enumerate");
                    if e.actions.is_empty() {
                        return Err(MdpError::Empty("admissible action set"));
                    }
                    let i = rng.random_range(0..e.actions.len());
                    Ok(PolicyDraw { action: e.actions[i], truncated: e.truncated })
                }
            },
            Policy::Custom { act, .. } => {
                let a = act(h, rng);
                if set.contains(a) {
                    Ok(PolicyDraw { action: a, truncated: false })
                } else {
                    Err(violation(a))
                }
            }
        }
    }

    /// Whether `a` is in the support of `π_t(· | h)`.
    pub fn support_check(&self, model: &ModelSpec, h: &History, a: Action) -> bool {
        let set = model.actions_at(h);
        if !set.contains(a) {
            return false;
        }
        match self {
            Policy::MarkovTable(table) => match table.lookup(h.time(), h.state()) {
                Ok(raw) if set.contains(raw) => raw == a,
                Ok(raw) => table.project && set.project(raw) == Some(a),
                Err(_) => false,
            },
            Policy::UniformOverAdmissible => match set.enumerate() {
                Some(e) => e.actions.contains(&a),
                None => true,
            },
            Policy::Custom { .. } => true,
        }
    }
}
