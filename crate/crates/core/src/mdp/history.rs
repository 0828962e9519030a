use std::fmt;

pub type State = f64;
pub type Action = f64;

/// A history prefix `(x_1, a_1, ..., x_{t-1}, a_{t-1}, x_t)`.
///
/// Time `t` is the number of states; there is always one fewer action.
#[derive(Clone, Debug, PartialEq)]
pub struct History {
    states: Vec<State>,
    actions: Vec<Action>,
}

impl History {
    pub fn start(x1: State) -> Self {
        Self { states: vec![x1], actions: Vec::new() }
    }

    /// Build from raw parts; `states.len()` must be `actions.len() + 1`.
    pub fn from_parts(states: Vec<State>, actions: Vec<Action>) -> Option<Self> {
        (!states.is_empty() && states.len() == actions.len() + 1).then_some(Self { states, actions })
    }

    pub fn time(&self) -> usize {
        self.states.len()
    }

    /// Current state `x_t`.
    pub fn state(&self) -> State {
        *self.states.last().expect("history is never empty")
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    /// Extend in place by the action taken now and the next state.
    pub fn push(&mut self, action: Action, next: State) {
        self.actions.push(action);
        self.states.push(next);
    }

    pub fn extended(&self, action: Action, next: State) -> Self {
        let mut h = self.clone();
        h.push(action, next);
        h
    }

    /// Prefix ending at time `t` (1-based).
    pub fn prefix(&self, t: usize) -> Self {
        assert!(t >= 1 && t <= self.time(), "prefix time {t} out of range");
        Self { states: self.states[..t].to_vec(), actions: self.actions[..t - 1].to_vec() }
    }
}

impl fmt::Display for History {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.states.iter().enumerate() {
            if i > 0 {
                write!(f, ", {}, ", self.actions[i - 1])?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}
