use std::fmt;
use std::sync::Arc;

use rand::RngCore;

use super::action::ActionSet;
use super::history::{Action, History, State};
use crate::error::{MdpError, Result};
use crate::extended::ExtendedReal;
use crate::law::ScalarLaw;

/// The state space `X_t`.
#[derive(Clone, Debug, PartialEq)]
pub enum StateSpace {
    Interval { lo: f64, hi: f64 },
    Finite(Vec<State>),
}

impl StateSpace {
    pub fn contains(&self, x: State) -> bool {
        match self {
            StateSpace::Interval { lo, hi } => *lo <= x && x <= *hi,
            StateSpace::Finite(v) => v.contains(&x),
        }
    }

    /// A canonical member, used to pad synthetic histories.
    pub fn anchor(&self) -> State {
        match self {
            StateSpace::Interval { lo, .. } => *lo,
            StateSpace::Finite(v) => v[0],
        }
    }
}

pub type StateSpaceFn = dyn Fn(usize) -> StateSpace + Send + Sync;
pub type AdmissibleFn = dyn Fn(&History) -> ActionSet + Send + Sync;
pub type RewardFn = dyn Fn(&History, Action) -> ExtendedReal + Send + Sync;
pub type KernelFn = dyn Fn(&History, Action) -> ScalarLaw + Send + Sync;
pub type EnvelopeFn = dyn Fn(&History) -> f64 + Send + Sync;
pub type TailBoundFn = dyn Fn(usize) -> f64 + Send + Sync;
/// `(t, eps, gamma)` to the closed-form bound on the mass of `Φ_t` outside
/// the tight set.
pub type ExclusionBoundFn = dyn Fn(usize, f64, f64) -> f64 + Send + Sync;

pub type InitialDistribution = ScalarLaw;

/// The stochastic kernel `Q_t(dy | h, a)`.
#[derive(Clone)]
pub struct TransitionKernel {
    law: Arc<KernelFn>,
}

impl TransitionKernel {
    pub fn new(law: impl Fn(&History, Action) -> ScalarLaw + Send + Sync + 'static) -> Self {
        Self { law: Arc::new(law) }
    }

    pub fn law(&self, h: &History, a: Action) -> ScalarLaw {
        (self.law)(h, a)
    }

    pub fn sample(&self, h: &History, a: Action, rng: &mut dyn RngCore) -> State {
        self.law(h, a).sample(rng)
    }

    pub fn log_density(&self, h: &History, a: Action, y: State) -> ExtendedReal {
        self.law(h, a).log_density(y)
    }
}

/// A complete non-stationary MDP instance.
///
/// Components are shared closures, so cloning is cheap and clones can be
/// used from several threads.
#[derive(Clone)]
pub struct ModelSpec {
    name: String,
    horizon_hint: usize,
    markov: bool,
    state_space: Arc<StateSpaceFn>,
    admissible: Arc<AdmissibleFn>,
    reward: Arc<RewardFn>,
    kernel: TransitionKernel,
    envelope: Arc<EnvelopeFn>,
    initial: InitialDistribution,
    tail_bound: Option<Arc<TailBoundFn>>,
    exclusion_bound: Option<Arc<ExclusionBoundFn>>,
}

impl fmt::Debug for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModelSpec")
            .field("name", &self.name)
            .field("horizon_hint", &self.horizon_hint)
            .field("markov", &self.markov)
            .field("initial", &self.initial)
            .field("tail_bound", &self.tail_bound.is_some())
            .finish_non_exhaustive()
    }
}

impl ModelSpec {
    pub fn new(
        name: impl Into<String>,
        state_space: impl Fn(usize) -> StateSpace + Send + Sync + 'static,
        admissible: impl Fn(&History) -> ActionSet + Send + Sync + 'static,
        reward: impl Fn(&History, Action) -> ExtendedReal + Send + Sync + 'static,
        kernel: TransitionKernel,
        envelope: impl Fn(&History) -> f64 + Send + Sync + 'static,
        initial: InitialDistribution,
    ) -> Self {
        Self {
            name: name.into(),
            horizon_hint: 10,
            markov: false,
            state_space: Arc::new(state_space),
            admissible: Arc::new(admissible),
            reward: Arc::new(reward),
            kernel,
            envelope: Arc::new(envelope),
            initial,
            tail_bound: None,
            exclusion_bound: None,
        }
    }

    /// Declare that kernel and reward read only `(t, x_t, a_t)`.
    pub fn markov(mut self, markov: bool) -> Self {
        self.markov = markov;
        self
    }

    pub fn with_horizon_hint(mut self, t: usize) -> Self {
        self.horizon_hint = t.max(1);
        self
    }

    pub fn with_tail_bound(mut self, f: impl Fn(usize) -> f64 + Send + Sync + 'static) -> Self {
        self.tail_bound = Some(Arc::new(f));
        self
    }

    pub fn with_exclusion_bound(mut self, f: impl Fn(usize, f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.exclusion_bound = Some(Arc::new(f));
        self
    }

    pub fn with_envelope(mut self, f: impl Fn(&History) -> f64 + Send + Sync + 'static) -> Self {
        self.envelope = Arc::new(f);
        self
    }

    pub fn with_initial(mut self, initial: InitialDistribution) -> Self {
        self.initial = initial;
        self
    }

    pub fn with_reward(mut self, f: impl Fn(&History, Action) -> ExtendedReal + Send + Sync + 'static) -> Self {
        self.reward = Arc::new(f);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn horizon_hint(&self) -> usize {
        self.horizon_hint
    }

    pub fn is_markov(&self) -> bool {
        self.markov
    }

    pub fn state_space(&self, t: usize) -> StateSpace {
        (self.state_space)(t)
    }

    pub fn initial(&self) -> &InitialDistribution {
        &self.initial
    }

    pub fn kernel(&self) -> &TransitionKernel {
        &self.kernel
    }

    pub fn has_tail_bound(&self) -> bool {
        self.tail_bound.is_some()
    }

    /// Upper bound on `sup_π E^π[r_t^+]`.
    pub fn tail_bound(&self, t: usize) -> Result<f64> {
        self.tail_bound.as_ref().map(|f| f(t)).ok_or(MdpError::Unavailable("an analytic tail bound"))
    }

    pub fn exclusion_bound(&self, t: usize, eps: f64, gamma: f64) -> Result<f64> {
        self.exclusion_bound
            .as_ref()
            .map(|f| f(t, eps, gamma))
            .ok_or(MdpError::Unavailable("closed-form exclusion bounds"))
    }

    /// Verify that `h` lies in `H_t = K_{t-1} × X_t`; reports the first
    /// offending step (1-based).
    pub fn check_history(&self, h: &History) -> Result<()> {
        let states = h.states();
        let actions = h.actions();
        for (k, &x) in states.iter().enumerate() {
            let t = k + 1;
            if !self.state_space(t).contains(x) {
                return Err(MdpError::StateOutOfSpace { index: t });
            }
            if k < actions.len() {
                let prefix = History::from_parts(states[..=k].to_vec(), actions[..k].to_vec()).unwrap();
                if !(self.admissible)(&prefix).contains(actions[k]) {
                    return Err(MdpError::InadmissibleHistory { index: t });
                }
            }
        }
        Ok(())
    }

    pub fn admissible_actions(&self, h: &History) -> Result<ActionSet> {
        self.check_history(h)?;
        Ok(self.actions_at(h))
    }

    /// `Ψ_t(h)` without re-validating the history.
    pub fn actions_at(&self, h: &History) -> ActionSet {
        (self.admissible)(h)
    }

    pub fn reward(&self, h: &History, a: Action) -> Result<ExtendedReal> {
        self.check_pair(h, a)?;
        Ok(self.reward_unchecked(h, a))
    }

    pub fn reward_unchecked(&self, h: &History, a: Action) -> ExtendedReal {
        (self.reward)(h, a)
    }

    pub fn kernel_sample(&self, h: &History, a: Action, rng: &mut dyn RngCore) -> Result<State> {
        self.check_pair(h, a)?;
        Ok(self.kernel.sample(h, a, rng))
    }

    pub fn envelope(&self, h: &History) -> Result<f64> {
        self.check_history(h)?;
        Ok(self.envelope_unchecked(h))
    }

    pub fn envelope_unchecked(&self, h: &History) -> f64 {
        (self.envelope)(h)
    }

    fn check_pair(&self, h: &History, a: Action) -> Result<()> {
        self.check_history(h)?;
        if self.actions_at(h).contains(a) {
            Ok(())
        } else {
            Err(MdpError::InadmissibleAction { time: h.time(), state: h.state(), action: a })
        }
    }

    /// An admissible history of time `t` ending at `x`, padded with the
    /// anchor state and its first admissible action. Only meaningful for
    /// models that read nothing but `(t, x_t)`.
    pub fn synthetic_history(&self, t: usize, x: State) -> History {
        let mut states = Vec::with_capacity(t);
        let mut actions = Vec::with_capacity(t.saturating_sub(1));
        for k in 1..t {
            let anchor = self.state_space(k).anchor();
            states.push(anchor);
            let h = History::from_parts(states.clone(), actions.clone()).unwrap();
            let a = match self.actions_at(&h) {
                ActionSet::Finite(v) => v[0],
                ActionSet::PositiveIntegers { .. } => 1.0,
                ActionSet::Interval { lo, .. } => lo,
            };
            actions.push(a);
        }
        states.push(x);
        History::from_parts(states, actions).unwrap()
    }
}
