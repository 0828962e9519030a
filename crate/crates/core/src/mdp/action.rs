use super::history::Action;

/// The admissible set `Ψ_t(h)`.
#[derive(Clone, Debug, PartialEq)]
pub enum ActionSet {
    Finite(Vec<Action>),
    /// All positive integers; enumeration stops at `a_max` and is flagged as
    /// truncated.
    PositiveIntegers {
        a_max: u64,
    },
    Interval {
        lo: f64,
        hi: f64,
    },
}

/// An explicit list of actions drawn from an [`ActionSet`].
#[derive(Clone, Debug, PartialEq)]
pub struct Enumeration {
    pub actions: Vec<Action>,
    pub truncated: bool,
}

impl ActionSet {
    pub fn contains(&self, a: Action) -> bool {
        match self {
            ActionSet::Finite(v) => v.contains(&a),
            ActionSet::PositiveIntegers { .. } => a >= 1.0 && a.fract() == 0.0 && a.is_finite(),
            ActionSet::Interval { lo, hi } => *lo <= a && a <= *hi,
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            ActionSet::Finite(v) => v.is_empty(),
            ActionSet::PositiveIntegers { .. } => false,
            ActionSet::Interval { lo, hi } => !(lo <= hi),
        }
    }

    pub fn is_truncated(&self) -> bool {
        matches!(self, ActionSet::PositiveIntegers { .. })
    }

    /// Explicit listing; `None` for intervals, which need a resolution.
    pub fn enumerate(&self) -> Option<Enumeration> {
        match self {
            ActionSet::Finite(v) => Some(Enumeration { actions: v.clone(), truncated: false }),
            ActionSet::PositiveIntegers { a_max } => {
                Some(Enumeration { actions: (1..=*a_max).map(|a| a as f64).collect(), truncated: true })
            }
            ActionSet::Interval { .. } => None,
        }
    }

    /// Like [`enumerate`](Self::enumerate), additionally capped at `cap`
    /// actions. Intervals are listed on `cap` evenly spaced points.
    pub fn enumerate_capped(&self, cap: usize) -> Enumeration {
        match self {
            ActionSet::Interval { lo, hi } => {
                if cap <= 1 || lo == hi {
                    return Enumeration { actions: vec![*lo], truncated: lo != hi };
                }
                let actions = (0..cap)
                    .map(|i| if i + 1 == cap { *hi } else { lo + (hi - lo) * i as f64 / (cap - 1) as f64 })
                    .collect();
                Enumeration { actions, truncated: true }
            }
            _ => {
                let mut e = self.enumerate().expect("discrete sets enumerate");
                if e.actions.len() > cap {
                    e.actions.truncate(cap);
                    e.truncated = true;
                }
                e
            }
        }
    }

    /// Nearest admissible point for interval sets.
    pub fn project(&self, a: Action) -> Option<Action> {
        match self {
            ActionSet::Interval { lo, hi } => Some(a.clamp(*lo, *hi)),
            _ => self.contains(a).then_some(a),
        }
    }
}
