use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MdpError {
    #[error("inadmissible history: action at step {index} is outside the admissible set")]
    InadmissibleHistory { index: usize },

    #[error("inadmissible history: state at step {index} lies outside the state space")]
    StateOutOfSpace { index: usize },

    #[error("action {action} is not admissible at time {time} (state {state})")]
    InadmissibleAction { time: usize, state: f64, action: f64 },

    #[error("policy proposed inadmissible action {action} at time {time} (state {state})")]
    PolicyViolation { time: usize, state: f64, action: f64 },

    #[error("policy table has no entry for time {time}")]
    PolicyUndefined { time: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("model does not declare {0}")]
    Unavailable(&'static str),

    #[error("need at least 2 samples for a variance estimate, got {0}")]
    TooFewSamples(usize),

    #[error("positive part diverges while the negative part is finite; the functional is +inf")]
    UnboundedAbove,

    #[error("target {target} unreachable; best achievable bound {best} at eps = {eps}")]
    TargetUnreachable { target: f64, best: f64, eps: f64 },

    #[error("instance too large for enumeration: {count:e} deterministic Markov policies (limit {limit})")]
    TooManyPolicies { count: f64, limit: u64 },

    #[error("model is not markov: {0}")]
    NotMarkov(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, MdpError>;
