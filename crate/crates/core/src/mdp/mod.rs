//! The control model: histories, admissible actions, kernels, rewards and
//! policies.

mod action;
mod grid;
mod history;
mod model;
mod policy;

pub use action::{ActionSet, Enumeration};
pub use grid::CellGrid;
pub use history::{Action, History, State};
pub use model::{
    AdmissibleFn, EnvelopeFn, ExclusionBoundFn, InitialDistribution, KernelFn, ModelSpec, RewardFn, StateSpace,
    StateSpaceFn, TailBoundFn, TransitionKernel,
};
pub use policy::{CustomActFn, MarkovSlice, MarkovTable, Policy, PolicyDraw, PolicyKind};
