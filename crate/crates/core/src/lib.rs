//! Finite-horizon approximation of non-stationary Markov decision processes
//! with rewards unbounded in both directions.

pub mod error;
pub mod extended;
pub mod law;
pub mod mdp;
pub mod models;
pub mod numerics;
pub mod report;
pub mod sets;
pub mod simulate;
pub mod solve;
pub mod verify;
pub mod weakconv;

pub use error::{MdpError, Result};
pub use extended::ExtendedReal;
pub use law::ScalarLaw;
pub use mdp::{ActionSet, CellGrid, History, MarkovTable, ModelSpec, Policy, StateSpace, TransitionKernel};
pub use report::{Report, ToReport};
pub use sets::ClosedSetSpec;
pub use weakconv::{DiscreteMeasure, TestFunction};
