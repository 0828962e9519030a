//! Built-in model instances.

pub mod beta;
pub mod growth;

pub use beta::{beta_example_model, beta_exclusion_bound, beta_tail_bound, BetaModelParams};
pub use growth::{capital_bound_k, growth_model, utility_bound_m, GrowthModelParams};
pub mod toy;

pub use toy::{random_finite_mdp, toy_finite_mdp};
