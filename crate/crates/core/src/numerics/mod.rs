pub mod quadrature;
pub mod rng;
pub mod special;

pub use quadrature::{integrate, QuadResult};
pub use rng::{StreamFactory, StreamRng};
pub use special::{beta_cdf, beta_function, beta_log_density, log_beta_function};
