//! Dissipative anisotropic quantum Rabi model: exact Lindblad solver,
//! mean-field and cumulant theories, effective two-level rates and the
//! critical scaling theory of the second-order transition.

pub mod cumulant;
pub mod effective;
pub mod error;
pub mod hilbert;
pub mod lindblad;
pub mod meanfield;
pub mod model;
pub mod ode;
pub mod scaling;
pub mod sparse;

pub use error::{Error, Result};
pub use model::{DimlessParams, ModelParams};
