//! Maximum likelihood estimation for Kronecker-structured covariance in the
//! matrix normal model, together with exact Gröbner-basis machinery for
//! counting complex solutions of the likelihood equations.

pub mod algebra;
pub mod canonical;
pub mod error;
pub mod model;
pub mod numeric;
pub mod solvers;

pub use error::{Error, Result};
