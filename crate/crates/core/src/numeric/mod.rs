//! Dense linear algebra over `f64` and exact rationals.

mod field;
mod linalg;
mod matrix;
mod symmetric;
pub mod text;

pub use field::{parse_rational, rational_from_f64, rational_to_f64, Field};
pub use linalg::{
    bareiss_integer_determinant, is_positive_definite_exact, Cholesky, FLOAT_PIVOT_TOL,
};
pub use matrix::{Matrix, RatMatrix};
pub use symmetric::SymmetricMatrix;

/// Shorthand for an integer-valued rational.
pub fn rat(v: i64) -> num_rational::BigRational {
    <num_rational::BigRational as Field>::from_i64(v)
}
