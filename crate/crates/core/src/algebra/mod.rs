//! Exact polynomial algebra: sparse rational polynomials, Gröbner bases and
//! the likelihood-equation systems built on top of them.

pub mod groebner;
pub mod ideal;
pub mod likelihood;
pub mod monomial;
pub mod poly;
pub mod ratfunc;

pub use groebner::{buchberger_with_budget, Timeout, DEFAULT_PAIR_BUDGET};
pub use ideal::{GroebnerBasis, PolyIdeal};
pub use likelihood::{
    family_system, likelihood_equations_m2_2, ml_degree, ml_multiplicity_family, FamilyCase,
    FamilySystem, MlDegree, MlDegreeSystem, Quadratic,
};
pub use monomial::{Monomial, TermOrder, MAX_VARS};
pub use poly::{ring_vars, MultiPoly};
pub use ratfunc::RatFunc;
