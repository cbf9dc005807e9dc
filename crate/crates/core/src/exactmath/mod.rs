//! Exact arithmetic: rationals, dense univariate polynomials, rational
//! functions, modular helpers and exact nullspaces.
//!
//! Everything here is immutable value arithmetic; no floating point is used
//! anywhere in the crate.

mod linalg;
mod modular;
mod poly;
mod ratfunc;
mod rational;
pub mod serde_rat;

pub use linalg::{nullspace, nullspace_by_free_column, rank, Matrix};
pub use modular::{jacobi, legendre, modpow};
pub use poly::{Poly, PolyParseError};
pub use ratfunc::RatFunc;
pub use rational::{format_rat, int, parse_rat, rat, rat_mod, BigRat};

use thiserror::Error;

/// Errors raised by the exact arithmetic layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("division by the zero polynomial")]
    DivisionByZeroPoly,
    #[error("gcd of two zero polynomials is undefined")]
    GcdOfZeros,
    #[error("rational function with zero denominator")]
    ZeroDenominator,
    #[error("denominator {den} is not invertible modulo {modulus}")]
    DenominatorNotInvertible { den: String, modulus: String },
    #[error("modulus must be positive, got {0}")]
    NonPositiveModulus(String),
    #[error("Jacobi symbol needs an odd bottom >= 3, got {0}")]
    BadJacobiBottom(String),
}
