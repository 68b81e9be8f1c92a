use thiserror::Error;

/// Errors raised by the q-calculus, polynomial and family layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A denominator factor of a series vanished before the series terminated.
    #[error("pole: {0}")]
    Pole(String),

    /// Division by the zero polynomial or the zero rational function.
    #[error("division by zero")]
    DivisionByZero,

    /// `exact_poly_quotient` found a remainder; the asserted divisibility is false.
    #[error("nonzero remainder {remainder} in exact quotient")]
    NonzeroRemainder { remainder: String },

    /// An identity that should hold exactly produced a nonzero residual.
    #[error("identity {identity} violated at n = {n}: residual {residual}")]
    IdentityViolation {
        identity: String,
        n: usize,
        residual: String,
    },

    /// The operation is defined, but not for these parameters.
    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
