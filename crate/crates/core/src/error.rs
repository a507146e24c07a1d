//! Error types shared by every module of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("parameter list is empty")]
    EmptyParameterList,

    #[error("parameter {index} is not finite")]
    NonFiniteParameter { index: usize },

    #[error("parameter {index} is zero; deflate zero parameters before calling this operation")]
    ZeroParameter { index: usize },

    #[error("argument {value} violates the domain constraint {constraint}")]
    DomainError { value: f64, constraint: &'static str },

    #[error("no solution on phase branch k = {k}")]
    NoSolutionOnBranch { k: i64 },

    #[error("tolerance not reached after {max_iter} iterations")]
    ToleranceNotReached { max_iter: usize },

    #[error("root finder did not converge within {max_iter} iterations")]
    NonConvergence { max_iter: usize },

    #[error("spectrum incomplete: accounted for {found} of {expected} eigenvalues")]
    IncompleteSpectrum { found: usize, expected: usize },

    #[error("certification failed for eigenvalue {lambda}: residual {residual:e} exceeds {threshold:e}")]
    CertificationFailure {
        lambda: f64,
        residual: f64,
        threshold: f64,
    },

    #[error("sensitivity denominator {denominator:e} is within 1e-12 of zero (near-multiple root)")]
    SingularSensitivity { denominator: f64 },

    #[error("operation requires an all-positive parameter set, got {found}")]
    ClassificationError { found: &'static str },

    #[error("problem size {n} exceeds the conditioning limit {limit} for this operation")]
    ConditioningError { n: usize, limit: usize },

    #[error("polynomial is invalid for root finding: {reason}")]
    InvalidPolynomial { reason: &'static str },
}
