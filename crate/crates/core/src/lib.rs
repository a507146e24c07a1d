//! Eigenvalues of a family of structured matrices defined as the product of
//! an upper and a lower triangular factor sharing n real parameters.
//!
//! The characteristic polynomial of such a matrix satisfies two independent
//! three-term recursions, and for positive parameters the eigenvalues are the
//! solutions of a strictly monotone arctangent phase equation. This crate
//! builds the matrices, runs both recursions, solves the phase equation
//! branch by branch with guaranteed brackets, peels off analytically known
//! eigenvalues (zero parameters, exact +/- pairs, all-equal closed forms),
//! falls back to a simultaneous polynomial root finder for the remaining
//! mixed-sign cases, and certifies every eigenvalue with a residual.
//!
//! Modules:
//! * [`params`] / [`matrix`] - validated parameter sets and the dense matrix.
//! * [`poly`] / [`scaled`] - coefficient polynomials and overflow-safe values.
//! * [`charpoly`] - the two recursions and the product-form evaluators.
//! * [`phase`] - the arctangent phase equation and its solvers.
//! * [`roots`] - simultaneous (Aberth-Ehrlich) polynomial root finding.
//! * [`spectrum`] - deflation, closed forms, and the full pipeline.
//! * [`analysis`] - eigenvalue sensitivities and spectral-radius bounds.
//! * [`oracle`] - brute-force reference implementations for tests.

pub mod analysis;
pub mod charpoly;
pub mod error;
pub mod matrix;
pub mod oracle;
pub mod params;
pub mod phase;
pub mod poly;
pub mod roots;
pub mod scaled;
pub mod spectrum;

pub use analysis::{radius_lower_bound, sensitivity, SensitivityRow};
pub use charpoly::{
    charpoly_conjugate, charpoly_continuant, eval_conjugate_form, eval_scaled, eval_sub_quarter,
    relative_residual,
};
pub use error::{Error, Result};
pub use matrix::{DenseMatrix, StructuredMatrix};
pub use params::{Classification, ParameterSet};
pub use phase::{
    phase, phase_derivative, solve_all_branches, solve_branch, solve_sub_quarter, PhaseFunction,
    PhaseQuery, PhaseSolution,
};
pub use poly::Polynomial;
pub use roots::fallback_roots;
pub use scaled::Scaled;
pub use spectrum::{
    closed_form, deflate, solve_spectrum, DeflationRecord, Eigenvalue, Method, SpectrumReport,
};
