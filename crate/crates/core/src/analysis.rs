//! Sensitivity of eigenvalues to the parameters, and spectral-radius bounds.

use crate::error::{Error, Result};
use crate::params::{Classification, ParameterSet};
use crate::phase::{phase, phase_derivative};
use serde::Serialize;

/// Partial derivatives of one eigenvalue with respect to every parameter.
#[derive(Debug, Clone, Serialize)]
pub struct SensitivityRow {
    pub lambda: f64,
    pub partials: Vec<f64>,
}

/// Implicit-function derivatives of a simple real eigenvalue above 1/4:
///
/// ```text
/// d lambda / d alpha_i
///   = 2 (4 lambda - 1) / (4 lambda - 1 + alpha_i^2)
///     * ( 1/(2 lambda) + 4 sum_j alpha_j / (4 lambda - 1 + alpha_j^2) )^-1
/// ```
///
/// For all-positive parameter sets every partial is strictly positive: each
/// eigenvalue grows when any parameter grows. A denominator within 1e-12 of
/// zero signals a near-multiple root, where the implicit-function formula
/// breaks down, and is reported as an error instead of a huge number.
pub fn sensitivity(params: &ParameterSet, lambda: f64) -> Result<SensitivityRow> {
    if !(lambda > 0.25) {
        return Err(Error::DomainError {
            value: lambda,
            constraint: "lambda > 1/4",
        });
    }
    let u2 = 4.0 * lambda - 1.0;
    let mut denom = 1.0 / (2.0 * lambda);
    for &(a, c) in params.groups() {
        denom += 4.0 * c as f64 * a / (u2 + a * a);
    }
    if denom.abs() < 1e-12 {
        return Err(Error::SingularSensitivity { denominator: denom });
    }
    let partials = params
        .alphas()
        .iter()
        .map(|&a| 2.0 * u2 / (u2 + a * a) / denom)
        .collect();
    Ok(SensitivityRow { lambda, partials })
}

/// Newton-step lower bound on the spectral radius for all-positive sets.
///
/// One Newton step of the branch-1 phase equation from
/// x0 = sum (alpha_i + 1)^2 / 4 lands below the largest eigenvalue because
/// the phase function is convex and decreasing, so the tangent zero never
/// overshoots the root.
pub fn radius_lower_bound(params: &ParameterSet) -> Result<f64> {
    if params.classification() != Classification::AllPositive || params.is_empty() {
        return Err(Error::ClassificationError {
            found: classification_name(params.classification()),
        });
    }
    let x0: f64 = params
        .alphas()
        .iter()
        .map(|&a| (a + 1.0) * (a + 1.0) / 4.0)
        .sum();
    let f = phase(params, x0)? - std::f64::consts::FRAC_PI_2;
    let fp = phase_derivative(params, x0)?;
    Ok(x0 - f / fp)
}

fn classification_name(c: Classification) -> &'static str {
    match c {
        Classification::AllPositive => "AllPositive",
        Classification::AllNonnegative => "AllNonnegative",
        Classification::Mixed => "Mixed",
        Classification::HasZeros => "HasZeros",
    }
}
