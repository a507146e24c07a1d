//! Validated parameter sets and their sign classification.
//!
//! Every other module consumes a [`ParameterSet`]: an ordered list of finite
//! real parameters together with a classification of its sign structure. The
//! classification decides which solver pipeline applies (guaranteed brackets
//! for all-positive sets, scan-based solving otherwise).

use crate::error::{Error, Result};
use serde::Serialize;

/// Sign structure of a parameter set.
///
/// `HasZeros` takes precedence whenever a zero entry is present, then
/// `AllPositive`, then `Mixed`. `AllNonnegative` is part of the public
/// contract but is never produced by [`ParameterSet::new`]: a nonnegative
/// set containing a zero classifies as `HasZeros`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    AllPositive,
    AllNonnegative,
    Mixed,
    HasZeros,
}

/// An ordered set of real matrix parameters.
///
/// Entries are finite by construction. Equal entries are additionally grouped
/// (value, count) so that phase and product evaluations cost O(distinct
/// values) instead of O(n); sets with many repeated parameters are the main
/// large-n use case.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSet {
    alphas: Vec<f64>,
    classification: Classification,
    groups: Vec<(f64, usize)>,
}

impl ParameterSet {
    /// Validate a raw list of parameters.
    ///
    /// Rejects empty input and non-finite entries; classifies the signs.
    pub fn new(alphas: Vec<f64>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::EmptyParameterList);
        }
        for (index, a) in alphas.iter().enumerate() {
            if !a.is_finite() {
                return Err(Error::NonFiniteParameter { index });
            }
        }
        Ok(Self::from_checked(alphas))
    }

    /// An empty set. Not constructible through [`ParameterSet::new`]; this is
    /// the residue of deflating a set whose eigenvalues were all accounted
    /// for analytically (for example an exact +/- pair).
    pub fn empty() -> Self {
        Self::from_checked(Vec::new())
    }

    /// Build without the emptiness check. Entries must already be finite.
    pub(crate) fn from_checked(alphas: Vec<f64>) -> Self {
        let classification = classify(&alphas);
        let groups = group(&alphas);
        ParameterSet {
            alphas,
            classification,
            groups,
        }
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn n(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    pub fn classification(&self) -> Classification {
        self.classification
    }

    /// Distinct parameter values with multiplicities, sorted ascending.
    pub fn groups(&self) -> &[(f64, usize)] {
        &self.groups
    }

    /// Largest absolute parameter value (0 for the empty set).
    pub fn max_abs(&self) -> f64 {
        // groups are sorted, so only the two ends can carry the extreme
        match (self.groups.first(), self.groups.last()) {
            (Some(&(lo, _)), Some(&(hi, _))) => lo.abs().max(hi.abs()),
            _ => 0.0,
        }
    }

    /// Returns an error naming the first zero entry, if any.
    pub fn require_nonzero(&self) -> Result<()> {
        match self.alphas.iter().position(|&a| a == 0.0) {
            Some(index) => Err(Error::ZeroParameter { index }),
            None => Ok(()),
        }
    }

    pub fn contains(&self, value: f64) -> bool {
        self.alphas.iter().any(|&a| a == value)
    }

    /// Product of all entries.
    pub fn product(&self) -> f64 {
        self.alphas.iter().product()
    }
}

fn classify(alphas: &[f64]) -> Classification {
    if alphas.iter().any(|&a| a == 0.0) {
        Classification::HasZeros
    } else if alphas.iter().all(|&a| a > 0.0) {
        Classification::AllPositive
    } else {
        Classification::Mixed
    }
}

fn group(alphas: &[f64]) -> Vec<(f64, usize)> {
    let mut sorted = alphas.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("entries are finite"));
    let mut groups: Vec<(f64, usize)> = Vec::new();
    for a in sorted {
        match groups.last_mut() {
            Some((v, c)) if *v == a => *c += 1,
            _ => groups.push((a, 1)),
        }
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classifies_all_positive() {
        let p = ParameterSet::new(vec![1.0, 2.0]).unwrap();
        assert_eq!(p.classification(), Classification::AllPositive);
    }

    #[test]
    fn classifies_mixed() {
        let p = ParameterSet::new(vec![5.0, -0.1, 3.0, -2.0, 1.5]).unwrap();
        assert_eq!(p.classification(), Classification::Mixed);
    }

    #[test]
    fn classifies_zeros_with_precedence() {
        let p = ParameterSet::new(vec![0.0, 1.0]).unwrap();
        assert_eq!(p.classification(), Classification::HasZeros);
        let q = ParameterSet::new(vec![0.0, -1.0]).unwrap();
        assert_eq!(q.classification(), Classification::HasZeros);
    }

    #[test]
    fn rejects_empty_input() {
        assert_eq!(
            ParameterSet::new(vec![]).unwrap_err(),
            Error::EmptyParameterList
        );
    }

    #[test]
    fn rejects_non_finite() {
        assert_eq!(
            ParameterSet::new(vec![1.0, f64::NAN]).unwrap_err(),
            Error::NonFiniteParameter { index: 1 }
        );
        assert_eq!(
            ParameterSet::new(vec![f64::INFINITY]).unwrap_err(),
            Error::NonFiniteParameter { index: 0 }
        );
    }

    #[test]
    fn groups_repeated_values() {
        let p = ParameterSet::new(vec![2.0, 1.0, 2.0, 2.0]).unwrap();
        assert_eq!(p.groups(), &[(1.0, 1), (2.0, 3)]);
    }

    #[test]
    fn empty_set_is_vacuously_all_positive() {
        let p = ParameterSet::empty();
        assert_eq!(p.n(), 0);
        assert_eq!(p.classification(), Classification::AllPositive);
    }

    #[test]
    fn nonzero_guard_reports_first_zero() {
        let p = ParameterSet::new(vec![1.0, 0.0, 2.0]).unwrap();
        assert_eq!(p.require_nonzero(), Err(Error::ZeroParameter { index: 1 }));
    }
}
