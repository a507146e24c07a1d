//! Brute-force reference implementations, independent of the production
//! solvers. Tests and debugging only: nothing in the solve pipeline calls
//! into this module.
//!
//! Three oracles live here:
//! * [`det_at`] - the characteristic polynomial evaluated as an actual
//!   determinant, via partially pivoted elimination on the dense matrix;
//! * [`charpoly_by_interpolation`] - coefficients recovered from determinant
//!   samples at Chebyshev nodes (works for zero parameters too, unlike the
//!   recursions);
//! * [`exact_charpoly_small`] - both three-term recursions replayed in exact
//!   rational arithmetic, asserting the scaling identity between them.

use crate::error::{Error, Result};
use crate::matrix::StructuredMatrix;
use crate::poly::Polynomial;
use num::{BigRational, One, Zero};

/// Knobs for the determinant-interpolation oracle.
#[derive(Debug, Clone)]
pub struct OracleConfig {
    /// Number of interpolation nodes; at least degree + 1 are used.
    pub sample_count: usize,
    /// Pivots at or below this magnitude count as exact zeros.
    pub pivot_tol: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            sample_count: 0, // auto: degree + 1
            pivot_tol: 0.0,
        }
    }
}

/// det(xI - M) by partially pivoted Gaussian elimination. A zero determinant
/// is a legitimate value (x is then an eigenvalue).
pub fn det_at(m: &StructuredMatrix, x: f64) -> f64 {
    det_at_with(m, x, &OracleConfig::default())
}

pub fn det_at_with(m: &StructuredMatrix, x: f64, cfg: &OracleConfig) -> f64 {
    let n = m.n();
    if n == 0 {
        return 1.0;
    }
    let mut a = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = -m.dense.at(i, j);
        }
        a[i * n + i] += x;
    }
    let mut det = 1.0f64;
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_val = a[col * n + col].abs();
        for row in (col + 1)..n {
            let v = a[row * n + col].abs();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = row;
            }
        }
        if pivot_val <= cfg.pivot_tol {
            return 0.0;
        }
        if pivot_row != col {
            for j in 0..n {
                a.swap(col * n + j, pivot_row * n + j);
            }
            det = -det;
        }
        let p = a[col * n + col];
        det *= p;
        for row in (col + 1)..n {
            let factor = a[row * n + col] / p;
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                a[row * n + j] -= factor * a[col * n + j];
            }
        }
    }
    det
}

/// Recover the monic characteristic polynomial from determinant samples at
/// Chebyshev nodes spanning the Gershgorin disc bound.
///
/// The samples and the interpolation run in exact rational arithmetic (f64
/// matrix entries and nodes are exact binary rationals), so the recovered
/// coefficients are exact up to one final rounding each; mapping Chebyshev
/// data to monomial coefficients in f64 would lose up to six digits at
/// n = 8. Guarded at n <= 16, where the rational elimination stays cheap.
pub fn charpoly_by_interpolation(m: &StructuredMatrix) -> Result<Polynomial> {
    charpoly_by_interpolation_with(m, &OracleConfig::default())
}

pub fn charpoly_by_interpolation_with(
    m: &StructuredMatrix,
    cfg: &OracleConfig,
) -> Result<Polynomial> {
    let n = m.n();
    if n > 16 {
        return Err(Error::ConditioningError { n, limit: 16 });
    }
    if n == 0 {
        return Ok(Polynomial::constant(1.0));
    }
    // Gershgorin row-sum bound; only the node spread depends on it, accuracy
    // does not.
    let mut radius = 0.0f64;
    for i in 0..n {
        let mut s = 0.0;
        for j in 0..n {
            s += m.dense.at(i, j).abs();
        }
        radius = radius.max(s);
    }
    let half_span = radius + 1.0;
    let points = cfg.sample_count.max(n + 1);
    let nodes: Vec<BigRational> = (0..points)
        .map(|i| {
            let t = (2 * i + 1) as f64 * std::f64::consts::PI / (2 * points) as f64;
            BigRational::from_float(half_span * t.cos()).expect("finite node")
        })
        .collect();
    let dense: Vec<BigRational> = (0..n * n)
        .map(|idx| BigRational::from_float(m.dense.at(idx / n, idx % n)).expect("finite entry"))
        .collect();
    let values: Vec<BigRational> = nodes.iter().map(|x| rational_det(&dense, n, x)).collect();

    // Newton divided differences over exact data, expanded to monomials.
    let mut dd = values;
    for level in 1..points {
        for i in (level..points).rev() {
            let num = &dd[i] - &dd[i - 1];
            dd[i] = num / (&nodes[i] - &nodes[i - level]);
        }
    }
    let mut poly: Vec<BigRational> = vec![dd[points - 1].clone()];
    for i in (0..points - 1).rev() {
        let linear = vec![-&nodes[i], BigRational::one()];
        let mut next = rp_mul(&poly, &linear);
        next[0] += &dd[i];
        poly = next;
    }
    // the interpolant of exact determinant data is the characteristic
    // polynomial itself: monic, with an exactly vanishing surplus tail
    debug_assert!(poly[n].is_one(), "interpolant is not monic");
    debug_assert!(poly[n + 1..].iter().all(|c| c.is_zero()));
    let coeffs: Vec<f64> = poly
        .iter()
        .take(n + 1)
        .map(|c| rational_to_f64(c))
        .collect();
    Ok(Polynomial::new(coeffs))
}

/// Exact determinant of xI - M by rational Gaussian elimination with
/// nonzero pivoting.
fn rational_det(dense: &[BigRational], n: usize, x: &BigRational) -> BigRational {
    let mut a: Vec<BigRational> = dense.iter().map(|v| -v).collect();
    for i in 0..n {
        a[i * n + i] += x;
    }
    let mut det = BigRational::one();
    for col in 0..n {
        let pivot_row = match (col..n).find(|&r| !a[r * n + col].is_zero()) {
            Some(r) => r,
            None => return BigRational::zero(),
        };
        if pivot_row != col {
            for j in 0..n {
                a.swap(col * n + j, pivot_row * n + j);
            }
            det = -det;
        }
        let p = a[col * n + col].clone();
        det *= &p;
        for row in (col + 1)..n {
            if a[row * n + col].is_zero() {
                continue;
            }
            let factor = &a[row * n + col] / &p;
            for j in col..n {
                let sub = &factor * &a[col * n + j];
                a[row * n + j] -= sub;
            }
        }
    }
    det
}

fn rational_to_f64(v: &BigRational) -> f64 {
    use num::ToPrimitive;
    v.to_f64().unwrap_or(f64::NAN)
}

// ---- exact rational recursions -------------------------------------------

fn rp_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, ca) in a.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        for (j, cb) in b.iter().enumerate() {
            out[i + j] += ca * cb;
        }
    }
    out
}

fn rp_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = a.to_vec();
    out.resize(a.len().max(b.len()), BigRational::zero());
    for (i, cb) in b.iter().enumerate() {
        out[i] -= cb;
    }
    out
}

fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn continuant_rational(alphas: &[BigRational]) -> Vec<BigRational> {
    let four = rational(4, 1);
    let one = BigRational::one();
    let mut prev = vec![BigRational::one()];
    if alphas.is_empty() {
        return prev;
    }
    let a0 = &alphas[0];
    let mut cur = vec![
        -(a0 + &one) * (a0 + &one) / (&four * a0),
        a0.recip(),
    ];
    for m in 2..=alphas.len() {
        let an = &alphas[m - 1];
        let am = &alphas[m - 2];
        let gamma = vec![
            -&one - (an - &one) * (an - &one) / (&four * an)
                - (am - &one) * (am - &one) / (&four * am),
            an.recip() + am.recip(),
        ];
        let delta = vec![-(am * am - &one) / (&four * am), -am.recip()];
        let next = rp_sub(&rp_mul(&gamma, &cur), &rp_mul(&rp_mul(&delta, &delta), &prev));
        prev = cur;
        cur = next;
    }
    cur
}

fn conjugate_rational(alphas: &[BigRational]) -> Vec<BigRational> {
    let four = rational(4, 1);
    let one = BigRational::one();
    let mut prev = vec![BigRational::one()];
    if alphas.is_empty() {
        return prev;
    }
    let a0 = &alphas[0];
    let mut cur = vec![-(a0 + &one) * (a0 + &one) / &four, BigRational::one()];
    for m in 2..=alphas.len() {
        let an = &alphas[m - 1];
        let am = &alphas[m - 2];
        let c = vec![
            (-&one - an * am) * (an + am) / (&four * am),
            (an + am) / am,
        ];
        let base = vec![(am * am - &one) / &four, BigRational::one()];
        let mut d = rp_mul(&base, &base);
        let ratio = an / am;
        for coeff in d.iter_mut() {
            *coeff *= &ratio;
        }
        let next = rp_sub(&rp_mul(&c, &cur), &rp_mul(&d, &prev));
        prev = cur;
        cur = next;
    }
    cur
}

/// Run both recursions in exact rational arithmetic and assert that the
/// conjugate-pair polynomial equals prod(alpha) times the continuant one.
/// Returns the exact monic characteristic polynomial, ascending order.
///
/// The assertion is the scaling identity between the two recursions executed
/// literally; a violation would be a library bug, hence a panic rather than
/// an error value.
pub fn exact_charpoly_small(alphas: &[BigRational]) -> Result<Vec<BigRational>> {
    if alphas.len() > 8 {
        return Err(Error::ConditioningError {
            n: alphas.len(),
            limit: 8,
        });
    }
    if let Some(index) = alphas.iter().position(|a| a.is_zero()) {
        return Err(Error::ZeroParameter { index });
    }
    let p = continuant_rational(alphas);
    let r = conjugate_rational(alphas);
    let theta = alphas
        .iter()
        .fold(BigRational::one(), |acc, a| acc * a);
    let scaled: Vec<BigRational> = p.iter().map(|c| c * &theta).collect();
    assert_eq!(
        r, scaled,
        "scaling identity between the two recursions failed for {alphas:?}"
    );
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charpoly::charpoly_continuant;
    use crate::params::ParameterSet;
    use approx::assert_relative_eq;

    fn matrix(a: &[f64]) -> StructuredMatrix {
        StructuredMatrix::new(&ParameterSet::new(a.to_vec()).unwrap())
    }

    #[test]
    fn det_vanishes_at_the_single_eigenvalue() {
        let m = matrix(&[1.0]);
        assert_eq!(det_at(&m, 1.0), 0.0);
    }

    #[test]
    fn det_at_origin_is_the_product_of_eigenvalues() {
        // two unit-triangular-determinant factors: det(J_2) = 1, so
        // det(0 I - J_2) = (-1)^2 det(J_2) = 1 = 2.618... * 0.3819...
        let m = matrix(&[1.0, 1.0]);
        assert_relative_eq!(det_at(&m, 0.0), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn det_is_small_at_the_printed_mixed_eigenvalue() {
        let m = matrix(&[5.0, -0.1, 3.0, -2.0, 1.5]);
        let near = det_at(&m, 22.5527).abs();
        let away = det_at(&m, 22.6527).abs();
        assert!(near < 1e-2 * away, "near {near}, away {away}");
    }

    #[test]
    fn interpolation_linear_case() {
        let p = charpoly_by_interpolation(&matrix(&[1.0])).unwrap();
        assert_eq!(p.degree(), 1);
        assert_relative_eq!(p.coeffs()[0], -1.0, max_relative = 1e-12);
        assert_relative_eq!(p.coeffs()[1], 1.0, max_relative = 1e-12);
    }

    #[test]
    fn interpolation_matches_the_recursion() {
        let params = ParameterSet::new(vec![2.0, 3.0]).unwrap();
        let interp = charpoly_by_interpolation(&StructuredMatrix::new(&params)).unwrap();
        let rec = charpoly_continuant(&params).unwrap().monic();
        for (a, b) in interp.coeffs().iter().zip(rec.coeffs()) {
            assert_relative_eq!(a, b, max_relative = 1e-9, epsilon = 1e-9);
        }
    }

    #[test]
    fn interpolation_handles_zero_parameters() {
        // the recursions reject zeros, the determinant does not
        let p = charpoly_by_interpolation(&matrix(&[0.0, 1.0])).unwrap();
        assert!(p.eval(0.25).abs() < 1e-10, "missing (x - 1/4) factor");
    }

    #[test]
    fn interpolation_rejects_large_n() {
        let m = matrix(&vec![1.0; 17]);
        assert!(matches!(
            charpoly_by_interpolation(&m),
            Err(Error::ConditioningError { .. })
        ));
    }

    #[test]
    fn oversampling_is_consistent() {
        let m = matrix(&[1.5, -0.7, 2.0]);
        let base = charpoly_by_interpolation(&m).unwrap();
        let cfg = OracleConfig {
            sample_count: 9,
            pivot_tol: 0.0,
        };
        let over = charpoly_by_interpolation_with(&m, &cfg).unwrap();
        for (a, b) in base.coeffs().iter().zip(over.coeffs()) {
            assert_relative_eq!(a, b, max_relative = 1e-8, epsilon = 1e-10);
        }
    }

    #[test]
    fn exact_identity_holds_for_unit_parameters() {
        let alphas = vec![BigRational::one(), BigRational::one()];
        let r = exact_charpoly_small(&alphas).unwrap();
        // x^2 - 3x + 1
        assert_eq!(r[2], BigRational::one());
        assert_eq!(r[1], rational(-3, 1));
        assert_eq!(r[0], BigRational::one());
    }

    #[test]
    fn exact_identity_with_integer_and_fractional_parameters() {
        // theta = 6
        exact_charpoly_small(&[rational(2, 1), rational(3, 1)]).unwrap();
        // theta = -1/6
        exact_charpoly_small(&[rational(1, 2), rational(-1, 3)]).unwrap();
    }

    #[test]
    fn exact_oracle_guards() {
        let nine = vec![BigRational::one(); 9];
        assert!(matches!(
            exact_charpoly_small(&nine),
            Err(Error::ConditioningError { .. })
        ));
        let with_zero = vec![BigRational::one(), BigRational::zero()];
        assert_eq!(
            exact_charpoly_small(&with_zero).unwrap_err(),
            Error::ZeroParameter { index: 1 }
        );
    }
}
