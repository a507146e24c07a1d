//! Characteristic polynomials via two independent three-term recursions,
//! plus stable evaluation of the conjugate-pair product form at arbitrary
//! points.
//!
//! Both recursions produce polynomials whose roots are the eigenvalues of the
//! structured matrix:
//!
//! * [`charpoly_continuant`] runs the tridiagonal-determinant (continuant)
//!   recursion. Its output has leading coefficient 1/prod(alpha), i.e. it is
//!   the characteristic polynomial divided by the product of the parameters.
//! * [`charpoly_conjugate`] runs the recursion satisfied by the real part of
//!   the complex product Q(x) = (a+jb) * prod(F_i + j G_i); its output is the
//!   monic characteristic polynomial. The two agree exactly through
//!   R = prod(alpha) * P, which the exact-arithmetic oracle asserts.
//!
//! Coefficient arithmetic in f64 is reliable only up to n of a few dozen
//! (the recursion squares the dynamic range each step); beyond that, use the
//! evaluation forms [`eval_conjugate_form`] / [`eval_sub_quarter`] /
//! [`eval_scaled`], which work per-point and never materialize coefficients.

use crate::error::{Error, Result};
use crate::params::ParameterSet;
use crate::poly::Polynomial;
use crate::scaled::{frexp, ldexp, Scaled};
use num_complex::Complex64;

/// Characteristic polynomial through the continuant (determinant) recursion.
///
/// Requires every parameter nonzero; zero parameters must be deflated first.
/// The output is monic up to the 1/prod(alpha) scale.
pub fn charpoly_continuant(p: &ParameterSet) -> Result<Polynomial> {
    p.require_nonzero()?;
    let a = p.alphas();
    let mut prev = Polynomial::constant(1.0);
    if a.is_empty() {
        return Ok(prev);
    }
    let a0 = a[0];
    let mut cur = Polynomial::new(vec![-(a0 + 1.0) * (a0 + 1.0) / (4.0 * a0), 1.0 / a0]);
    for m in 2..=a.len() {
        let an = a[m - 1];
        let am = a[m - 2];
        let gamma = Polynomial::new(vec![
            -1.0 - (an - 1.0) * (an - 1.0) / (4.0 * an) - (am - 1.0) * (am - 1.0) / (4.0 * am),
            1.0 / an + 1.0 / am,
        ]);
        let delta = Polynomial::new(vec![-(am * am - 1.0) / (4.0 * am), -1.0 / am]);
        let next = gamma.mul(&cur).sub(&delta.mul(&delta).mul(&prev));
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Monic characteristic polynomial through the conjugate-pair recursion.
///
/// Requires every parameter nonzero (the recursion divides by the previous
/// parameter).
pub fn charpoly_conjugate(p: &ParameterSet) -> Result<Polynomial> {
    p.require_nonzero()?;
    let a = p.alphas();
    let mut prev = Polynomial::constant(1.0);
    if a.is_empty() {
        return Ok(prev);
    }
    let a0 = a[0];
    let mut cur = Polynomial::new(vec![-(a0 + 1.0) * (a0 + 1.0) / 4.0, 1.0]);
    for m in 2..=a.len() {
        let an = a[m - 1];
        let am = a[m - 2];
        let c = Polynomial::new(vec![
            (-1.0 - an * am) * (an + am) / (4.0 * am),
            (an + am) / am,
        ]);
        let base = Polynomial::new(vec![(am * am - 1.0) / 4.0, 1.0]);
        let d = base.mul(&base).scale(an / am);
        let next = c.mul(&cur).sub(&d.mul(&prev));
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// A complex number with a shared binary exponent, normalized so the larger
/// component magnitude sits in [0.5, 1).
#[derive(Clone, Copy, Debug)]
struct ScaledComplex {
    re: f64,
    im: f64,
    exp: i64,
}

impl ScaledComplex {
    fn new(re: f64, im: f64) -> Self {
        ScaledComplex { re, im, exp: 0 }.normalized()
    }

    fn normalized(self) -> Self {
        let m = self.re.abs().max(self.im.abs());
        if m == 0.0 {
            return ScaledComplex {
                re: 0.0,
                im: 0.0,
                exp: 0,
            };
        }
        let (_, e) = frexp(m);
        ScaledComplex {
            re: ldexp(self.re, -e),
            im: ldexp(self.im, -e),
            exp: self.exp + e,
        }
    }

    fn mul(self, rhs: ScaledComplex) -> ScaledComplex {
        ScaledComplex {
            re: self.re * rhs.re - self.im * rhs.im,
            im: self.re * rhs.im + self.im * rhs.re,
            exp: self.exp + rhs.exp,
        }
        .normalized()
    }

    fn powi(self, mut k: u32) -> ScaledComplex {
        let mut base = self;
        let mut acc = ScaledComplex::new(1.0, 0.0);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            k >>= 1;
        }
        acc
    }
}

/// Evaluation of the conjugate-pair form above the branch point, with the
/// magnitude ratio |Re Q| / |Q| used as a scale-free residual.
pub(crate) fn conjugate_scaled(p: &ParameterSet, x: f64) -> Result<(Scaled, f64)> {
    if !(x > 0.25) {
        return Err(Error::DomainError {
            value: x,
            constraint: "x > 1/4",
        });
    }
    let u = (4.0 * x - 1.0).sqrt();
    let mut q = ScaledComplex::new(u, 1.0);
    for &(alpha, count) in p.groups() {
        let f = (4.0 * x - 1.0 - alpha * alpha) / 4.0;
        let g = alpha / 2.0 * u;
        q = q.mul(ScaledComplex::new(f, g).powi(count as u32));
    }
    let modulus = q.re.hypot(q.im);
    let ratio = if modulus == 0.0 {
        0.0
    } else {
        q.re.abs() / modulus
    };
    let (m, e) = frexp(2.0 * q.re);
    let value = if m == 0.0 {
        Scaled::ZERO
    } else {
        Scaled {
            mantissa: m,
            exponent: e + q.exp,
        }
    };
    Ok((value, ratio))
}

/// Evaluation of the sub-quarter form, with a scale-free residual ratio
/// |g| / ((u+1) |A| + |u-1| |B|) where A, B are the two products.
pub(crate) fn sub_quarter_scaled(p: &ParameterSet, x: f64) -> Result<(Scaled, f64)> {
    if !(x < 0.25) {
        return Err(Error::DomainError {
            value: x,
            constraint: "x < 1/4",
        });
    }
    let u = (1.0 - 4.0 * x).sqrt();
    // u - 1 = -4x / (1 + u): avoids the cancellation that otherwise caps the
    // residual resolution at eps/|u-1| near x = 0
    let um1 = -4.0 * x / (1.0 + u);
    let mut plus = Scaled::from_f64(1.0);
    let mut minus = Scaled::from_f64(1.0);
    for &(alpha, count) in p.groups() {
        plus = plus.mul(Scaled::from_f64((1.0 + alpha) + um1).powi(2 * count as u32));
        minus = minus.mul(Scaled::from_f64((1.0 - alpha) + um1).powi(2 * count as u32));
    }
    let t1 = plus.mul_f64(u + 1.0);
    let t2 = minus.mul_f64(um1);
    let value = t1.add(t2);
    let scale = t1.abs().add(t2.abs());
    let ratio = if scale.is_zero() {
        0.0
    } else {
        ldexp(
            value.mantissa.abs() / scale.mantissa,
            value.exponent - scale.exponent,
        )
    };
    Ok((value, ratio))
}

/// 2 Re{ (sqrt(4x-1) + j) * prod((4x-1-alpha_i^2)/4 + j (alpha_i/2) sqrt(4x-1)) }.
///
/// Equals 2 sqrt(4x-1) times the monic characteristic polynomial at x, so its
/// zeros on (1/4, inf) are exactly the eigenvalues above the branch point.
/// Accepts any real parameters including zeros. Saturates to +/- infinity if
/// the product overflows f64; use [`eval_scaled`] when n is large.
pub fn eval_conjugate_form(p: &ParameterSet, x: f64) -> Result<f64> {
    conjugate_scaled(p, x).map(|(v, _)| v.value())
}

/// (u+1) prod(u+alpha_i)^2 + (u-1) prod(u-alpha_i)^2 with u = sqrt(1-4x).
///
/// Real zeros on (-inf, 1/4) are real eigenvalues below the branch point;
/// the constant prefactor of the underlying polynomial identity is dropped
/// since only zeros matter. The branch boundary u = 0 (x = 1/4) is always a
/// zero of this expression and carries no spectral information by itself.
pub fn eval_sub_quarter(p: &ParameterSet, x: f64) -> Result<f64> {
    sub_quarter_scaled(p, x).map(|(v, _)| v.value())
}

/// Scale-free residual of a complex candidate eigenvalue, in [0, 1].
///
/// Evaluates (s+j) prod(F_i+jG_i) + (s-j) prod(F_i-jG_i) with the principal
/// branch s = sqrt(4z-1), which analytically continues the real-axis product
/// form; the result is 2s times the monic characteristic polynomial at z.
/// Returns |sum| over the sum of the two term magnitudes: ~0 at a root.
pub fn complex_residual(p: &ParameterSet, z: Complex64) -> f64 {
    let s = (4.0 * z - 1.0).sqrt();
    let jay = Complex64::new(0.0, 1.0);
    let mut plus = ScaledComplexFull::new(s + jay);
    let mut minus = ScaledComplexFull::new(s - jay);
    for &(alpha, count) in p.groups() {
        let f = (s * s - alpha * alpha) / 4.0;
        let g = s * (alpha / 2.0);
        plus = plus.mul(ScaledComplexFull::new(f + jay * g).powi(count as u32));
        minus = minus.mul(ScaledComplexFull::new(f - jay * g).powi(count as u32));
    }
    let (sum, scale) = plus.add_with_scale(minus);
    if scale == 0.0 {
        0.0
    } else {
        sum / scale
    }
}

/// Logarithmic derivative h'/h of the continued product form at z, together
/// with the continuation ratio |h| / (|t1| + |t2|).
///
/// h = 2 sqrt(4z-1) 4^n R(z) for the monic characteristic polynomial R, so
/// subtracting 2/(4z-1) from this log-derivative gives R'/R, which is all a
/// simultaneous Newton-type root iteration needs.
pub(crate) fn continuation_log_deriv(p: &ParameterSet, z: Complex64) -> (Complex64, f64) {
    let jay = Complex64::new(0.0, 1.0);
    let s = (4.0 * z - 1.0).sqrt();
    let mut t1 = ScaledComplexFull::new(s + jay);
    let mut t2 = ScaledComplexFull::new(s - jay);
    let mut l1 = (2.0 / s) / (s + jay);
    let mut l2 = (2.0 / s) / (s - jay);
    for &(alpha, count) in p.groups() {
        let f = z - (1.0 + alpha * alpha) / 4.0;
        let g = s * (alpha / 2.0);
        let c = count as f64;
        let fp = f + jay * g;
        let fm = f - jay * g;
        t1 = t1.mul(ScaledComplexFull::new(fp).powi(count as u32));
        t2 = t2.mul(ScaledComplexFull::new(fm).powi(count as u32));
        l1 += c * (1.0 + jay * alpha / s) / fp;
        l2 += c * (1.0 - jay * alpha / s) / fm;
    }
    let h = t1.add(t2);
    let hp = t1.mul_plain(l1).add(t2.mul_plain(l2));
    let (sum, scale) = t1.add_with_scale(t2);
    let ratio = if scale == 0.0 { 0.0 } else { sum / scale };
    if h.value.norm() == 0.0 {
        return (Complex64::new(f64::INFINITY, 0.0), ratio);
    }
    let ld = (hp.value / h.value) * ldexp(1.0, hp.exp - h.exp);
    (ld, ratio)
}

/// Newton-polish a candidate complex eigenvalue on the analytically
/// continued product form h(z) = (s+j) prod(F+jG) + (s-j) prod(F-jG).
///
/// h equals the monic characteristic polynomial times 2 sqrt(4z-1) 4^n, so
/// away from the branch point its roots are exactly the eigenvalues; the
/// sign flip of the square root across the cut cancels in the Newton ratio
/// h/h'. Derivatives come from the factor log-derivatives: d(s+-j)/dz =
/// 2/s, d(F+-jG)/dz = 1 +- j alpha / s.
///
/// Returns the polished point and a residual: the value ratio |h|/scale,
/// or, once the iteration is clearly in a root's convergence basin, the
/// relative Newton correction if that is smaller. Near an eigenvalue that
/// coincides with a factor's own zero (a pinch point (1-alpha^2)/4) the
/// value ratio has a cancellation noise floor far above eps even for an
/// ulp-accurate root, while the correction still measures the distance to
/// the root faithfully.
pub(crate) fn continuation_polish(
    p: &ParameterSet,
    start: Complex64,
    max_iter: usize,
) -> (Complex64, f64) {
    let jay = Complex64::new(0.0, 1.0);
    let mut z = start;
    let mut best = (start, complex_residual(p, start));
    let mut last_step = f64::INFINITY;
    for _ in 0..max_iter {
        let s = (4.0 * z - 1.0).sqrt();
        if s.norm() < 1e-9 {
            break; // too close to the branch point for the prefactor
        }
        let mut t1 = ScaledComplexFull::new(s + jay);
        let mut t2 = ScaledComplexFull::new(s - jay);
        let mut l1 = (2.0 / s) / (s + jay);
        let mut l2 = (2.0 / s) / (s - jay);
        for &(alpha, count) in p.groups() {
            let f = z - (1.0 + alpha * alpha) / 4.0;
            let g = s * (alpha / 2.0);
            let c = count as f64;
            let fp = f + jay * g;
            let fm = f - jay * g;
            t1 = t1.mul(ScaledComplexFull::new(fp).powi(count as u32));
            t2 = t2.mul(ScaledComplexFull::new(fm).powi(count as u32));
            l1 += c * (1.0 + jay * alpha / s) / fp;
            l2 += c * (1.0 - jay * alpha / s) / fm;
        }
        let h = t1.add(t2);
        let hp = t1.mul_plain(l1).add(t2.mul_plain(l2));
        if hp.value.norm() == 0.0 {
            break;
        }
        let step = (h.value / hp.value) * ldexp(1.0, h.exp - hp.exp);
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        z -= step;
        last_step = step.norm();
        // Newton jitters once it reaches the evaluation noise floor; keep
        // whichever iterate certified best rather than the last one
        let r = complex_residual(p, z);
        if r < best.1 {
            best = (z, r);
        }
        if last_step <= 4.0 * f64::EPSILON * z.norm().max(1e-300) {
            break;
        }
    }
    let (z, ratio) = best;
    let step_rel = last_step / z.norm().max(1.0);
    let residual = if ratio <= 1e-4 {
        ratio.min(step_rel)
    } else {
        ratio
    };
    (z, residual)
}

/// Complex value with an explicit binary exponent, for the continuation
/// residual above.
#[derive(Clone, Copy)]
struct ScaledComplexFull {
    value: Complex64,
    exp: i64,
}

impl ScaledComplexFull {
    fn new(value: Complex64) -> Self {
        ScaledComplexFull { value, exp: 0 }.normalized()
    }

    fn normalized(self) -> Self {
        let m = self.value.re.abs().max(self.value.im.abs());
        if m == 0.0 {
            return ScaledComplexFull {
                value: Complex64::new(0.0, 0.0),
                exp: 0,
            };
        }
        let (_, e) = frexp(m);
        ScaledComplexFull {
            value: Complex64::new(ldexp(self.value.re, -e), ldexp(self.value.im, -e)),
            exp: self.exp + e,
        }
    }

    fn mul(self, rhs: ScaledComplexFull) -> ScaledComplexFull {
        ScaledComplexFull {
            value: self.value * rhs.value,
            exp: self.exp + rhs.exp,
        }
        .normalized()
    }

    fn powi(self, mut k: u32) -> ScaledComplexFull {
        let mut base = self;
        let mut acc = ScaledComplexFull::new(Complex64::new(1.0, 0.0));
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            k >>= 1;
        }
        acc
    }

    fn mul_plain(self, rhs: Complex64) -> ScaledComplexFull {
        ScaledComplexFull {
            value: self.value * rhs,
            exp: self.exp,
        }
        .normalized()
    }

    fn add(self, rhs: ScaledComplexFull) -> ScaledComplexFull {
        let (hi, lo) = if self.exp >= rhs.exp {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let shift = lo.exp - hi.exp;
        if shift < -120 {
            return hi;
        }
        ScaledComplexFull {
            value: hi.value + lo.value * ldexp(1.0, shift),
            exp: hi.exp,
        }
        .normalized()
    }

    /// |self + rhs| and |self| + |rhs|, on a common exponent scale.
    fn add_with_scale(self, rhs: ScaledComplexFull) -> (f64, f64) {
        let (hi, lo) = if self.exp >= rhs.exp {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let shift = lo.exp - hi.exp;
        if shift < -120 {
            return (hi.value.norm(), hi.value.norm() + 0.0);
        }
        let factor = ldexp(1.0, shift);
        let lo_scaled = lo.value * factor;
        let sum = hi.value + lo_scaled;
        (sum.norm(), hi.value.norm() + lo_scaled.norm())
    }
}

/// Scale-free residual of x as a candidate eigenvalue, in [0, 1].
///
/// Above the branch point this is |Re Q| / |Q| for the conjugate-pair
/// product (the cosine of the phase defect); below it is |g| over the sum of
/// the magnitudes of g's two terms. Either way 0 means "exact root at this
/// evaluation precision" and values near 1 mean "nowhere close".
pub fn relative_residual(p: &ParameterSet, x: f64) -> Result<f64> {
    if !x.is_finite() || x == 0.25 {
        return Err(Error::DomainError {
            value: x,
            constraint: "finite x != 1/4",
        });
    }
    if x > 0.25 {
        conjugate_scaled(p, x).map(|(_, r)| r)
    } else {
        sub_quarter_scaled(p, x).map(|(_, r)| r)
    }
}

/// Overflow-safe evaluation in mantissa/exponent form.
///
/// Dispatches to the conjugate-pair form for x > 1/4 and the sub-quarter
/// form for x < 1/4; the branch point itself is rejected (the multiplicity
/// of an eigenvalue at 1/4 is determined by counting zero parameters, not by
/// evaluation). The sign of the mantissa is exact, which is what sign-change
/// bracketing needs.
pub fn eval_scaled(p: &ParameterSet, x: f64) -> Result<Scaled> {
    if !x.is_finite() || x == 0.25 {
        return Err(Error::DomainError {
            value: x,
            constraint: "finite x != 1/4",
        });
    }
    if x > 0.25 {
        conjugate_scaled(p, x).map(|(v, _)| v)
    } else {
        sub_quarter_scaled(p, x).map(|(v, _)| v)
    }
}
