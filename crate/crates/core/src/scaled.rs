//! Overflow-safe scalar arithmetic in mantissa * 2^exponent form.
//!
//! Products of n quadratic factors overflow f64 near n ~ 150 for moderate
//! parameters; evaluation therefore tracks an explicit binary exponent.
//! Mantissas are kept normalized in [0.5, 1) (frexp convention), so the sign
//! of a value is exact no matter how extreme the exponent.

/// Split a finite nonzero f64 into (fraction, exponent) with
/// `f == fraction * 2^exponent` and `|fraction|` in [0.5, 1).
pub fn frexp(f: f64) -> (f64, i64) {
    if f == 0.0 || !f.is_finite() {
        return (f, 0);
    }
    let bits = f.to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i64;
    if raw_exp == 0 {
        // subnormal: renormalize through a 2^64 multiply
        let (frac, e) = frexp(f * 18446744073709551616.0);
        return (frac, e - 64);
    }
    let exp = raw_exp - 1022;
    let frac = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1022u64 << 52));
    (frac, exp)
}

/// Inverse of [`frexp`]: `frac * 2^exp`, saturating to 0 or infinity when the
/// result leaves the representable range.
pub fn ldexp(frac: f64, exp: i64) -> f64 {
    if frac == 0.0 || !frac.is_finite() {
        return frac;
    }
    let (mut m, e) = frexp(frac);
    let mut total = e + exp;
    if total > 1100 {
        return if m < 0.0 {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        };
    }
    if total < -1150 {
        return if m < 0.0 { -0.0 } else { 0.0 };
    }
    // apply in chunks; overflow and gradual underflow happen naturally
    const UP: f64 = 1.3407807929942597e154; // 2^512
    const DOWN: f64 = 7.458340731200207e-155; // 2^-512
    while total > 512 {
        m *= UP;
        total -= 512;
    }
    while total < -512 {
        m *= DOWN;
        total += 512;
    }
    m * 2f64.powi(total as i32)
}

/// A real number `mantissa * 2^exponent` with `|mantissa|` in [0.5, 1)
/// (or exactly zero).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub mantissa: f64,
    pub exponent: i64,
}

impl Scaled {
    pub const ZERO: Scaled = Scaled {
        mantissa: 0.0,
        exponent: 0,
    };

    pub fn from_f64(v: f64) -> Self {
        let (mantissa, exponent) = frexp(v);
        Scaled { mantissa, exponent }
    }

    /// Collapse back to f64, saturating on overflow/underflow.
    pub fn value(self) -> f64 {
        ldexp(self.mantissa, self.exponent)
    }

    pub fn is_zero(self) -> bool {
        self.mantissa == 0.0
    }

    /// Exact sign: -1, 0 or 1.
    pub fn signum(self) -> f64 {
        if self.mantissa == 0.0 {
            0.0
        } else {
            self.mantissa.signum()
        }
    }

    pub fn abs(self) -> Scaled {
        Scaled {
            mantissa: self.mantissa.abs(),
            exponent: self.exponent,
        }
    }

    pub fn neg(self) -> Scaled {
        Scaled {
            mantissa: -self.mantissa,
            exponent: self.exponent,
        }
    }

    pub fn mul(self, rhs: Scaled) -> Scaled {
        if self.is_zero() || rhs.is_zero() {
            return Scaled::ZERO;
        }
        let (m, e) = frexp(self.mantissa * rhs.mantissa);
        Scaled {
            mantissa: m,
            exponent: e + self.exponent + rhs.exponent,
        }
    }

    pub fn mul_f64(self, rhs: f64) -> Scaled {
        self.mul(Scaled::from_f64(rhs))
    }

    /// Division; rhs must be nonzero.
    pub fn div(self, rhs: Scaled) -> Scaled {
        debug_assert!(!rhs.is_zero(), "scaled division by zero");
        if self.is_zero() {
            return Scaled::ZERO;
        }
        let (m, e) = frexp(self.mantissa / rhs.mantissa);
        Scaled {
            mantissa: m,
            exponent: e + self.exponent - rhs.exponent,
        }
    }

    /// Integer power by repeated squaring.
    pub fn powi(self, mut k: u32) -> Scaled {
        let mut base = self;
        let mut acc = Scaled::from_f64(1.0);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            k >>= 1;
        }
        acc
    }

    pub fn add(self, rhs: Scaled) -> Scaled {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (hi, lo) = if self.exponent >= rhs.exponent {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let shift = lo.exponent - hi.exponent;
        if shift < -120 {
            return hi; // smaller addend is below one ulp of the larger
        }
        let sum = hi.mantissa + ldexp(lo.mantissa, shift);
        let (m, e) = frexp(sum);
        if sum == 0.0 {
            return Scaled::ZERO;
        }
        Scaled {
            mantissa: m,
            exponent: e + hi.exponent,
        }
    }

    /// Base-10 magnitude logarithm, useful for reporting huge values.
    pub fn log10_abs(self) -> f64 {
        self.mantissa.abs().log10() + self.exponent as f64 * std::f64::consts::LOG10_2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn frexp_ldexp_round_trip() {
        for &v in &[1.0, -3.5, 0.1, 1e300, -1e-300, 12345.678, f64::MIN_POSITIVE] {
            let (m, e) = frexp(v);
            assert!(m.abs() >= 0.5 && m.abs() < 1.0, "mantissa {m} for {v}");
            assert_eq!(ldexp(m, e), v);
        }
        assert_eq!(frexp(0.0), (0.0, 0));
    }

    #[test]
    fn products_survive_far_beyond_f64_range() {
        let mut acc = Scaled::from_f64(1.0);
        for _ in 0..10_000 {
            acc = acc.mul_f64(3.0);
        }
        assert!(acc.mantissa.is_finite());
        assert!(acc.signum() > 0.0);
        // log10(3^10000) = 10000 log10(3)
        let expect = 10_000.0 * 3f64.log10();
        assert!((acc.log10_abs() - expect).abs() < 1e-6 * expect);
    }

    #[test]
    fn add_aligns_exponents() {
        let a = Scaled::from_f64(6.0);
        let b = Scaled::from_f64(-2.0);
        assert_eq!(a.add(b).value(), 4.0);
        let tiny = Scaled::from_f64(1e-300);
        let one = Scaled::from_f64(1.0);
        assert_eq!(one.add(tiny).value(), 1.0 + 1e-300);
    }

    #[test]
    fn powi_matches_direct_multiplication() {
        let b = Scaled::from_f64(-1.7);
        let direct = (0..13).fold(Scaled::from_f64(1.0), |acc, _| acc.mul(b));
        let fast = b.powi(13);
        assert!((fast.mantissa - direct.mantissa).abs() < 1e-14);
        assert_eq!(fast.exponent, direct.exponent);
    }

    proptest! {
        #[test]
        fn scaled_ops_agree_with_f64_in_range(a in -1e10f64..1e10, b in -1e10f64..1e10) {
            let sa = Scaled::from_f64(a);
            let sb = Scaled::from_f64(b);
            let prod = sa.mul(sb).value();
            prop_assert!((prod - a * b).abs() <= 1e-12 * (a * b).abs().max(1e-300));
            let sum = sa.add(sb).value();
            prop_assert!((sum - (a + b)).abs() <= 1e-9 * (a.abs() + b.abs()).max(1e-300));
        }
    }
}
