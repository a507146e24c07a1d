//! Simultaneous polynomial root finding (Aberth-Ehrlich iteration).
//!
//! The core loop is generic over the polynomial evaluator. Two are used:
//! plain Horner on (rescaled) coefficients for [`fallback_roots`], and a
//! barycentric form over sampled values for the spectrum pipeline, which
//! never materializes coefficients and therefore survives sample spans far
//! wider than the root scale.

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::scaled::{ldexp, Scaled};
use num_complex::Complex64;

const MAX_ITER: usize = 500;
const STEP_TOL: f64 = 1e-13;

/// Evaluate value, magnitude scale, and derivative at z. The scale is the
/// sum of the magnitudes of the value's additive pieces: |value|/scale is a
/// scale-free residual that reaches ~eps exactly at a root.
trait EvalPoly {
    fn eval(&self, z: Complex64) -> (Complex64, f64, Complex64);
}

struct HornerEval<'a> {
    coeffs: &'a [f64],
    deriv: Vec<f64>,
}

impl EvalPoly for HornerEval<'_> {
    fn eval(&self, z: Complex64) -> (Complex64, f64, Complex64) {
        let zn = z.norm();
        let mut value = Complex64::new(0.0, 0.0);
        let mut scale = 0.0f64;
        for &c in self.coeffs.iter().rev() {
            value = value * z + c;
            scale = scale * zn + c.abs();
        }
        let mut dv = Complex64::new(0.0, 0.0);
        for &c in self.deriv.iter().rev() {
            dv = dv * z + c;
        }
        (value, scale, dv)
    }
}

/// Second-form barycentric interpolant through (nodes, values) with weights
/// w_i = 1 / prod_{j != i} (x_i - x_j). For exactly degree+1 nodes the
/// denominator sum has no extra zeros, so the interpolant's roots are the
/// zeros of the numerator sum N(z) = sum w_i v_i / (z - x_i).
struct BarycentricEval {
    nodes: Vec<f64>,
    values: Vec<f64>,
    weights: Vec<f64>,
}

impl EvalPoly for BarycentricEval {
    fn eval(&self, z: Complex64) -> (Complex64, f64, Complex64) {
        let mut num = Complex64::new(0.0, 0.0);
        let mut num_d = Complex64::new(0.0, 0.0);
        let mut den = Complex64::new(0.0, 0.0);
        let mut den_d = Complex64::new(0.0, 0.0);
        let mut scale = 0.0f64;
        for ((&x, &v), &w) in self.nodes.iter().zip(&self.values).zip(&self.weights) {
            let d = z - x;
            let inv = d.inv();
            let inv2 = inv * inv;
            num += w * v * inv;
            num_d -= w * v * inv2;
            den += w * inv;
            den_d -= w * inv2;
            scale += (w * v).abs() * inv.norm();
        }
        // q = N/D, q' = (N'D - ND')/D^2; residual scale follows N because
        // D = 1/prod(z - x_i) never vanishes off the nodes
        let value = num / den;
        let deriv = (num_d * den - num * den_d) / (den * den);
        (value, scale / den.norm(), deriv)
    }
}

/// All complex roots of `poly`, conjugate-symmetric for the real input
/// coefficients. Each root stops on the backward-error certificate
/// |p(z)| <= O(degree) eps sum |a_i| |z|^i, the attainable floor at a root.
pub fn fallback_roots(poly: &Polynomial) -> Result<Vec<Complex64>> {
    let degree = poly.degree();
    if degree == 0 {
        return Err(Error::InvalidPolynomial {
            reason: "degree must be at least 1",
        });
    }
    if poly.coeffs().iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidPolynomial {
            reason: "coefficients must be finite",
        });
    }
    let monic = poly.monic();

    // Rescale the variable by the Fujiwara root bound s: every root of the
    // rescaled polynomial satisfies |y| <= 1, the rescaled coefficients obey
    // |b_k| <= 2^(n-k), and Horner magnitudes never overflow regardless of
    // the input's dynamic range.
    let a = monic.coeffs();
    let mut bound = 0.0f64;
    for k in 1..=degree {
        let c = if k == degree {
            a[0].abs() * 0.5
        } else {
            a[degree - k].abs()
        };
        if c > 0.0 {
            bound = bound.max(c.powf(1.0 / k as f64));
        }
    }
    let scale_s = (2.0 * bound).max(1e-100);
    let coeffs: Vec<f64> = a
        .iter()
        .enumerate()
        .map(|(k, &c)| c * scale_s.powi(k as i32 - degree as i32))
        .collect();
    let scaled = Polynomial::new(coeffs.clone());
    let eval = HornerEval {
        coeffs: &coeffs,
        deriv: scaled.derivative().coeffs().to_vec(),
    };

    // initial circle at the geometric-mean magnitude of the rescaled roots
    let r0 = coeffs[0].abs().powf(1.0 / degree as f64).clamp(0.05, 0.95);
    let mut roots = aberth_core(degree, r0, &eval)?;
    for z in roots.iter_mut() {
        *z *= scale_s;
    }
    symmetrize_conjugates(&mut roots);
    roots.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    Ok(roots)
}

/// Roots of the polynomial interpolating `values` at `nodes` (degree =
/// nodes.len() - 1), via the barycentric form. `radius` sizes the initial
/// circle; values may carry an arbitrary common scale.
pub(crate) fn barycentric_roots(
    nodes: &[f64],
    values: &[f64],
    radius: f64,
) -> Result<Vec<Complex64>> {
    let degree = nodes.len() - 1;
    if degree == 0 {
        return Ok(Vec::new());
    }
    // weights in scaled arithmetic (the products overflow for many nodes),
    // then normalized to a common exponent; relative weight underflow only
    // affects nodes that contribute nothing anyway
    let mut weights_scaled = Vec::with_capacity(nodes.len());
    for (i, &xi) in nodes.iter().enumerate() {
        let mut w = Scaled::from_f64(1.0);
        for (j, &xj) in nodes.iter().enumerate() {
            if i != j {
                w = w.mul(Scaled::from_f64(xi - xj));
            }
        }
        // reciprocal
        weights_scaled.push(Scaled::from_f64(1.0).div(w));
    }
    let max_exp = weights_scaled.iter().map(|w| w.exponent).max().unwrap();
    let weights: Vec<f64> = weights_scaled
        .iter()
        .map(|w| ldexp(w.mantissa, w.exponent - max_exp))
        .collect();
    let eval = BarycentricEval {
        nodes: nodes.to_vec(),
        values: values.to_vec(),
        weights,
    };
    let mut roots = aberth_core(degree, radius, &eval)?;
    symmetrize_conjugates(&mut roots);
    roots.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    Ok(roots)
}

/// The Aberth-Ehrlich sweep loop.
///
/// A root freezes only on the backward-error certificate (value within a
/// degree-scaled multiple of eps times its magnitude scale). Freezing on
/// step size alone is unsound: an impostor stuck between two true roots
/// makes everyone's corrections small and poisons the whole configuration.
/// Stalled sweeps get a deterministic kick instead.
fn aberth_core(degree: usize, radius: f64, eval: &dyn EvalPoly) -> Result<Vec<Complex64>> {
    let mut z: Vec<Complex64> = (0..degree)
        .map(|i| {
            let angle = 2.0 * std::f64::consts::PI * i as f64 / degree as f64 + 0.4;
            radius * Complex64::new(angle.cos(), angle.sin())
        })
        .collect();
    let floor = (8 + 6 * degree) as f64 * f64::EPSILON;
    let mut frozen = vec![false; degree];
    let mut converged = false;
    let mut stalled = 0u32;
    for sweep in 0..MAX_ITER {
        // gradually loosen the certificate: clustered roots may not reach
        // the ideal floor, and a freeze at 64x floor still sits orders of
        // magnitude below the downstream certification threshold
        let relax = match sweep {
            0..=124 => 1.0,
            125..=249 => 4.0,
            250..=374 => 16.0,
            _ => 64.0,
        };
        let mut froze_one = false;
        let mut max_step = 0.0f64;
        for i in 0..degree {
            if frozen[i] {
                continue;
            }
            let zi = z[i];
            let (p, scale, dp) = eval.eval(zi);
            if !p.re.is_finite() || !p.im.is_finite() {
                z[i] = zi * 1.0001 + Complex64::new(1e-6, 1e-6);
                max_step = f64::INFINITY;
                continue;
            }
            if p.norm() <= relax * floor * scale {
                frozen[i] = true;
                froze_one = true;
                continue;
            }
            let newton = p / dp;
            let mut repulsion = Complex64::new(0.0, 0.0);
            for (j, &zj) in z.iter().enumerate() {
                if j != i {
                    repulsion += (zi - zj).inv();
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * repulsion;
            let w = if denom.norm_sqr() > 0.0 {
                newton / denom
            } else {
                newton
            };
            if !w.re.is_finite() || !w.im.is_finite() {
                // nudge off the singular configuration
                z[i] = zi * 1.0001 + Complex64::new(1e-6, 1e-6);
                max_step = f64::INFINITY;
                continue;
            }
            z[i] = zi - w;
            max_step = max_step.max(w.norm() / z[i].norm().max(1.0));
        }
        if frozen.iter().all(|&f| f) {
            converged = true;
            break;
        }
        if !froze_one && max_step <= STEP_TOL {
            stalled += 1;
        } else {
            stalled = 0;
        }
        if stalled >= 3 {
            // break out of spurious stationary configurations (for example a
            // root trapped on the real axis between a conjugate pair)
            for (i, zi) in z.iter_mut().enumerate() {
                if !frozen[i] {
                    let angle = 2.399963229728653 * (i + sweep) as f64;
                    *zi += 1e-4
                        * zi.norm().max(0.1 * radius.max(1e-30))
                        * Complex64::new(angle.cos(), angle.sin());
                }
            }
            stalled = 0;
        }
    }
    if !converged {
        return Err(Error::NonConvergence { max_iter: MAX_ITER });
    }
    Ok(z)
}

/// Snap nearly-real roots to the axis and average conjugate partners so the
/// output is exactly symmetric, as it must be for real coefficients.
///
/// Partners must actually be near-conjugates of each other; pairing distant
/// roots would corrupt two good values to repair one bad imaginary part, so
/// a root with no partner in range is snapped to the axis instead.
pub(crate) fn symmetrize_conjugates(z: &mut [Complex64]) {
    let n = z.len();
    let mut done = vec![false; n];
    for zi in z.iter_mut() {
        if zi.im.abs() <= 1e-8 * zi.norm().max(1.0) {
            zi.im = 0.0;
        }
    }
    for i in 0..n {
        if z[i].im == 0.0 {
            done[i] = true;
        }
    }
    for i in 0..n {
        if done[i] {
            continue;
        }
        let mut best: Option<(usize, f64)> = None;
        for j in (i + 1)..n {
            if done[j] || z[j].im.signum() == z[i].im.signum() {
                continue;
            }
            let d = (z[j] - z[i].conj()).norm();
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        match best {
            Some((j, d)) if d <= 1e-6 * z[i].norm().max(1.0) => {
                let re = 0.5 * (z[i].re + z[j].re);
                let im = 0.5 * (z[i].im.abs() + z[j].im.abs());
                let sign = z[i].im.signum();
                z[i] = Complex64::new(re, sign * im);
                z[j] = Complex64::new(re, -sign * im);
                done[i] = true;
                done[j] = true;
            }
            _ => {
                // stranded imaginary part is numerical noise on a real root
                z[i].im = 0.0;
                done[i] = true;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn linear_root() {
        let roots = fallback_roots(&Polynomial::new(vec![-1.0, 1.0])).unwrap();
        assert_eq!(roots.len(), 1);
        assert_relative_eq!(roots[0].re, 1.0, max_relative = 1e-12);
        assert_eq!(roots[0].im, 0.0);
    }

    #[test]
    fn quadratic_matches_the_formula() {
        // the two-ones characteristic polynomial x^2 - 3x + 1
        let poly = Polynomial::new(vec![1.0, -3.0, 1.0]);
        let roots = fallback_roots(&poly).unwrap();
        let hi = (6.0 + 2.0 * 5f64.sqrt()) / 4.0;
        let lo = (6.0 - 2.0 * 5f64.sqrt()) / 4.0;
        assert_relative_eq!(roots[0].re, lo, max_relative = 1e-10);
        assert_relative_eq!(roots[1].re, hi, max_relative = 1e-10);
    }

    #[test]
    fn complex_pairs_are_exactly_conjugate() {
        // (x^2+1)(x^2+x+1)(x-2)
        let p = Polynomial::new(vec![1.0, 0.0, 1.0])
            .mul(&Polynomial::new(vec![1.0, 1.0, 1.0]))
            .mul(&Polynomial::new(vec![-2.0, 1.0]));
        let roots = fallback_roots(&p).unwrap();
        assert_eq!(roots.len(), 5);
        let complex: Vec<_> = roots.iter().filter(|z| z.im != 0.0).collect();
        assert_eq!(complex.len(), 4);
        for z in &complex {
            assert!(
                roots.iter().any(|w| *w == z.conj()),
                "no exact conjugate for {z}"
            );
        }
        for z in &roots {
            let v = p.eval_complex(*z).norm();
            assert!(v < 1e-9, "residual {v} at {z}");
        }
    }

    #[test]
    fn random_real_root_products_are_recovered() {
        // fixed-seed linear congruential stream, roots in [-2, 2]
        let mut state = 0x1234_5678_u64;
        let mut unit = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for trial in 0..50 {
            let deg = 1 + (unit() * 8.0) as usize;
            let roots: Vec<f64> = (0..deg).map(|_| 4.0 * unit() - 2.0).collect();
            let mut poly = Polynomial::constant(1.0);
            for &r in &roots {
                poly = poly.mul(&Polynomial::new(vec![-r, 1.0]));
            }
            let found = fallback_roots(&poly).unwrap();
            let mut sorted = roots.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (f, want) in found.iter().zip(&sorted) {
                assert!(
                    (f.re - want).abs() < 1e-6 && f.im.abs() < 1e-6,
                    "trial {trial}: got {f} want {want} (roots {sorted:?})"
                );
            }
        }
    }

    #[test]
    fn extreme_coefficient_ranges_survive_rescaling() {
        // roots spanning several orders of magnitude
        let targets = [1e-3, 0.5, 40.0, 1.5e4];
        let mut poly = Polynomial::constant(1.0);
        for &r in &targets {
            poly = poly.mul(&Polynomial::new(vec![-r, 1.0]));
        }
        let roots = fallback_roots(&poly).unwrap();
        for (z, want) in roots.iter().zip(&targets) {
            assert_relative_eq!(z.re, want, max_relative = 1e-7);
        }
    }

    #[test]
    fn barycentric_route_matches_coefficients() {
        // q(x) = (x^2+0.25)(x - 3): samples over a span much wider than the
        // root scale, which would wreck monomial-coefficient recovery
        let q = Polynomial::new(vec![0.25, 0.0, 1.0]).mul(&Polynomial::new(vec![-3.0, 1.0]));
        let nodes = [-200.0, -57.0, 31.0, 180.0];
        let values: Vec<f64> = nodes.iter().map(|&x| q.eval(x)).collect();
        let roots = barycentric_roots(&nodes, &values, 100.0).unwrap();
        assert_eq!(roots.len(), 3);
        assert!((roots[0] - Complex64::new(0.0, -0.5)).norm() < 1e-9);
        assert!((roots[1] - Complex64::new(0.0, 0.5)).norm() < 1e-9);
        assert!((roots[2] - Complex64::new(3.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(matches!(
            fallback_roots(&Polynomial::constant(3.0)),
            Err(Error::InvalidPolynomial { .. })
        ));
    }
}
