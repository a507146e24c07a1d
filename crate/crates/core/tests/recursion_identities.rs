//! Cross-checks between the two characteristic-polynomial recursions, the
//! determinant oracle, and the product-form evaluators.

use eigenphase::oracle::{charpoly_by_interpolation, det_at, exact_charpoly_small};
use eigenphase::{
    charpoly_conjugate, charpoly_continuant, eval_conjugate_form, eval_scaled, ParameterSet,
    Polynomial, StructuredMatrix,
};
use num::BigRational;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn random_nonzero_params(rng: &mut StdRng, n: usize, allow_negative: bool) -> ParameterSet {
    let alphas: Vec<f64> = (0..n)
        .map(|_| {
            let mag = rng.gen_range(0.2..3.0);
            if allow_negative && rng.gen_bool(0.5) {
                -mag
            } else {
                mag
            }
        })
        .collect();
    ParameterSet::new(alphas).unwrap()
}

fn max_coeff(p: &Polynomial) -> f64 {
    p.coeffs().iter().fold(0.0f64, |m, c| m.max(c.abs()))
}

#[test]
fn conjugate_equals_scaled_continuant_up_to_n30() {
    let mut rng = StdRng::seed_from_u64(0xC0FFEE);
    for trial in 0..100 {
        let n = rng.gen_range(1..=30);
        let p = random_nonzero_params(&mut rng, n, true);
        let cont = charpoly_continuant(&p).unwrap();
        let conj = charpoly_conjugate(&p).unwrap();
        let theta = p.product();
        let scale = max_coeff(&conj);
        for (i, (a, b)) in conj.coeffs().iter().zip(cont.coeffs()).enumerate() {
            let diff = (a - theta * b).abs();
            assert!(
                diff <= 1e-9 * scale,
                "trial {trial} n={n} coeff {i}: {a} vs {}",
                theta * b
            );
        }
    }
}

#[test]
fn continuant_matches_pivoted_determinants() {
    let mut rng = StdRng::seed_from_u64(0xDE7);
    for trial in 0..100 {
        let n = rng.gen_range(1..=8);
        let p = random_nonzero_params(&mut rng, n, true);
        let m = StructuredMatrix::new(&p);
        let cont = charpoly_continuant(&p).unwrap();
        let theta = p.product();
        for _ in 0..(2 * n + 1) {
            let x = rng.gen_range(-10.0..40.0);
            let via_det = det_at(&m, x);
            let via_rec = theta * cont.eval(x);
            let scale = via_det.abs().max(via_rec.abs()).max(1e-6);
            assert!(
                (via_det - via_rec).abs() <= 1e-8 * scale,
                "trial {trial} n={n} x={x}: det {via_det} vs recursion {via_rec}"
            );
        }
    }
}

#[test]
fn interpolated_coefficients_match_the_recursion() {
    let mut rng = StdRng::seed_from_u64(0xFACADE);
    for trial in 0..60 {
        let n = rng.gen_range(1..=8);
        let p = random_nonzero_params(&mut rng, n, true);
        let interp = charpoly_by_interpolation(&StructuredMatrix::new(&p)).unwrap();
        let rec = charpoly_continuant(&p).unwrap().monic();
        let scale = max_coeff(&interp).max(1.0);
        for (i, (a, b)) in interp.coeffs().iter().zip(rec.coeffs()).enumerate() {
            assert!(
                (a - b).abs() <= 1e-8 * scale,
                "trial {trial} n={n} coeff {i}: {a} vs {b}"
            );
        }
    }
}

#[test]
fn conjugate_coefficients_are_permutation_invariant() {
    let mut rng = StdRng::seed_from_u64(0x5EED);
    for _ in 0..60 {
        let n = rng.gen_range(2..=9);
        let p = random_nonzero_params(&mut rng, n, true);
        let reference = charpoly_conjugate(&p).unwrap();
        let scale = max_coeff(&reference);
        let mut shuffled = p.alphas().to_vec();
        // Fisher-Yates with the same rng
        for i in (1..shuffled.len()).rev() {
            let j = rng.gen_range(0..=i);
            shuffled.swap(i, j);
        }
        let q = ParameterSet::new(shuffled).unwrap();
        let permuted = charpoly_conjugate(&q).unwrap();
        for (a, b) in reference.coeffs().iter().zip(permuted.coeffs()) {
            assert!(
                (a - b).abs() <= 1e-12 * scale,
                "permutation changed coefficients: {a} vs {b} (scale {scale})"
            );
        }
    }
}

#[test]
fn exact_rational_identity_random_corpus() {
    let mut rng = StdRng::seed_from_u64(0xAB1E);
    for _ in 0..100 {
        let n = rng.gen_range(1..=6);
        let alphas: Vec<BigRational> = (0..n)
            .map(|_| {
                let mut num = 0i64;
                while num == 0 {
                    num = rng.gen_range(-20..=20);
                }
                let den = rng.gen_range(1..=9);
                BigRational::new(num.into(), den.into())
            })
            .collect();
        // panics internally if the scaling identity fails
        exact_charpoly_small(&alphas).unwrap();
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // The product form and the coefficient form are two routes to the same
    // number wherever both are defined.
    #[test]
    fn product_form_agrees_with_coefficients(
        seed in 0u64..1u64 << 32,
        n in 1usize..=12,
        x in 0.2600001f64..50.0,
    ) {
        let mut rng = StdRng::seed_from_u64(seed);
        let p = random_nonzero_params(&mut rng, n, true);
        let r = charpoly_conjugate(&p).unwrap();
        let direct = eval_conjugate_form(&p, x).unwrap();
        let via = 2.0 * (4.0 * x - 1.0).sqrt() * r.eval(x);
        // scale: magnitude of the largest term in the Horner sum
        let scale = r
            .coeffs()
            .iter()
            .enumerate()
            .fold(0.0f64, |m, (k, c)| m.max((c * x.powi(k as i32)).abs()))
            * 2.0
            * (4.0 * x - 1.0).sqrt();
        prop_assert!(
            (direct - via).abs() <= 1e-10 * scale.max(1e-280),
            "direct {} vs coeffs {} (scale {})", direct, via, scale
        );
    }

    // The scaled evaluator must agree in sign with the coefficient form,
    // even below the branch point.
    #[test]
    fn scaled_sign_matches_coefficient_sign(
        seed in 0u64..1u64 << 32,
        n in 1usize..=10,
        x in -5.0f64..5.0,
    ) {
        prop_assume!((x - 0.25).abs() > 1e-6);
        let mut rng = StdRng::seed_from_u64(seed);
        let p = random_nonzero_params(&mut rng, n, true);
        let r = charpoly_conjugate(&p).unwrap();
        let coeff_val = r.eval(x);
        let s = eval_scaled(&p, x).unwrap();
        // skip points too close to a root for the sign to be meaningful
        let scale = r
            .coeffs()
            .iter()
            .enumerate()
            .fold(0.0f64, |m, (k, c)| m.max((c * x.powi(k as i32)).abs()));
        prop_assume!(coeff_val.abs() > 1e-8 * scale.max(1e-30));
        // above 1/4: value = 2u R(x); below: value = (-1)^n 4^n 2u R(x)
        let expected = if x > 0.25 || n % 2 == 0 {
            coeff_val.signum()
        } else {
            -coeff_val.signum()
        };
        prop_assert_eq!(s.signum(), expected);
    }
}
