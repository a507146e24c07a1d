//! Full-spectrum pipeline: deflation, closed forms, phase solving,
//! polynomial fallback, and residual certification.
//!
//! Pipeline order:
//! 1. deflate zero parameters (eigenvalue 1/4, one per zero) and exact
//!    +/- pairs (eigenvalue (1-alpha^2)/4 with multiplicity 2 per pair);
//! 2. closed forms when the reduced set is all ones or all minus-ones;
//! 3. all-positive reduced sets: one phase-branch solve per eigenvalue,
//!    complete by monotonicity;
//! 4. mixed reduced sets: integer-branch phase scan above 1/4, sub-quarter
//!    scan below, the origin eigenvalue forced by any -1 parameter, and a
//!    simultaneous root-finder fallback on the reduced characteristic
//!    polynomial for whatever is still missing (complex pairs);
//! 5. certification: every eigenvalue carries a method-appropriate relative
//!    residual, checked against a fixed threshold.

use crate::error::{Error, Result};
use crate::params::{Classification, ParameterSet};
use crate::phase::{scan_branches, solve_all_monotone, sub_quarter_roots_with_enclosure, PhaseFunction};

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::collections::HashMap;
use std::time::Instant;

/// Residual ceiling for certification; also recorded in the report.
pub const CERTIFICATION_THRESHOLD: f64 = 1e-8;

/// Coefficient polynomials degrade past a few dozen parameters, so the
/// fallback refuses larger reduced sets instead of returning junk.
const FALLBACK_DEGREE_LIMIT: usize = 60;

/// Two eigenvalues closer than this (relative) are considered the same root
/// when reconciling the phase/scan results with the fallback roots.
const DEDUP_TOL: f64 = 1e-9;

/// How an eigenvalue was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    ClosedForm,
    Deflation,
    PhaseBranch,
    SubQuarterScan,
    PolyFallback,
}

/// One spectrum entry: a (possibly complex) value with multiplicity, the
/// method that produced it, and a nonnegative relative residual.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenvalue {
    pub value: Complex64,
    pub multiplicity: usize,
    pub method: Method,
    pub residual: f64,
}

impl Eigenvalue {
    fn real(value: f64, multiplicity: usize, method: Method, residual: f64) -> Self {
        Eigenvalue {
            value: Complex64::new(value, 0.0),
            multiplicity,
            method,
            residual,
        }
    }
}

impl Serialize for Eigenvalue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Eigenvalue", 5)?;
        st.serialize_field("re", &self.value.re)?;
        st.serialize_field("im", &self.value.im)?;
        st.serialize_field("mult", &self.multiplicity)?;
        st.serialize_field("method", &self.method)?;
        st.serialize_field("residual", &self.residual)?;
        st.end()
    }
}

/// Eigenvalues peeled off analytically before any numerical work.
#[derive(Debug, Clone)]
pub struct DeflationRecord {
    /// Number of zero parameters = multiplicity of the eigenvalue 1/4.
    pub zero_count: usize,
    /// One entry per exact +/- pair (the positive member); each contributes
    /// (1 - alpha^2)/4 with multiplicity 2.
    pub pairs: Vec<f64>,
    /// What is left after removing zeros and pairs: no zeros, no exact pairs.
    pub reduced: ParameterSet,
}

/// Per-stage wall-clock durations, in seconds.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Timings {
    pub deflate: f64,
    pub closed_form: f64,
    pub phase: f64,
    pub sub_quarter: f64,
    pub fallback: f64,
    pub total: f64,
}

/// The full spectrum with bookkeeping.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub n: usize,
    pub eigenvalues: Vec<Eigenvalue>,
    pub total_multiplicity: usize,
    pub max_residual: f64,
    pub certification_threshold: f64,
    pub timings: Timings,
}

impl SpectrumReport {
    /// Largest eigenvalue magnitude.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues
            .iter()
            .fold(0.0, |m, e| m.max(e.value.norm()))
    }

    /// Real parts of real eigenvalues, sorted descending, repeated by
    /// multiplicity.
    pub fn real_eigenvalues_desc(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for e in &self.eigenvalues {
            if e.value.im == 0.0 {
                for _ in 0..e.multiplicity {
                    out.push(e.value.re);
                }
            }
        }
        out.sort_by(|a, b| b.partial_cmp(a).unwrap());
        out
    }
}

/// Remove all zero parameters and greedily match exact +/- pairs.
///
/// Pair detection is exact (bitwise negation equality): nearly-matching
/// pairs produce nearby distinct roots and are left to the numerical path,
/// because approximate deflation would alter the multiplicity structure.
pub fn deflate(params: &ParameterSet) -> DeflationRecord {
    let mut zero_count = 0usize;
    let mut nonzero = Vec::with_capacity(params.n());
    for &a in params.alphas() {
        if a == 0.0 {
            zero_count += 1;
        } else {
            nonzero.push(a);
        }
    }
    let mut counts: HashMap<u64, usize> = HashMap::new();
    for &a in &nonzero {
        *counts.entry(a.to_bits()).or_insert(0) += 1;
    }
    let mut remove: HashMap<u64, usize> = HashMap::new();
    let mut pairs = Vec::new();
    for &a in &nonzero {
        if a > 0.0 && !remove.contains_key(&a.to_bits()) {
            let cv = counts[&a.to_bits()];
            let cn = counts.get(&(-a).to_bits()).copied().unwrap_or(0);
            let m = cv.min(cn);
            if m > 0 {
                remove.insert(a.to_bits(), m);
                remove.insert((-a).to_bits(), m);
                pairs.extend(std::iter::repeat(a).take(m));
            }
        }
    }
    let mut kept = Vec::with_capacity(nonzero.len());
    for &a in &nonzero {
        match remove.get_mut(&a.to_bits()) {
            Some(r) if *r > 0 => *r -= 1,
            _ => kept.push(a),
        }
    }
    DeflationRecord {
        zero_count,
        pairs,
        reduced: ParameterSet::from_checked(kept),
    }
}

/// Closed-form spectra for the two all-equal special cases.
///
/// All parameters 1: { sec^2(k pi / (2n+1)) / 4 : k = 1..n }.
/// All parameters -1: {0} plus { csc^2((1+2k) pi / (2(2n-1))) / 4 : k = 0..n-2 }.
/// Anything else: `None`.
pub fn closed_form(params: &ParameterSet) -> Option<Vec<Eigenvalue>> {
    let n = params.n();
    if n == 0 {
        return None;
    }
    let pi = std::f64::consts::PI;
    if params.alphas().iter().all(|&a| a == 1.0) {
        let mut out = Vec::with_capacity(n);
        for k in 1..=n {
            let c = (k as f64 * pi / (2 * n + 1) as f64).cos();
            out.push(Eigenvalue::real(0.25 / (c * c), 1, Method::ClosedForm, 0.0));
        }
        return Some(out);
    }
    if params.alphas().iter().all(|&a| a == -1.0) {
        let mut out = Vec::with_capacity(n);
        out.push(Eigenvalue::real(0.0, 1, Method::ClosedForm, 0.0));
        for k in 0..n.saturating_sub(1) {
            let s = ((1 + 2 * k) as f64 * pi / (2 * (2 * n - 1)) as f64).sin();
            out.push(Eigenvalue::real(0.25 / (s * s), 1, Method::ClosedForm, 0.0));
        }
        return Some(out);
    }
    None
}

/// Compute the full spectrum of the matrix for `params`.
///
/// `tol` is the absolute eigenvalue tolerance handed to the scalar solvers
/// (relative to max(1, |lambda|)); the certification threshold on residuals
/// is fixed. Total multiplicity is guaranteed to equal n on success.
pub fn solve_spectrum(params: &ParameterSet, tol: f64) -> Result<SpectrumReport> {
    let overall = Instant::now();
    let mut timings = Timings::default();
    let n = params.n();

    let t = Instant::now();
    let defl = deflate(params);
    timings.deflate = t.elapsed().as_secs_f64();

    let mut eigenvalues: Vec<Eigenvalue> = Vec::new();
    if defl.zero_count > 0 {
        eigenvalues.push(Eigenvalue::real(
            0.25,
            defl.zero_count,
            Method::Deflation,
            0.0,
        ));
    }
    for &alpha in &defl.pairs {
        let value = (1.0 - alpha * alpha) / 4.0;
        match eigenvalues
            .iter_mut()
            .find(|e| e.method == Method::Deflation && e.value.re == value && e.value.im == 0.0)
        {
            Some(e) => e.multiplicity += 2,
            None => eigenvalues.push(Eigenvalue::real(value, 2, Method::Deflation, 0.0)),
        }
    }

    let reduced = &defl.reduced;
    let mut numeric: Vec<Eigenvalue> = Vec::new();
    if !reduced.is_empty() {
        let t = Instant::now();
        if let Some(cf) = closed_form(reduced) {
            numeric.extend(cf);
            timings.closed_form = t.elapsed().as_secs_f64();
        } else if reduced.classification() == Classification::AllPositive {
            let sols = solve_all_monotone(reduced, tol, 256)?;
            for s in sols {
                numeric.push(Eigenvalue::real(s.lambda, 1, Method::PhaseBranch, s.residual));
            }
            timings.phase = t.elapsed().as_secs_f64();
        } else {
            let phase_fn = PhaseFunction::new(reduced);
            for (_, s) in scan_branches(&phase_fn, reduced, tol, 256, None)? {
                numeric.push(Eigenvalue::real(s.lambda, 1, Method::PhaseBranch, s.residual));
            }
            timings.phase = t.elapsed().as_secs_f64();

            let t = Instant::now();
            for (x, enclosure) in sub_quarter_roots_with_enclosure(reduced, tol) {
                numeric.push(Eigenvalue::real(x, 1, Method::SubQuarterScan, enclosure));
            }
            timings.sub_quarter = t.elapsed().as_secs_f64();

            // any -1 parameter forces an eigenvalue at the origin; add it if
            // the scans missed x = 0
            if reduced.contains(-1.0)
                && !numeric
                    .iter()
                    .any(|e| e.value.im == 0.0 && e.value.re.abs() <= DEDUP_TOL)
            {
                numeric.push(Eigenvalue::real(0.0, 1, Method::ClosedForm, 0.0));
            }

            // nearly-double structures (tight real pairs, complex pairs with
            // small imaginary part) graze the scanned surfaces instead of
            // crossing them; pick them up from the tangency dips and resolve
            // each with the complex Newton polish on the continued product
            let is_dup = |cand: Complex64, list: &[Eigenvalue]| {
                list.iter()
                    .any(|e| (e.value - cand).norm() <= DEDUP_TOL * cand.norm().max(1.0))
            };
            for x_star in crate::phase::tangency_candidates(reduced) {
                let have_now: usize = numeric.iter().map(|e| e.multiplicity).sum();
                if have_now >= reduced.n() {
                    break;
                }
                let scale = x_star.abs().max(0.5);
                let start = Complex64::new(x_star, 1e-3 * scale);
                let (mut w, mut r) = crate::charpoly::continuation_polish(reduced, start, 32);
                if w.im.abs() <= 1e-10 * w.norm().max(1.0) {
                    w = Complex64::new(w.re, 0.0);
                    r = crate::charpoly::complex_residual(reduced, w);
                }
                if r > CERTIFICATION_THRESHOLD {
                    continue;
                }
                let method = |v: Complex64| {
                    if v.im != 0.0 {
                        Method::PolyFallback
                    } else if v.re < 0.25 {
                        Method::SubQuarterScan
                    } else {
                        Method::PhaseBranch
                    }
                };
                if !is_dup(w, &numeric) {
                    if w.im != 0.0 {
                        numeric.push(Eigenvalue {
                            value: Complex64::new(w.re, -w.im.abs()),
                            multiplicity: 1,
                            method: method(w),
                            residual: r,
                        });
                        numeric.push(Eigenvalue {
                            value: Complex64::new(w.re, w.im.abs()),
                            multiplicity: 1,
                            method: method(w),
                            residual: r,
                        });
                    } else {
                        numeric.push(Eigenvalue {
                            value: w,
                            multiplicity: 1,
                            method: method(w),
                            residual: r,
                        });
                    }
                }
                if w.im == 0.0 {
                    // a tight real pair hides a sibling mirrored across the dip
                    let mirror = 2.0 * x_star - w.re;
                    let (mut w2, mut r2) = crate::charpoly::continuation_polish(
                        reduced,
                        Complex64::new(mirror, 1e-6 * scale),
                        32,
                    );
                    if w2.im.abs() <= 1e-10 * w2.norm().max(1.0) {
                        w2 = Complex64::new(w2.re, 0.0);
                        r2 = crate::charpoly::complex_residual(reduced, w2);
                    }
                    if r2 <= CERTIFICATION_THRESHOLD && w2.im == 0.0 && !is_dup(w2, &numeric) {
                        numeric.push(Eigenvalue {
                            value: w2,
                            multiplicity: 1,
                            method: method(w2),
                            residual: r2,
                        });
                    }
                }
            }

            let have: usize = numeric.iter().map(|e| e.multiplicity).sum();
            if have < reduced.n() {
                let t = Instant::now();
                let missing = reduced.n() - have;
                if reduced.n() > FALLBACK_DEGREE_LIMIT {
                    return Err(Error::IncompleteSpectrum {
                        found: have + n - reduced.n(),
                        expected: n,
                    });
                }
                // The still-missing eigenvalues (complex pairs, mostly) are
                // the roots of q(x) = R(x) / prod(x - lambda_known). Full
                // coefficient recursions cannot resolve the root cluster
                // just above 1/4, so q is handled samples-first instead:
                // the scaled product form evaluates R stably at any real
                // point, the known factors divide out exactly, and the
                // simultaneous root iteration runs on the barycentric
                // interpolant of those samples. Every root is certified
                // against the analytically continued product form, and the
                // sampling window shrinks adaptively until the certificates
                // hold: samples spanning far beyond the root scale carry no
                // relative information near the roots.
                let known: Vec<f64> = numeric.iter().map(|e| e.value.re).collect();
                for (z, residual) in solve_missing(reduced, &known, missing)? {
                    numeric.push(Eigenvalue {
                        value: z,
                        multiplicity: 1,
                        method: Method::PolyFallback,
                        residual,
                    });
                }
                timings.fallback = t.elapsed().as_secs_f64();
            }
        }
    }
    eigenvalues.append(&mut numeric);

    // deterministic presentation order; merge bitwise-identical values
    eigenvalues.sort_by(|a, b| {
        (a.value.re, a.value.im)
            .partial_cmp(&(b.value.re, b.value.im))
            .unwrap()
    });
    eigenvalues.dedup_by(|b, a| {
        if a.value == b.value {
            a.multiplicity += b.multiplicity;
            a.residual = a.residual.max(b.residual);
            true
        } else {
            false
        }
    });

    let total_multiplicity: usize = eigenvalues.iter().map(|e| e.multiplicity).sum();
    if total_multiplicity != n {
        return Err(Error::IncompleteSpectrum {
            found: total_multiplicity,
            expected: n,
        });
    }
    let max_residual = eigenvalues.iter().fold(0.0f64, |m, e| m.max(e.residual));
    if let Some(bad) = eigenvalues
        .iter()
        .find(|e| e.residual > CERTIFICATION_THRESHOLD)
    {
        return Err(Error::CertificationFailure {
            lambda: bad.value.re,
            residual: bad.residual,
            threshold: CERTIFICATION_THRESHOLD,
        });
    }
    timings.total = overall.elapsed().as_secs_f64();
    Ok(SpectrumReport {
        n,
        eigenvalues,
        total_multiplicity,
        max_residual,
        certification_threshold: CERTIFICATION_THRESHOLD,
        timings,
    })
}

/// Find the `missing` roots that the scans could not account for, with a
/// certification residual per root.
///
/// Runs the simultaneous (Aberth-Ehrlich) iteration directly on the
/// analytically continued product form: the iteration only needs the
/// logarithmic derivative of r(z) = R(z) / prod(z - lambda_known), which is
/// the continuation's log-derivative minus 2/(4z-1) for the square-root
/// prefactor minus one pole term per known root. Everything is pointwise
/// and overflow-safe, so no coefficients are ever formed and the sampling
/// conditioning problems of coefficient routes cannot occur.
fn solve_missing(
    reduced: &ParameterSet,
    known: &[f64],
    missing: usize,
) -> Result<Vec<(Complex64, f64)>> {
    use crate::charpoly::{complex_residual, continuation_log_deriv, continuation_polish};

    // eigenvalue magnitude bound from the dense matrix (row sums)
    let m = crate::matrix::StructuredMatrix::new(reduced);
    let mut bound = 0.0f64;
    for i in 0..m.n() {
        let mut s = 0.0;
        for j in 0..m.n() {
            s += m.dense.at(i, j).abs();
        }
        bound = bound.max(s);
    }
    let radius = 0.6 * bound + 0.5;
    let mut z: Vec<Complex64> = (0..missing)
        .map(|i| {
            let angle = 2.0 * std::f64::consts::PI * i as f64 / missing as f64 + 0.4;
            radius * Complex64::new(angle.cos(), angle.sin())
        })
        .collect();

    let mut frozen = vec![false; missing];
    let mut converged = false;
    let mut stalled = 0u32;
    const SWEEPS: usize = 600;
    for sweep in 0..SWEEPS {
        // The coupled iteration crawls near clustered (near-double) roots;
        // plain Newton from a crawling iterate converges quadratically to
        // one cluster member. Periodically polish the unfrozen iterates and
        // freeze whatever certifies and is not already taken; the frozen
        // occupant then repels its stuck partner towards the other member.
        if sweep % 30 == 29 {
            for i in 0..missing {
                if frozen[i] {
                    continue;
                }
                let (mut zp, r) = continuation_polish(reduced, z[i], 20);
                if zp.im.abs() <= 1e-10 * zp.norm().max(1.0) {
                    zp = Complex64::new(zp.re, 0.0);
                }
                if r > CERTIFICATION_THRESHOLD {
                    continue;
                }
                let tol = DEDUP_TOL * zp.norm().max(1.0);
                let taken = known.iter().any(|&k| (zp - Complex64::new(k, 0.0)).norm() <= tol)
                    || z
                        .iter()
                        .enumerate()
                        .any(|(j, zj)| j != i && frozen[j] && (zp - zj).norm() <= tol);
                if !taken {
                    z[i] = zp;
                    frozen[i] = true;
                }
            }
            if frozen.iter().all(|&f| f) {
                converged = true;
                break;
            }
        }
        let mut froze_one = false;
        let mut max_step = 0.0f64;
        for i in 0..missing {
            if frozen[i] {
                continue;
            }
            let zi = z[i];
            let (ld_h, ratio) = continuation_log_deriv(reduced, zi);
            if !ld_h.re.is_finite() || !ld_h.im.is_finite() {
                z[i] = zi * 1.0001 + Complex64::new(1e-6, 1e-6);
                max_step = f64::INFINITY;
                continue;
            }
            // r'/r: strip the prefactor zero at 1/4 and the known roots
            let mut ld = ld_h - 2.0 / (4.0 * zi - 1.0);
            for &r in known {
                ld -= (zi - r).inv();
            }
            let newton = ld.inv();
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
                z[i] = zi * 1.0001 + Complex64::new(1e-6, 1e-6);
                max_step = f64::INFINITY;
                continue;
            }
            z[i] = zi - w;
            let step_rel = w.norm() / z[i].norm().max(1.0);
            max_step = max_step.max(step_rel);
            // certificate freeze: the value ratio reaches eps-level at most
            // roots; near pinch-adjacent roots it has a noise floor, where
            // a tiny Newton correction serves instead
            if ratio <= 1e-12 || (step_rel <= 1e-13 && ratio <= 1e-4) {
                frozen[i] = true;
                froze_one = true;
            }
        }
        if frozen.iter().all(|&f| f) {
            converged = true;
            break;
        }
        if std::env::var("EIGENPHASE_DEBUG_MISSING").is_ok() && (sweep % 50 == 0 || sweep == SWEEPS - 1) {
            let nf = frozen.iter().filter(|&&f| f).count();
            eprintln!("sweep {sweep}: frozen {nf}/{missing} max_step {max_step:.2e}");
            if sweep == SWEEPS - 1 {
                for (i, zi) in z.iter().enumerate() {
                    if !frozen[i] {
                        let (_, ratio) = continuation_log_deriv(reduced, *zi);
                        eprintln!("  unfrozen z={zi} ratio {ratio:.2e}");
                    }
                }
            }
        }
        if !froze_one && max_step <= 1e-13 {
            stalled += 1;
        } else {
            stalled = 0;
        }
        if stalled >= 3 {
            for (i, zi) in z.iter_mut().enumerate() {
                if !frozen[i] {
                    let angle = 2.399963229728653 * (i + sweep) as f64;
                    *zi += 1e-4
                        * zi.norm().max(0.1)
                        * Complex64::new(angle.cos(), angle.sin());
                }
            }
            stalled = 0;
        }
    }
    if !converged {
        return Err(Error::IncompleteSpectrum {
            found: reduced.n() - missing,
            expected: reduced.n(),
        });
    }

    // exact conjugate symmetry, then a final polish pass per pair
    crate::roots::symmetrize_conjugates(&mut z);
    z.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    let mut out: Vec<(Complex64, f64)> = Vec::with_capacity(missing);
    let mut i = 0;
    while i < z.len() {
        let zi = z[i];
        let paired = zi.im != 0.0 && i + 1 < z.len() && z[i + 1] == zi.conj();
        let (mut zp, mut r) = continuation_polish(reduced, zi, 16);
        if zp.im.abs() <= 1e-10 * zp.norm().max(1.0) {
            zp = Complex64::new(zp.re, 0.0);
            r = complex_residual(reduced, zp);
        }
        if paired {
            out.push((zp, r));
            out.push((zp.conj(), r));
            i += 2;
        } else {
            if zp.im != 0.0 {
                zp = Complex64::new(zp.re, 0.0);
                r = complex_residual(reduced, zp);
            }
            out.push((zp, r));
            i += 1;
        }
    }
    Ok(out)
}
