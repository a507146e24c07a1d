//! The transcendental phase equation and its solvers.
//!
//! For lambda > 1/4 the phase function
//!
//! ```text
//! phi(lambda) = arctan(1/u) + 2 sum_i arctan(alpha_i / u),   u = sqrt(4 lambda - 1)
//! ```
//!
//! crosses the level (2k-1) pi/2 exactly at the k-th eigenvalue. With all
//! parameters positive, phi is strictly decreasing from (2n+1) pi/2 at the
//! branch point down to 0, so every branch k = 1..n has a unique, brackatable
//! solution. With mixed signs the function is no longer monotone and any
//! integer k may carry zero or several solutions; those are located by a
//! sign-change scan.
//!
//! All solving happens in the u coordinate rather than lambda: eigenvalues
//! can sit within 1e-10 of the branch point 1/4, where lambda has almost no
//! f64 resolution left but u still has full relative precision. Residuals
//! are therefore measured at the solved u. For the same reason the solver
//! evaluates phi(u) - (2k-1) pi/2 in the rearranged form
//!
//! ```text
//! f_k(u) = m pi - arctan(u) - 2 sum_{a>0} c arctan(u/a) + 2 sum_{a<0} c arctan(u/|a|)
//! ```
//!
//! with integer m, which avoids the catastrophic cancellation of two huge
//! arctangent sums when n is large.

use crate::charpoly::sub_quarter_scaled;
use crate::error::{Error, Result};
use crate::params::ParameterSet;
use serde::Serialize;

/// pi = PI + PI_TAIL to roughly double precision.
const PI_TAIL: f64 = 1.2246467991473532e-16;

/// Lambda-space offset of the bracketing floor above the branch point.
const BRANCH_EPS: f64 = 8.673617379884035e-19; // 2^-60

/// Grouped, immutable view of a parameter set for phase evaluation.
///
/// Zero parameters contribute nothing to the phase sum and are dropped here;
/// their eigenvalues (at exactly 1/4) are accounted for by deflation.
#[derive(Debug, Clone)]
pub struct PhaseFunction {
    groups: Vec<(f64, f64)>, // (alpha, count), alpha != 0
    pos: i64,
    neg: i64,
}

impl PhaseFunction {
    pub fn new(params: &ParameterSet) -> Self {
        let mut groups = Vec::new();
        let mut pos = 0i64;
        let mut neg = 0i64;
        for &(a, c) in params.groups() {
            if a == 0.0 {
                continue;
            }
            if a > 0.0 {
                pos += c as i64;
            } else {
                neg += c as i64;
            }
            groups.push((a, c as f64));
        }
        PhaseFunction { groups, pos, neg }
    }

    /// Number of positive parameters (= number of solvable branches when no
    /// parameter is negative).
    pub fn positive_count(&self) -> i64 {
        self.pos
    }

    pub fn negative_count(&self) -> i64 {
        self.neg
    }

    /// phi as a function of u >= 0; u = 0 returns the branch-point limit.
    pub fn eval_u(&self, u: f64) -> f64 {
        if u == 0.0 {
            return (1 + 2 * (self.pos - self.neg)) as f64 * std::f64::consts::FRAC_PI_2;
        }
        let mut s = (1.0 / u).atan();
        for &(a, c) in &self.groups {
            s += 2.0 * c * (a / u).atan();
        }
        s
    }

    /// d phi / d u.
    pub fn deriv_u(&self, u: f64) -> f64 {
        let mut s = -1.0 / (1.0 + u * u);
        for &(a, c) in &self.groups {
            s -= 2.0 * c * a / (u * u + a * a);
        }
        s
    }

    /// phi(u) - (2k-1) pi/2, rearranged so the arctangent arguments are small
    /// near the branch point and the pi multiples collapse into one integer.
    /// Exact at u = 0 (the limit value is an integer multiple of pi).
    pub fn branch_residual(&self, u: f64, k: i64) -> f64 {
        let m = (self.pos - self.neg - k + 1) as f64;
        if u == 0.0 {
            return m * std::f64::consts::PI;
        }
        // Kahan-compensated accumulation of the arctangent sum.
        let mut s = u.atan();
        let mut comp = 0.0;
        for &(a, c) in &self.groups {
            let term = if a > 0.0 {
                2.0 * c * (u / a).atan()
            } else {
                -2.0 * c * (u / (-a)).atan()
            };
            let y = term - comp;
            let t = s + y;
            comp = (t - s) - y;
            s = t;
        }
        // m pi to double length: hi + exact product error + tail correction
        let hi = m * std::f64::consts::PI;
        let lo = f64::mul_add(m, std::f64::consts::PI, -hi) + m * PI_TAIL;
        (hi - s) + (lo - comp)
    }

    /// A u beyond which |phi| < pi/2, so no branch has solutions past it.
    /// |phi(u)| <= (2(P+M)+1) arctan(A/u) with A = max(1, max|alpha|).
    pub fn scan_ceiling(&self, max_abs: f64) -> f64 {
        let w = (2 * (self.pos + self.neg) + 1) as f64;
        let a = max_abs.max(1.0);
        a / (std::f64::consts::FRAC_PI_2 / w).tan()
    }
}

/// One phase-equation query: which branch, to what tolerance.
#[derive(Debug, Clone)]
pub struct PhaseQuery<'a> {
    pub params: &'a ParameterSet,
    pub k: i64,
    /// Absolute tolerance on lambda, applied relative to max(1, |lambda|).
    pub tol: f64,
    pub max_iter: usize,
}

impl<'a> PhaseQuery<'a> {
    pub fn new(params: &'a ParameterSet, k: i64) -> Self {
        PhaseQuery {
            params,
            k,
            tol: 1e-13,
            max_iter: 256,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

/// A solved phase crossing.
#[derive(Debug, Clone, Serialize)]
pub struct PhaseSolution {
    pub lambda: f64,
    /// |phi - (2k-1) pi/2| at the solved point, in phase units.
    pub residual: f64,
    pub iterations: usize,
    /// Initial certified bracket, in lambda units.
    pub bracket: (f64, f64),
}

fn lambda_of(u: f64) -> f64 {
    0.25 * (1.0 + u * u)
}

/// Solve the phase equation on branch k.
///
/// All-positive sets (more precisely: sets without negative parameters) have
/// exactly one solution for 1 <= k <= number of positive parameters, found by
/// bisection on a guaranteed bracket with Newton polish. Sets with negative
/// parameters are scanned: the returned list holds every crossing found on
/// the branch, sorted by increasing lambda, and may legitimately hold more
/// than one entry.
pub fn solve_branch(q: &PhaseQuery) -> Result<Vec<PhaseSolution>> {
    if !(q.tol > 0.0) {
        return Err(Error::DomainError {
            value: q.tol,
            constraint: "tol > 0",
        });
    }
    if q.max_iter == 0 {
        return Err(Error::ToleranceNotReached { max_iter: 0 });
    }
    let phase = PhaseFunction::new(q.params);
    if phase.negative_count() == 0 {
        let sol = solve_monotone_branch(&phase, q.params.max_abs(), q.k, q.tol, q.max_iter)?;
        Ok(vec![sol])
    } else {
        let sols = scan_branches(&phase, q.params, q.tol, q.max_iter, Some(q.k))?;
        if sols.is_empty() {
            return Err(Error::NoSolutionOnBranch { k: q.k });
        }
        Ok(sols.into_iter().map(|(_, s)| s).collect())
    }
}

/// Every branch solution for the parameter set: k = 1..=n with one solution
/// each when no parameter is negative, otherwise every crossing found by the
/// integer-branch scan, tagged with its branch index.
pub fn solve_all_branches(params: &ParameterSet, tol: f64) -> Result<Vec<(i64, PhaseSolution)>> {
    let phase = PhaseFunction::new(params);
    if phase.negative_count() == 0 {
        let sols = solve_all_monotone(params, tol, 256)?;
        Ok(sols
            .into_iter()
            .enumerate()
            .map(|(i, s)| (i as i64 + 1, s))
            .collect())
    } else {
        scan_branches(&phase, params, tol, 256, None)
    }
}

/// Branch-by-branch solve for sets without negative parameters, k = 1..=n.
/// The previous solution's u is a valid upper bracket for the next branch,
/// so the whole spectrum costs one doubling search plus n refinements.
pub(crate) fn solve_all_monotone(
    params: &ParameterSet,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<PhaseSolution>> {
    let phase = PhaseFunction::new(params);
    let n = phase.positive_count();
    let mut out = Vec::with_capacity(n as usize);
    let mut hi_hint = None;
    for k in 1..=n {
        let sol = monotone_branch_with_hint(&phase, params.max_abs(), k, tol, max_iter, hi_hint)?;
        hi_hint = Some((4.0 * sol.lambda - 1.0).max(0.0).sqrt());
        out.push(sol);
    }
    Ok(out)
}

fn solve_monotone_branch(
    phase: &PhaseFunction,
    max_abs: f64,
    k: i64,
    tol: f64,
    max_iter: usize,
) -> Result<PhaseSolution> {
    monotone_branch_with_hint(phase, max_abs, k, tol, max_iter, None)
}

fn monotone_branch_with_hint(
    phase: &PhaseFunction,
    max_abs: f64,
    k: i64,
    tol: f64,
    max_iter: usize,
    hi_hint: Option<f64>,
) -> Result<PhaseSolution> {
    let n = phase.positive_count();
    if k < 1 || k > n {
        return Err(Error::NoSolutionOnBranch { k });
    }
    let f = |u: f64| phase.branch_residual(u, k);
    // f(0) = (n - k + 1) pi > 0 for every valid k.
    let lo = 0.0;
    let hi = match hi_hint {
        Some(h) if f(h) < 0.0 => h,
        _ => {
            // start from the Newton-bound estimate x0 = sum (alpha_i+1)^2 / 4
            // and double until the sign condition holds
            let ceiling = phase.scan_ceiling(max_abs);
            let mut hi = hi_hint.unwrap_or_else(|| {
                let x0: f64 = phase
                    .groups
                    .iter()
                    .map(|&(a, c)| c * (a + 1.0) * (a + 1.0) / 4.0)
                    .sum::<f64>()
                    .max(0.3);
                (4.0 * x0 - 1.0).sqrt().max(1.0)
            });
            while f(hi) >= 0.0 {
                if hi >= ceiling {
                    hi = ceiling * 2.0;
                    if f(hi) >= 0.0 {
                        return Err(Error::NoSolutionOnBranch { k });
                    }
                    break;
                }
                hi = (hi * 2.0).min(ceiling * 1.0000001);
            }
            hi
        }
    };
    refine_crossing(phase, k, lo, hi, tol, max_iter)
}

/// Scan every integer branch (or just `only_k`) for crossings over a
/// geometric grid in u, refining each sign change.
pub(crate) fn scan_branches(
    phase: &PhaseFunction,
    params: &ParameterSet,
    tol: f64,
    max_iter: usize,
    only_k: Option<i64>,
) -> Result<Vec<(i64, PhaseSolution)>> {
    let u_floor = (4.0 * BRANCH_EPS).sqrt();
    let ceiling = phase.scan_ceiling(params.max_abs());
    let points = (64 * params.n().max(1)).max(256);
    // Geometric grid; S(u) = base sum so that f_k = m pi - S.
    let ratio = (ceiling / u_floor).ln() / (points - 1) as f64;
    let mut us = Vec::with_capacity(points);
    let mut svals = Vec::with_capacity(points);
    for i in 0..points {
        let u = u_floor * (ratio * i as f64).exp();
        // S(u) = m pi - f_k(u) for any k; use k with m = 0
        let k0 = phase.pos - phase.neg + 1;
        us.push(u);
        svals.push(-phase.branch_residual(u, k0));
    }
    let (smin, smax) = svals
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &s| {
            (lo.min(s), hi.max(s))
        });
    let m_lo = (smin / std::f64::consts::PI).floor() as i64 - 1;
    let m_hi = (smax / std::f64::consts::PI).ceil() as i64 + 1;
    let mut found = Vec::new();
    for m in m_lo..=m_hi {
        let k = phase.pos - phase.neg + 1 - m;
        if let Some(want) = only_k {
            if k != want {
                continue;
            }
        }
        let target = m as f64 * std::f64::consts::PI;
        for i in 1..points {
            let a = svals[i - 1] - target;
            let b = svals[i] - target;
            if a == 0.0 || a.signum() == b.signum() {
                continue;
            }
            // f_k = target - S flips sign on [us[i-1], us[i]]
            let sol = refine_crossing(phase, k, us[i - 1], us[i], tol, max_iter)?;
            found.push((k, sol));
        }
    }
    found.sort_by(|x, y| x.1.lambda.partial_cmp(&y.1.lambda).unwrap());
    found.dedup_by(|a, b| {
        (a.1.lambda - b.1.lambda).abs() <= 1e-12 * a.1.lambda.abs().max(1.0) && a.0 == b.0
    });
    Ok(found)
}

/// Bisection to a narrow bracket, then bracket-guarded Newton to machine
/// precision in u.
fn refine_crossing(
    phase: &PhaseFunction,
    k: i64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    max_iter: usize,
) -> Result<PhaseSolution> {
    let f = |u: f64| phase.branch_residual(u, k);
    let initial_bracket = (lambda_of(lo), lambda_of(hi));
    let slo = f(lo).signum();
    debug_assert!(slo != 0.0 && slo != f(hi).signum(), "bracket must change sign");
    let mut iterations = 0usize;
    // Phase 1: plain bisection until the bracket is narrow in lambda terms.
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || iterations >= max_iter {
            break;
        }
        let width_lambda = (hi - lo) * (hi + lo) * 0.25;
        if width_lambda < 1e-3 * lambda_of(mid) {
            break;
        }
        let fm = f(mid);
        iterations += 1;
        if fm == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if fm.signum() == slo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Phase 2: Newton polish with the bracket as a safety net. A bisection
    // step is forced whenever the bracket stops halving, so convergence to a
    // floating-point fixed point in u is guaranteed.
    let mut u = 0.5 * (lo + hi);
    let mut fu = f(u);
    let mut last_width = hi - lo;
    let mut stall = 0u32;
    while iterations < max_iter {
        iterations += 1;
        if fu == 0.0 {
            break;
        }
        if fu.signum() == slo {
            lo = u;
        } else {
            hi = u;
        }
        let width = hi - lo;
        if width <= 2.0 * f64::EPSILON * u.abs() {
            break;
        }
        if width > 0.5 * last_width {
            stall += 1;
        } else {
            stall = 0;
        }
        last_width = width;
        let d = phase.deriv_u(u);
        let newton = u - fu / d;
        let next = if stall >= 2 || !newton.is_finite() || newton <= lo || newton >= hi {
            stall = 0;
            0.5 * (lo + hi)
        } else {
            newton
        };
        if next == u {
            break;
        }
        let step = (next - u).abs();
        u = next;
        fu = f(u);
        if step <= f64::EPSILON * u.abs() {
            break;
        }
    }
    let lambda = lambda_of(u);
    let width = (hi - lo) * (hi + lo) * 0.25;
    if width > tol * lambda.max(1.0) && iterations >= max_iter {
        return Err(Error::ToleranceNotReached { max_iter });
    }
    Ok(PhaseSolution {
        lambda,
        residual: fu.abs(),
        iterations,
        bracket: initial_bracket,
    })
}

/// Value of the phase function at lambda > 1/4.
pub fn phase(params: &ParameterSet, lambda: f64) -> Result<f64> {
    if !(lambda > 0.25) {
        return Err(Error::DomainError {
            value: lambda,
            constraint: "lambda > 1/4",
        });
    }
    Ok(PhaseFunction::new(params).eval_u((4.0 * lambda - 1.0).sqrt()))
}

/// Closed-form derivative of the phase function with respect to lambda:
/// -2/(u (u^2+1)) - 4 sum_i alpha_i / (u (u^2 + alpha_i^2)), u = sqrt(4 lambda - 1).
pub fn phase_derivative(params: &ParameterSet, lambda: f64) -> Result<f64> {
    if !(lambda > 0.25) {
        return Err(Error::DomainError {
            value: lambda,
            constraint: "lambda > 1/4",
        });
    }
    let u = (4.0 * lambda - 1.0).sqrt();
    let mut s = -2.0 / (u * (u * u + 1.0));
    for &(a, c) in params.groups() {
        if a == 0.0 {
            continue;
        }
        s -= 4.0 * c as f64 * a / (u * (u * u + a * a));
    }
    Ok(s)
}

/// All real eigenvalues below 1/4, from a sign-change scan of the
/// sub-quarter product form over a uniform grid in u = sqrt(1-4x).
///
/// Sets without negative parameters have no eigenvalues below the branch
/// point beyond what deflation already accounts for, so the scan only runs
/// when a negative parameter is present. Roots within 1e-9 of 1/4 are
/// discarded: the branch boundary is always a zero of the scanned form and
/// carries no spectral information (the multiplicity at exactly 1/4 comes
/// from counting zero parameters).
pub fn solve_sub_quarter(params: &ParameterSet, tol: f64) -> Vec<f64> {
    sub_quarter_roots_with_enclosure(params, tol)
        .into_iter()
        .map(|(x, _)| x)
        .collect()
}

/// As [`solve_sub_quarter`], additionally returning each root's certificate:
/// the relative width of the final sign-change enclosure. The scanned form
/// can be arbitrarily steep relative to its own term magnitudes (both
/// products may vanish together at a root), so enclosure width is the
/// faithful residual for these roots, not a function-value ratio.
pub(crate) fn sub_quarter_roots_with_enclosure(params: &ParameterSet, tol: f64) -> Vec<(f64, f64)> {
    let phase = PhaseFunction::new(params);
    if phase.negative_count() == 0 {
        return Vec::new();
    }
    let tol = if tol > 0.0 { tol } else { 1e-13 };
    let max_alpha = params.max_abs();
    let u_min = 2f64.powi(-19);
    let u_max = (4.0 * max_alpha * max_alpha + 5.0).sqrt();
    let points = (256 * params.n()).max(512);
    let g = |u: f64| {
        let x = 0.25 * (1.0 - u * u);
        sub_quarter_scaled(params, x)
            .map(|(v, _)| v.signum())
            .unwrap_or(0.0)
    };
    let step = (u_max - u_min) / (points - 1) as f64;
    let mut roots = Vec::new();
    let mut prev_u = u_min;
    let mut prev_s = g(prev_u);
    for i in 1..points {
        let u = u_min + step * i as f64;
        let s = g(u);
        if s != 0.0 && prev_s != 0.0 && s != prev_s {
            roots.push(bisect_sub_quarter(params, prev_u, u, prev_s, tol));
        } else if prev_s == 0.0 && s != 0.0 {
            // landed exactly on a root at the previous grid point
            roots.push((0.25 * (1.0 - prev_u * prev_u), 0.0));
        }
        prev_u = u;
        prev_s = s;
    }
    roots.retain(|(x, _)| (x - 0.25).abs() > 1e-9 * x.abs().max(1.0));
    roots.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    roots.dedup_by(|a, b| (a.0 - b.0).abs() <= 1e-12 * a.0.abs().max(1.0));
    roots
}

/// Candidate locations of nearly-double root structures: points where a
/// scanned function approaches zero without crossing it (a tight real pair
/// or a complex pair with small imaginary part lives underneath).
///
/// Two surfaces are inspected: the magnitude of the sub-quarter form on its
/// uniform u-grid, and the phase sum's distance to the nearest odd multiple
/// of pi/2 level on the geometric branch grid. Candidates are the refined
/// dip locations in x; callers decide what actually lives there by complex
/// Newton polish and certification.
pub(crate) fn tangency_candidates(params: &ParameterSet) -> Vec<f64> {
    let mut out = Vec::new();
    let phase = PhaseFunction::new(params);
    if phase.negative_count() == 0 {
        return out;
    }

    // sub-quarter side: log-magnitude dips of g without a sign change
    let max_alpha = params.max_abs();
    let u_min = 2f64.powi(-19);
    let u_max = (4.0 * max_alpha * max_alpha + 5.0).sqrt();
    let points = (256 * params.n()).max(512);
    let step = (u_max - u_min) / (points - 1) as f64;
    let log_g = |u: f64| -> (f64, f64) {
        let x = 0.25 * (1.0 - u * u);
        match sub_quarter_scaled(params, x) {
            Ok((v, _)) if !v.is_zero() => (
                v.mantissa.abs().log2() + v.exponent as f64,
                v.signum(),
            ),
            _ => (f64::NEG_INFINITY, 0.0),
        }
    };
    let grid: Vec<(f64, f64, f64)> = (0..points)
        .map(|i| {
            let u = u_min + step * i as f64;
            let (lm, s) = log_g(u);
            (u, lm, s)
        })
        .collect();
    for w in grid.windows(3) {
        let [(ul, ll, sl), (um, lm, sm), (ur, lr, sr)] = [w[0], w[1], w[2]];
        if sm == 0.0 || sl != sm || sm != sr {
            continue; // crossings belong to the sign scan
        }
        // a dip at least a few bits deep relative to its shoulders
        if lm < ll - 0.5 && lm < lr - 0.5 {
            let u_star = ternary_min(
                |u| log_g(u).0,
                ul,
                ur,
            );
            out.push(0.25 * (1.0 - u_star * u_star));
        }
    }

    // phase side: extrema of the branch sum grazing a level
    let u_floor = (4.0 * BRANCH_EPS).sqrt();
    let ceiling = phase.scan_ceiling(max_alpha);
    let n_points = (64 * params.n().max(1)).max(256);
    let ratio = (ceiling / u_floor).ln() / (n_points - 1) as f64;
    let k0 = phase.pos - phase.neg + 1;
    let svals: Vec<(f64, f64)> = (0..n_points)
        .map(|i| {
            let u = u_floor * (ratio * i as f64).exp();
            (u, -phase.branch_residual(u, k0))
        })
        .collect();
    for w in svals.windows(3) {
        let [(ul, sl), (um, sm), (ur, sr)] = [w[0], w[1], w[2]];
        let maximum = sm > sl && sm > sr;
        let minimum = sm < sl && sm < sr;
        if !maximum && !minimum {
            continue;
        }
        let pi = std::f64::consts::PI;
        let m_near = (sm / pi).round();
        let dist = (sm - m_near * pi).abs();
        if dist > 0.5 * pi {
            continue;
        }
        // refine the extremum; only graze points count (the level is not
        // crossed in the neighborhood, otherwise the sign scan has it)
        let crossed = (sl - m_near * pi).signum() != (sr - m_near * pi).signum();
        if crossed {
            continue;
        }
        let u_star = if maximum {
            ternary_min(|u| phase.branch_residual(u, k0), ul, ur)
        } else {
            ternary_min(|u| -phase.branch_residual(u, k0), ul, ur)
        };
        let _ = um;
        out.push(0.25 * (1.0 + u_star * u_star));
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * a.abs().max(1.0));
    out
}

/// Ternary minimization of a unimodal-enough scalar function.
fn ternary_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..80 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) <= f(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(1e-30) {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn bisect_sub_quarter(
    params: &ParameterSet,
    mut lo: f64,
    mut hi: f64,
    slo: f64,
    tol: f64,
) -> (f64, f64) {
    let g = |u: f64| {
        let x = 0.25 * (1.0 - u * u);
        sub_quarter_scaled(params, x)
            .map(|(v, _)| v.signum())
            .unwrap_or(0.0)
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let x_width = (hi - lo) * (hi + lo) * 0.25;
        let x_mid = 0.25 * (1.0 - mid * mid);
        if x_width <= tol.min(4.0 * f64::EPSILON * x_mid.abs().max(1.0)) {
            break;
        }
        let s = g(mid);
        if s == 0.0 {
            return (mid, 0.0);
        }
        if s == slo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = 0.25 * (1.0 - (0.5 * (lo + hi)).powi(2));
    let enclosure = (hi - lo) * (hi + lo) * 0.25 / x.abs().max(1.0);
    (x, enclosure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(a: &[f64]) -> ParameterSet {
        ParameterSet::new(a.to_vec()).unwrap()
    }

    #[test]
    fn empty_sum_is_a_single_arctangent() {
        let p = ParameterSet::empty();
        assert_relative_eq!(
            phase(&p, 0.5).unwrap(),
            std::f64::consts::FRAC_PI_4,
            max_relative = 1e-15
        );
    }

    #[test]
    fn equal_parameters_collapse_the_sum() {
        let n = 7;
        let p = ParameterSet::new(vec![1.0; n]).unwrap();
        for &lam in &[0.3, 0.5, 2.0, 10.0] {
            let u = (4.0f64 * lam - 1.0).sqrt();
            let expect = (2 * n + 1) as f64 * (1.0 / u).atan();
            assert_relative_eq!(phase(&p, lam).unwrap(), expect, max_relative = 1e-14);
        }
    }

    #[test]
    fn mixed_example_crossings_sit_on_the_printed_levels() {
        // lambda = 22.5527 crosses pi/2 (k = 1) and lambda = 0.9821 crosses
        // 3 pi/2 (k = 2); both values printed to 4-5 digits.
        let p = params(&[5.0, -0.1, 3.0, -2.0, 1.5]);
        let v1 = phase(&p, 22.5527).unwrap();
        assert!((v1 - std::f64::consts::FRAC_PI_2).abs() < 1e-3, "{v1}");
        let v2 = phase(&p, 0.9821).unwrap();
        assert!((v2 - 3.0 * std::f64::consts::FRAC_PI_2).abs() < 1e-3, "{v2}");
    }

    #[test]
    fn derivative_examples() {
        let p = ParameterSet::empty();
        assert_relative_eq!(phase_derivative(&p, 0.5).unwrap(), -1.0, max_relative = 1e-15);

        // strictly negative for positive parameters
        let q = params(&[0.3, 1.7, 2.0]);
        for &lam in &[0.26, 0.5, 3.0, 50.0] {
            assert!(phase_derivative(&q, lam).unwrap() < 0.0);
        }
    }

    #[test]
    fn derivative_matches_central_differences() {
        let p = params(&[0.8, 2.5, 1.1]);
        for &lam in &[0.4, 1.3, 7.0] {
            let h = 1e-6 * lam;
            let fd = (phase(&p, lam + h).unwrap() - phase(&p, lam - h).unwrap()) / (2.0 * h);
            let an = phase_derivative(&p, lam).unwrap();
            assert!(
                (an - fd).abs() <= 1e-5 * an.abs(),
                "lam={lam}: {an} vs {fd}"
            );
        }
    }

    #[test]
    fn domain_is_strictly_above_one_quarter() {
        let p = params(&[1.0]);
        assert!(matches!(phase(&p, 0.25), Err(Error::DomainError { .. })));
        assert!(matches!(
            phase_derivative(&p, 0.1),
            Err(Error::DomainError { .. })
        ));
    }

    #[test]
    fn two_ones_branches_match_the_secant_closed_form() {
        let p = params(&[1.0, 1.0]);
        let s1 = solve_branch(&PhaseQuery::new(&p, 1)).unwrap();
        let s2 = solve_branch(&PhaseQuery::new(&p, 2)).unwrap();
        let pi = std::f64::consts::PI;
        assert_relative_eq!(
            s1[0].lambda,
            0.25 / (2.0 * pi / 5.0).cos().powi(2),
            max_relative = 1e-13
        );
        assert_relative_eq!(
            s2[0].lambda,
            0.25 / (pi / 5.0).cos().powi(2),
            max_relative = 1e-13
        );
        assert!(s1[0].lambda > s2[0].lambda);
    }

    #[test]
    fn single_parameter_branch_is_the_closed_square() {
        let p = params(&[2.0]);
        let s = solve_branch(&PhaseQuery::new(&p, 1)).unwrap();
        assert_relative_eq!(s[0].lambda, 2.25, max_relative = 1e-13);
        assert!(s[0].residual < 1e-10);
    }

    #[test]
    fn out_of_range_branch_errors() {
        let p = params(&[1.0, 1.0]);
        assert_eq!(
            solve_branch(&PhaseQuery::new(&p, 3)).unwrap_err(),
            Error::NoSolutionOnBranch { k: 3 }
        );
        assert_eq!(
            solve_branch(&PhaseQuery::new(&p, 0)).unwrap_err(),
            Error::NoSolutionOnBranch { k: 0 }
        );
    }

    #[test]
    fn mixed_scan_reproduces_the_printed_pair() {
        let p = params(&[5.0, -0.1, 3.0, -2.0, 1.5]);
        let phase_fn = PhaseFunction::new(&p);
        let all = scan_branches(&phase_fn, &p, 1e-13, 256, None).unwrap();
        let mut lambdas: Vec<f64> = all.iter().map(|(_, s)| s.lambda).collect();
        lambdas.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(lambdas.len(), 2, "crossings: {lambdas:?}");
        assert!((lambdas[0] - 0.9821).abs() < 5e-4);
        assert!((lambdas[1] - 22.5527).abs() < 5e-4);
    }

    #[test]
    fn monotone_spectrum_is_strictly_decreasing() {
        let p = params(&[0.4, 1.0, 2.2, 3.1, 0.9]);
        let sols = solve_all_monotone(&p, 1e-13, 256).unwrap();
        assert_eq!(sols.len(), 5);
        for w in sols.windows(2) {
            assert!(w[0].lambda > w[1].lambda);
        }
        for s in &sols {
            assert!(s.lambda > 0.25);
            assert!(s.residual < 1e-10);
        }
    }

    #[test]
    fn sub_quarter_scan_examples() {
        // the mixed five-parameter example has exactly one root below 1/4
        let p = params(&[5.0, -0.1, 3.0, -2.0, 1.5]);
        let roots = solve_sub_quarter(&p, 1e-13);
        assert_eq!(roots.len(), 1, "roots: {roots:?}");
        assert!((roots[0] - 0.2287).abs() < 5e-4);

        // all-positive sets have none
        assert!(solve_sub_quarter(&params(&[1.0, 1.0]), 1e-13).is_empty());

        // single negative parameter: eigenvalue (1-0.5)^2/4
        let q = params(&[-0.5]);
        let r = solve_sub_quarter(&q, 1e-13);
        assert_eq!(r.len(), 1);
        assert_relative_eq!(r[0], 0.0625, max_relative = 1e-10);
    }

    #[test]
    fn branch_residual_is_exact_at_the_branch_point() {
        let p = params(&[2.0, 3.0, 4.0]);
        let f = PhaseFunction::new(&p);
        // m = 3 - 0 - 1 + 1 = 3
        assert_eq!(f.branch_residual(0.0, 1), 3.0 * std::f64::consts::PI);
        assert_eq!(f.branch_residual(0.0, 4), 0.0);
    }
}
