//! Floquet solutions of the general Mathieu equation
//!
//! ```text
//! y'' + (h - 2θ cos 2t) y = 0,    y(t) = Σ c_n exp((μ + 2ni) t)
//! ```
//!
//! with the coefficient recurrence
//!
//! ```text
//! -θ c_{n-1} + [h + (μ + 2ni)²] c_n - θ c_{n+1} = 0.
//! ```
//!
//! The exponent `μ` is a root of the truncated Hill determinant, found by a
//! complex secant iteration seeded by the monodromy oracle. Exponents are only
//! defined up to the class `{±μ + 2ik}`; [`normal_form`] picks a deterministic
//! representative.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::oracle::monodromy_exponent;
use crate::{AnalyticSolution, ComplexScalar, GeneralParams, MathieuError, Result, SolutionSample};

/// Starting truncation; doubled until the tail criterion holds.
pub const DEFAULT_TRUNCATION: usize = 25;
pub const MAX_TRUNCATION: usize = 400;
/// Accepted `|c_{±N}| / max |c_n|`.
pub const TAIL_TOL: f64 = 1e-12;
/// Default `tol_b` for [`classify_stability`].
pub const STABILITY_TOL: f64 = 1e-8;

const PURE_IMAG_TOL: f64 = 1e-9;
const SECANT_MAX_ITER: usize = 200;
const ROOT_ACCEPT: f64 = 1e-8;
const INTEGER_TOL: f64 = 1e-9;

fn i() -> ComplexScalar {
    ComplexScalar::new(0.0, 1.0)
}

/// Representative of the class `{±μ + 2ik}`: `Re μ ≥ 0` and `Im μ ∈ [0, 2)`.
///
/// When `|Re μ| ≤ 1e-9` the sign is instead chosen so that `Im μ mod 2 ∈ [0, 1]`.
pub fn normal_form(mu: ComplexScalar) -> ComplexScalar {
    let reduce = |x: f64| {
        let r = x.rem_euclid(2.0);
        if r >= 2.0 {
            0.0
        } else {
            r
        }
    };
    let mut m = mu;
    if m.re.abs() <= PURE_IMAG_TOL {
        if reduce(m.im) > 1.0 {
            m = -m;
        }
    } else if m.re < 0.0 {
        m = -m;
    }
    ComplexScalar::new(m.re, reduce(m.im))
}

/// Distance between the classes of `a` and `b`.
pub fn class_distance(a: ComplexScalar, b: ComplexScalar) -> f64 {
    [a, -a]
        .iter()
        .map(|s| {
            let d = s - b;
            let mut im = d.im.rem_euclid(2.0);
            if im > 1.0 {
                im -= 2.0;
            }
            ComplexScalar::new(d.re, im).norm()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Member of `μ`'s class nearest to `√(-h)` (principal branch), the value the
/// exponent takes continuously from `θ = 0`.
pub fn unreduced(mu: ComplexScalar, h: ComplexScalar) -> ComplexScalar {
    let target = (ComplexScalar::new(0.0, 0.0) - h).sqrt();
    let mut best = mu;
    let mut best_d = f64::INFINITY;
    for s in [mu, -mu] {
        let k = ((target.im - s.im) / 2.0).round();
        for dk in [-1.0, 0.0, 1.0] {
            let cand = s + i() * (2.0 * (k + dk));
            let d = (cand - target).norm();
            if d < best_d {
                best_d = d;
                best = cand;
            }
        }
    }
    best
}

fn diagonal(gp: &GeneralParams, mu: ComplexScalar, n: i64) -> ComplexScalar {
    let shifted = mu + i() * (2.0 * n as f64);
    gp.h + shifted * shifted
}

/// Row-scaled determinant of the `(2N+1)`-square truncation of the recurrence.
pub fn hill_determinant(gp: &GeneralParams, mu: ComplexScalar, trunc: usize) -> ComplexScalar {
    let n = trunc as i64;
    let scale = |k: i64| 4.0 * (k * k) as f64 + gp.h.norm() + 1.0;
    let theta2 = gp.theta * gp.theta;
    let mut d_prev2 = ComplexScalar::new(1.0, 0.0);
    let mut d_prev = diagonal(gp, mu, -n) / scale(-n);
    for k in (-n + 1)..=n {
        let next = diagonal(gp, mu, k) / scale(k) * d_prev - theta2 / (scale(k) * scale(k - 1)) * d_prev2;
        d_prev2 = d_prev;
        d_prev = next;
    }
    d_prev
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicExponent {
    /// Class representative in [`normal_form`].
    pub mu: ComplexScalar,
    /// Class member nearest `√(-h)`.
    pub unreduced: ComplexScalar,
    pub truncation: usize,
    /// Size of the last secant correction.
    pub last_step: f64,
    pub iterations: usize,
    /// Monodromy estimate the iteration started from.
    pub seed: Option<ComplexScalar>,
}

/// Root of the truncated Hill determinant in the class selected by the monodromy oracle.
pub fn characteristic_exponent(gp: GeneralParams, trunc: usize) -> Result<CharacteristicExponent> {
    if trunc < 5 {
        return Err(MathieuError::InvalidInput(format!("truncation must be >= 5, got {trunc}")));
    }
    GeneralParams::new(gp.h, gp.theta)?;
    if gp.theta == ComplexScalar::new(0.0, 0.0) {
        let exact = (ComplexScalar::new(0.0, 0.0) - gp.h).sqrt();
        return Ok(CharacteristicExponent {
            mu: normal_form(exact),
            unreduced: exact,
            truncation: trunc,
            last_step: 0.0,
            iterations: 0,
            seed: None,
        });
    }
    let seed = monodromy_exponent(gp)?.mu;
    let (root, last_step, iterations) = secant_root(&gp, seed, trunc)?;
    if class_distance(root, seed) > 1e-4 {
        return Err(MathieuError::Convergence(format!(
            "determinant root {root} left the class of the monodromy seed {seed} (h = {}, θ = {})",
            gp.h, gp.theta
        )));
    }
    let mu = normal_form(root);
    Ok(CharacteristicExponent {
        mu,
        unreduced: unreduced(mu, gp.h),
        truncation: trunc,
        last_step,
        iterations,
        seed: Some(seed),
    })
}

/// Complex secant iteration on the Hill determinant. Returns `(root, last step, iterations)`.
pub fn secant_root(gp: &GeneralParams, start: ComplexScalar, trunc: usize) -> Result<(ComplexScalar, f64, usize)> {
    let f = |m: ComplexScalar| hill_determinant(gp, m, trunc);
    let mut x0 = start;
    let mut x1 = start + ComplexScalar::new(1e-4, 1e-4);
    let mut f0 = f(x0);
    let mut f1 = f(x1);
    let mut step = (x1 - x0).norm();
    for iter in 1..=SECANT_MAX_ITER {
        if f1 == ComplexScalar::new(0.0, 0.0) {
            return Ok((x1, 0.0, iter));
        }
        let denom = f1 - f0;
        if denom == ComplexScalar::new(0.0, 0.0) {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / denom;
        if !x2.is_finite() {
            break;
        }
        step = (x2 - x1).norm();
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f(x1);
        if step <= 4.0 * f64::EPSILON * x1.norm().max(1.0) {
            return Ok((x1, step, iter));
        }
    }
    if step <= ROOT_ACCEPT {
        return Ok((x1, step, SECANT_MAX_ITER));
    }
    Err(MathieuError::Convergence(format!(
        "secant iteration from {start} stalled at {x1} (last step {step:e}, |D| = {:e}, N = {trunc})",
        f1.norm()
    )))
}

/// Floquet solution `Σ c_n exp((μ + 2ni) t)` with `c_0 = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloquetSolution {
    pub gp: GeneralParams,
    /// Exponent carried by this coefficient indexing (the unreduced member).
    pub mu: ComplexScalar,
    /// `c_{-N}, …, c_N`.
    pub coeffs: Vec<ComplexScalar>,
    pub truncation: usize,
    /// `max(|c_{-N}|, |c_N|) / max |c_n|`.
    pub tail_ratio: f64,
    /// Largest recurrence residual for `|n| < N`, relative to the largest term in that row.
    pub recurrence_residual: f64,
}

impl FloquetSolution {
    /// `c_n`, zero outside the truncation.
    pub fn coeff(&self, n: i64) -> ComplexScalar {
        let idx = n + self.truncation as i64;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            ComplexScalar::new(0.0, 0.0)
        } else {
            self.coeffs[idx as usize]
        }
    }

    pub fn mu_normal(&self) -> ComplexScalar {
        normal_form(self.mu)
    }

    pub fn eval(&self, t: f64) -> SolutionSample {
        let n = self.truncation as i64;
        let mut y = ComplexScalar::new(0.0, 0.0);
        let mut dy = y;
        let mut d2y = y;
        for (j, c) in self.coeffs.iter().enumerate() {
            let k = j as i64 - n;
            let rate = self.mu + i() * (2.0 * k as f64);
            let e = ComplexScalar::from_polar(1.0, 2.0 * k as f64 * t) * *c;
            y += e;
            dy += rate * e;
            d2y += rate * rate * e;
        }
        let growth = (self.mu.re * t).exp() * ComplexScalar::from_polar(1.0, self.mu.im * t);
        SolutionSample {
            t,
            y: y * growth,
            dy: dy * growth,
            d2y: d2y * growth,
        }
    }
}

impl AnalyticSolution for FloquetSolution {
    fn sample(&self, t: f64) -> Result<SolutionSample> {
        Ok(self.eval(t))
    }
}

pub fn eval_floquet(sol: &FloquetSolution, t: f64) -> SolutionSample {
    sol.eval(t)
}

fn tiny(x: ComplexScalar, scale: f64) -> bool {
    x.norm() <= 1e-14 * scale.max(f64::MIN_POSITIVE)
}

/// Coefficients for an exponent `mu` already known to solve the determinant condition.
pub fn coefficients(gp: GeneralParams, mu: ComplexScalar, trunc: usize) -> Result<FloquetSolution> {
    if trunc < 5 {
        return Err(MathieuError::InvalidInput(format!("truncation must be >= 5, got {trunc}")));
    }
    let n = trunc as i64;
    let len = 2 * trunc + 1;
    let zero = ComplexScalar::new(0.0, 0.0);
    let one = ComplexScalar::new(1.0, 0.0);
    let theta = gp.theta;
    let mut coeffs = vec![zero; len];
    let at = |k: i64| (k + n) as usize;

    if theta == zero {
        coeffs[at(0)] = one;
    } else {
        let d: Vec<ComplexScalar> = (-n..=n).map(|k| diagonal(&gp, mu, k)).collect();
        let scale = |k: i64| d[at(k)].norm() + 2.0 * theta.norm();

        // r_k = c_k / c_{k-1} from the right, l_k = c_k / c_{k+1} from the left.
        let mut right = vec![zero; len + 1];
        let mut right_ok = true;
        for k in (1..=n).rev() {
            let next = if k == n { zero } else { right[at(k + 1)] };
            let den = d[at(k)] - theta * next;
            if tiny(den, scale(k)) {
                right_ok = false;
                break;
            }
            right[at(k)] = theta / den;
        }
        let mut left = vec![zero; len];
        let mut left_ok = true;
        for k in -n..=-1 {
            let prev = if k == -n { zero } else { left[at(k - 1)] };
            let den = d[at(k)] - theta * prev;
            if tiny(den, scale(k)) {
                left_ok = false;
                break;
            }
            left[at(k)] = theta / den;
        }

        coeffs[at(0)] = one;
        match (left_ok, right_ok) {
            (true, true) => {
                for k in 1..=n {
                    coeffs[at(k)] = right[at(k)] * coeffs[at(k - 1)];
                    coeffs[at(-k)] = left[at(-k)] * coeffs[at(-k + 1)];
                }
            }
            (true, false) => {
                for k in 1..=n {
                    coeffs[at(-k)] = left[at(-k)] * coeffs[at(-k + 1)];
                }
                // Forward sweep: c_{k+1} = (d_k c_k - θ c_{k-1}) / θ.
                for k in 0..n {
                    coeffs[at(k + 1)] = (d[at(k)] * coeffs[at(k)] - theta * coeffs[at(k - 1)]) / theta;
                }
            }
            (false, true) => {
                for k in 1..=n {
                    coeffs[at(k)] = right[at(k)] * coeffs[at(k - 1)];
                }
                for k in (-n + 1..=0).rev() {
                    coeffs[at(k - 1)] = (d[at(k)] * coeffs[at(k)] - theta * coeffs[at(k + 1)]) / theta;
                }
            }
            (false, false) => {
                return Err(MathieuError::Degenerate(format!(
                    "continued fractions break down in both directions for h = {}, θ = {}, μ = {mu}",
                    gp.h, gp.theta
                )));
            }
        }
    }

    let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let tail_ratio = coeffs[0].norm().max(coeffs[len - 1].norm()) / max;
    let mut recurrence_residual: f64 = 0.0;
    for k in (-n + 1)..n {
        let terms = [
            -theta * coeffs[at(k - 1)],
            diagonal(&gp, mu, k) * coeffs[at(k)],
            -theta * coeffs[at(k + 1)],
        ];
        let size = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
        if size > 0.0 {
            let r = terms.iter().sum::<ComplexScalar>().norm() / size.max(max * f64::EPSILON);
            recurrence_residual = recurrence_residual.max(r);
        }
    }
    if !coeffs.iter().all(|c| c.is_finite()) {
        return Err(MathieuError::Degenerate(format!(
            "non-finite Floquet coefficients for h = {}, θ = {}, μ = {mu}",
            gp.h, gp.theta
        )));
    }
    Ok(FloquetSolution {
        gp,
        mu,
        coeffs,
        truncation: trunc,
        tail_ratio,
        recurrence_residual,
    })
}

/// Exponent and coefficients, doubling the truncation from 25 until the tail criterion holds.
pub fn solve(gp: GeneralParams) -> Result<FloquetSolution> {
    let mut trunc = DEFAULT_TRUNCATION;
    loop {
        let ce = characteristic_exponent(gp, trunc)?;
        let sol = coefficients(gp, ce.unreduced, trunc)?;
        if sol.tail_ratio <= TAIL_TOL {
            return Ok(sol);
        }
        if trunc * 2 > MAX_TRUNCATION {
            return Err(MathieuError::Convergence(format!(
                "coefficient tail {:e} above {TAIL_TOL:e} at truncation {trunc}",
                sol.tail_ratio
            )));
        }
        trunc *= 2;
    }
}

/// `exp(-μt) P(-t)`: exponent `-μ` with coefficients `c_{-n}`.
///
/// Fails when the multiplier `exp(μπ)` equals `+1` (`μ ∈ 2iℤ`) or when the pair
/// is numerically dependent at `t = 0`.
pub fn second_solution(sol: &FloquetSolution) -> Result<FloquetSolution> {
    let m = sol.mu;
    let half = m.im / 2.0;
    if m.re.abs() <= INTEGER_TOL && (half - half.round()).abs() <= INTEGER_TOL / 2.0 {
        return Err(MathieuError::Degenerate(format!(
            "μ = {m} lies in 2iℤ; the Floquet pair is not fundamental"
        )));
    }
    let mut coeffs = sol.coeffs.clone();
    coeffs.reverse();
    let second = FloquetSolution {
        gp: sol.gp,
        mu: -m,
        coeffs,
        truncation: sol.truncation,
        tail_ratio: sol.tail_ratio,
        recurrence_residual: sol.recurrence_residual,
    };
    let a = sol.eval(0.0);
    let b = second.eval(0.0);
    let w = a.y * b.dy - a.dy * b.y;
    let scale = (a.y * b.dy).norm() + (a.dy * b.y).norm();
    if w.norm() <= 1e-10 * scale {
        return Err(MathieuError::Degenerate(format!(
            "Floquet pair for μ = {m} is linearly dependent (W(0) = {w})"
        )));
    }
    Ok(second)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Unstable,
    Boundary,
}

impl Stability {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
            Stability::Boundary => "boundary",
        }
    }
}

/// Unstable when `|Re μ| > tol_b`. Below that, growth rates under `1e-4 · tol_b`
/// count as zero (stable); the band in between is a transition curve.
pub fn classify_stability(mu: ComplexScalar, tol_b: f64) -> Stability {
    let re = mu.re.abs();
    if re > tol_b {
        Stability::Unstable
    } else if re > 1e-4 * tol_b {
        Stability::Boundary
    } else {
        Stability::Stable
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub h: f64,
    pub theta: f64,
    pub mu: ComplexScalar,
    pub stability: Stability,
}

/// Exponents over the grid `h_values × theta_values`, in row-major order (h outer).
pub fn stability_sweep(h_values: &[f64], theta_values: &[f64], trunc: usize) -> Result<Vec<SweepPoint>> {
    let points: Vec<(f64, f64)> = h_values
        .iter()
        .flat_map(|&h| theta_values.iter().map(move |&th| (h, th)))
        .collect();
    points
        .par_iter()
        .map(|&(h, theta)| {
            let ce = characteristic_exponent(GeneralParams::real(h, theta), trunc)?;
            Ok(SweepPoint {
                h,
                theta,
                mu: ce.mu,
                stability: classify_stability(ce.mu, STABILITY_TOL),
            })
        })
        .collect()
}

/// Floquet multiplier `exp(μπ)`.
pub fn multiplier(mu: ComplexScalar) -> ComplexScalar {
    (mu * PI).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> ComplexScalar {
        ComplexScalar::new(re, im)
    }

    #[test]
    fn normal_form_examples() {
        assert_eq!(normal_form(c(0.0, 1.0)), c(0.0, 1.0));
        assert_eq!(normal_form(c(0.0, 2.0)), c(0.0, 0.0));
        assert_eq!(normal_form(c(0.0, -0.5)), c(0.0, 0.5));
        assert_eq!(normal_form(c(0.0, 1.5)), c(0.0, 0.5));
        assert_eq!(normal_form(c(-0.3, 0.25)), c(0.3, 1.75));
        assert_eq!(normal_form(c(0.3, -4.0)), c(0.3, 0.0));
    }

    #[test]
    fn class_distance_ignores_representative() {
        let mu = c(0.2, 0.7);
        for other in [-mu, mu + c(0.0, 2.0), -mu - c(0.0, 6.0)] {
            assert!(class_distance(mu, other) < 1e-14);
        }
        assert!(class_distance(mu, c(0.2, 0.9)) > 0.1);
    }

    #[test]
    fn theta_zero_is_exact() {
        for h in [0.25, 1.0, 2.25, 4.0] {
            let ce = characteristic_exponent(GeneralParams::real(h, 0.0), 25).unwrap();
            assert!((ce.unreduced - c(0.0, h.sqrt())).norm() < 1e-15);
            let sol = coefficients(GeneralParams::real(h, 0.0), ce.unreduced, 25).unwrap();
            for k in -25..=25 {
                let expect = if k == 0 { 1.0 } else { 0.0 };
                assert_eq!(sol.coeff(k), c(expect, 0.0));
            }
        }
        let ce = characteristic_exponent(GeneralParams::real(4.0, 0.0), 25).unwrap();
        assert_eq!(ce.mu, c(0.0, 0.0));
        assert_eq!(ce.unreduced, c(0.0, 2.0));
    }

    #[test]
    fn small_truncation_rejected() {
        assert!(characteristic_exponent(GeneralParams::real(1.0, 0.5), 4).is_err());
    }

    #[test]
    fn periodic_part_has_period_pi() {
        let sol = solve(GeneralParams::real(1.0, 0.5)).unwrap();
        for t in [0.0, 0.4, 2.2] {
            let a = sol.eval(t).y * (-sol.mu * t).exp();
            let b = sol.eval(t + PI).y * (-sol.mu * (t + PI)).exp();
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn second_solution_rules() {
        let sol = solve(GeneralParams::real(1.0, 0.0)).unwrap();
        let s2 = second_solution(&sol).unwrap();
        let v = s2.eval(0.7).y;
        assert!((v - c(0.0, -0.7).exp()).norm() < 1e-14);
        let sol = solve(GeneralParams::real(4.0, 0.0)).unwrap();
        assert!(matches!(second_solution(&sol), Err(MathieuError::Degenerate(_))));
    }

    #[test]
    fn stability_labels() {
        assert_eq!(classify_stability(c(0.0, 1.0), STABILITY_TOL), Stability::Stable);
        assert_eq!(classify_stability(c(0.3, 0.0), STABILITY_TOL), Stability::Unstable);
        assert_eq!(classify_stability(c(3e-9, 1.0), STABILITY_TOL), Stability::Boundary);
    }
}
