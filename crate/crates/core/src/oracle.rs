//! Independent numerical ground truth for second-order linear complex ODEs
//!
//! ```text
//! y'' + p(t) y' + q(t) y = f(t)
//! ```
//!
//! Integration uses the Dormand–Prince 5(4) pair with a PI step-size
//! controller and piecewise quintic Hermite dense output. Steps are accepted
//! only when both the local error estimate and the interpolant's residual
//! are within tolerance. The complex equation is carried as
//! a real system of dimension 4: `(Re y, Im y, Re y', Im y')`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::floquet::normal_form;
use crate::{AnalyticSolution, ComplexScalar, GeneralParams, MathieuError, Result, SolutionSample};

/// Smallest and largest tolerance accepted by [`integrate`].
pub const MIN_TOL: f64 = 1e-14;
pub const MAX_TOL: f64 = 1e-3;

const MAX_STEPS: usize = 5_000_000;
const NORMALIZATION_FLOOR: f64 = 1e-300;

/// Complex coefficient function of time.
pub type Coefficient = Arc<dyn Fn(f64) -> ComplexScalar + Send + Sync>;

/// `y'' + p(t) y' + q(t) y = f(t)`.
#[derive(Clone)]
pub struct LinearOde {
    pub p: Coefficient,
    pub q: Coefficient,
    pub f: Coefficient,
}

impl fmt::Debug for LinearOde {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LinearOde").finish_non_exhaustive()
    }
}

impl LinearOde {
    pub fn new<P, Q, F>(p: P, q: Q, f: F) -> Self
    where
        P: Fn(f64) -> ComplexScalar + Send + Sync + 'static,
        Q: Fn(f64) -> ComplexScalar + Send + Sync + 'static,
        F: Fn(f64) -> ComplexScalar + Send + Sync + 'static,
    {
        Self {
            p: Arc::new(p),
            q: Arc::new(q),
            f: Arc::new(f),
        }
    }

    pub fn homogeneous<P, Q>(p: P, q: Q) -> Self
    where
        P: Fn(f64) -> ComplexScalar + Send + Sync + 'static,
        Q: Fn(f64) -> ComplexScalar + Send + Sync + 'static,
    {
        Self::new(p, q, |_| ComplexScalar::new(0.0, 0.0))
    }

    /// Constant-coefficient homogeneous equation `y'' + p y' + q y = 0`.
    pub fn constant(p: ComplexScalar, q: ComplexScalar) -> Self {
        Self::homogeneous(move |_| p, move |_| q)
    }

    /// The general Mathieu equation `y'' + (h - 2θ cos 2t) y = 0`.
    pub fn mathieu(gp: GeneralParams) -> Self {
        Self::homogeneous(
            |_| ComplexScalar::new(0.0, 0.0),
            move |t| gp.h - gp.theta * (2.0 * (2.0 * t).cos()),
        )
    }

    /// `y''` implied by the equation at `(t, y, y')`.
    pub fn acceleration(&self, t: f64, y: ComplexScalar, dy: ComplexScalar) -> ComplexScalar {
        (self.f)(t) - (self.p)(t) * dy - (self.q)(t) * y
    }

    fn rhs(&self, t: f64, s: &State) -> State {
        let y = ComplexScalar::new(s[0], s[1]);
        let dy = ComplexScalar::new(s[2], s[3]);
        let a = self.acceleration(t, y, dy);
        [dy.re, dy.im, a.re, a.im]
    }
}

type State = [f64; 4];

fn axpy(y: &State, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..4 {
            out[i] += c * k[i];
        }
    }
    out
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// PI controller.
const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

struct StepResult {
    incr: State,
    y_new: State,
    k_new: State,
    err: f64,
}

fn dopri_step(ode: &LinearOde, t: f64, y: &State, k1: &State, h: f64, tol: f64) -> StepResult {
    let k2 = ode.rhs(t + C2 * h, &axpy(y, &[(h * A21, k1)]));
    let k3 = ode.rhs(t + C3 * h, &axpy(y, &[(h * A31, k1), (h * A32, &k2)]));
    let k4 = ode.rhs(
        t + C4 * h,
        &axpy(y, &[(h * A41, k1), (h * A42, &k2), (h * A43, &k3)]),
    );
    let k5 = ode.rhs(
        t + C5 * h,
        &axpy(y, &[(h * A51, k1), (h * A52, &k2), (h * A53, &k3), (h * A54, &k4)]),
    );
    let k6 = ode.rhs(
        t + h,
        &axpy(
            y,
            &[(h * A61, k1), (h * A62, &k2), (h * A63, &k3), (h * A64, &k4), (h * A65, &k5)],
        ),
    );
    let incr = axpy(
        &[0.0; 4],
        &[(h * A71, k1), (h * A73, &k3), (h * A74, &k4), (h * A75, &k5), (h * A76, &k6)],
    );
    let y_new = axpy(y, &[(1.0, &incr)]);
    let k7 = ode.rhs(t + h, &y_new);

    let mut sum = 0.0;
    for i in 0..4 {
        let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let sk = tol + tol * y[i].abs().max(y_new[i].abs());
        sum += (e / sk).powi(2);
    }
    StepResult {
        incr,
        y_new,
        k_new: k7,
        err: (sum / 4.0).sqrt(),
    }
}

/// Hairer's starting step heuristic.
fn initial_step(ode: &LinearOde, t0: f64, y0: &State, f0: &State, tol: f64, hmax: f64) -> f64 {
    let sk: Vec<f64> = y0.iter().map(|v| tol + tol * v.abs()).collect();
    let dnf: f64 = (0..4).map(|i| (f0[i] / sk[i]).powi(2)).sum();
    let dny: f64 = (0..4).map(|i| (y0[i] / sk[i]).powi(2)).sum();
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
        1e-6
    } else {
        (dny / dnf).sqrt() * 0.01
    };
    h = h.min(hmax);
    let y1 = axpy(y0, &[(h, f0)]);
    let f1 = ode.rhs(t0 + h, &y1);
    let der2 = (0..4)
        .map(|i| ((f1[i] - f0[i]) / sk[i]).powi(2))
        .sum::<f64>()
        .sqrt()
        / h;
    let der12 = der2.abs().max(dnf.sqrt());
    let h1 = if der12 <= 1e-15 {
        (h * 1e-3).max(1e-6)
    } else {
        (0.01 / der12).powf(1.0 / 5.0)
    };
    (100.0 * h).min(h1).min(hmax)
}

/// Dense output on one accepted step: the quintic Hermite interpolant of `y`
/// through `(y, y', y'')` at both ends. `y''` between the ends comes from
/// differentiating the interpolant, never from the equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DenseStep {
    pub t: f64,
    pub h: f64,
    poly: [ComplexScalar; 6],
}

impl DenseStep {
    /// `incr` is the step increment `y1 - y0` as accumulated by the stages; using
    /// it instead of the difference of endpoint values avoids cancellation.
    fn new(t: f64, h: f64, start: &State, k_start: &State, step: &StepResult) -> Self {
        let (incr, end, k_end) = (&step.incr, &step.y_new, &step.k_new);
        let c = |re: f64, im: f64| ComplexScalar::new(re, im);
        let p0 = c(start[0], start[1]);
        let d = c(incr[0], incr[1]);
        let m0 = c(start[2], start[3]) * h;
        let m1 = c(end[2], end[3]) * h;
        let a0 = c(k_start[2], k_start[3]) * (h * h);
        let a1 = c(k_end[2], k_end[3]) * (h * h);
        let poly = [
            p0,
            m0,
            a0 * 0.5,
            d * 10.0 - m0 * 6.0 - m1 * 4.0 - a0 * 1.5 + a1 * 0.5,
            d * -15.0 + m0 * 8.0 + m1 * 7.0 + a0 * 1.5 - a1,
            d * 6.0 - m0 * 3.0 - m1 * 3.0 - a0 * 0.5 + a1 * 0.5,
        ];
        Self { t, h, poly }
    }

    /// `(y, y', y'')` at time `t`.
    fn eval(&self, t: f64) -> [ComplexScalar; 3] {
        let s = ((t - self.t) / self.h).clamp(0.0, 1.0);
        let c = &self.poly;
        let y = c[0] + (c[1] + (c[2] + (c[3] + (c[4] + c[5] * s) * s) * s) * s) * s;
        let dy = c[1] + (c[2] * 2.0 + (c[3] * 3.0 + (c[4] * 4.0 + c[5] * (5.0 * s)) * s) * s) * s;
        let d2y = c[2] * 2.0 + (c[3] * 6.0 + (c[4] * 12.0 + c[5] * (20.0 * s)) * s) * s;
        [y, dy / self.h, d2y / (self.h * self.h)]
    }

    /// Largest relative residual of the interpolant against `ode` inside the step,
    /// together with the rounding floor below which it cannot be resolved.
    fn defect(&self, ode: &LinearOde) -> (f64, f64) {
        let size = self.poly[1..].iter().map(|c| c.norm()).sum::<f64>() / (self.h * self.h);
        let mut floor: f64 = 0.0;
        let mut worst: f64 = 0.0;
        for s in DEFECT_POINTS {
            let t = self.t + s * self.h;
            let [y, dy, d2y] = self.eval(t);
            let terms = [d2y, (ode.p)(t) * dy, (ode.q)(t) * y, -(ode.f)(t)];
            let scale = terms.iter().map(|x| x.norm()).fold(1.0, f64::max);
            worst = worst.max(terms.iter().sum::<ComplexScalar>().norm() / scale);
            floor = floor.max(64.0 * f64::EPSILON * size / scale);
        }
        (worst, floor)
    }
}

const DEFECT_POINTS: [f64; 3] = [0.2, 0.5, 0.8];

/// Integration statistics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Dense-output solution of a [`LinearOde`] over a closed span.
#[derive(Debug, Clone)]
pub struct Trajectory {
    steps: Vec<DenseStep>,
    t0: f64,
    t1: f64,
    y1: ComplexScalar,
    dy1: ComplexScalar,
    pub stats: IntegrationStats,
}

/// Samples of a solution on an increasing grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub grid: Vec<f64>,
    pub values: Vec<SolutionSample>,
}

impl TimeSeries {
    pub fn new(values: Vec<SolutionSample>) -> Result<Self> {
        let grid: Vec<f64> = values.iter().map(|s| s.t).collect();
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(MathieuError::InvalidInput("time grid must be strictly increasing".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl Trajectory {
    pub fn span(&self) -> (f64, f64) {
        (self.t0, self.t1)
    }

    pub fn steps(&self) -> &[DenseStep] {
        &self.steps
    }

    /// State `(y, y')` at the end of the span, exactly as stepped (no interpolation).
    pub fn end_state(&self) -> (ComplexScalar, ComplexScalar) {
        (self.y1, self.dy1)
    }

    /// Dense-output sample; `d2y` is the second derivative of the interpolant.
    pub fn at(&self, t: f64) -> Result<SolutionSample> {
        let span = self.t1 - self.t0;
        let slack = 1e-12 * span.abs().max(1.0);
        if !(t >= self.t0 - slack && t <= self.t1 + slack) {
            return Err(MathieuError::Domain(format!(
                "t = {t} outside integrated span [{}, {}]",
                self.t0, self.t1
            )));
        }
        let idx = self
            .steps
            .partition_point(|s| s.t + s.h <= t)
            .min(self.steps.len() - 1);
        let step = &self.steps[idx];
        let [y, dy, d2y] = step.eval(t);
        Ok(SolutionSample { t, y, dy, d2y })
    }

    pub fn sample(&self, grid: &[f64]) -> Result<TimeSeries> {
        let values = grid.iter().map(|&t| self.at(t)).collect::<Result<Vec<_>>>()?;
        TimeSeries::new(values)
    }
}

impl AnalyticSolution for Trajectory {
    fn sample(&self, t: f64) -> Result<SolutionSample> {
        self.at(t)
    }
}

fn validate_span(span: (f64, f64)) -> Result<()> {
    let (t0, t1) = span;
    if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
        return Err(MathieuError::InvalidInput(format!(
            "span must satisfy t1 > t0, got [{t0}, {t1}]"
        )));
    }
    Ok(())
}

pub fn validate_tol(tol: f64) -> Result<()> {
    if !(MIN_TOL..=MAX_TOL).contains(&tol) {
        return Err(MathieuError::InvalidInput(format!(
            "tolerance {tol:e} outside [{MIN_TOL:e}, {MAX_TOL:e}]"
        )));
    }
    Ok(())
}

/// Adaptive Dormand–Prince integration with atol = rtol = `tol`.
pub fn integrate(
    ode: &LinearOde,
    y0: ComplexScalar,
    dy0: ComplexScalar,
    span: (f64, f64),
    tol: f64,
) -> Result<Trajectory> {
    validate_span(span)?;
    validate_tol(tol)?;
    let (t0, t1) = span;
    let hmax = t1 - t0;
    let mut stats = IntegrationStats::default();

    let mut t = t0;
    let mut y: State = [y0.re, y0.im, dy0.re, dy0.im];
    let mut k1 = ode.rhs(t, &y);
    let mut h = initial_step(ode, t, &y, &k1, tol, hmax);
    stats.evaluations = 2;

    let expo1 = 0.2 - BETA * 0.75;
    let mut facold: f64 = 1e-4;
    let mut last_rejected = false;
    let mut steps = Vec::new();

    loop {
        if t + h >= t1 || (t1 - (t + h)) < 1e-14 * hmax {
            h = t1 - t;
        }
        if 0.1 * h.abs() <= t.abs().max(1.0) * f64::EPSILON || stats.accepted + stats.rejected > MAX_STEPS {
            return Err(MathieuError::Stiffness {
                t,
                y: ComplexScalar::new(y[0], y[1]),
                dy: ComplexScalar::new(y[2], y[3]),
            });
        }
        let step = dopri_step(ode, t, &y, &k1, h, tol);
        stats.evaluations += 6;
        let err = step.err;
        if !err.is_finite() {
            stats.rejected += 1;
            h *= FAC_MIN;
            last_rejected = true;
            continue;
        }
        let fac11 = err.powf(expo1);
        let fac = (fac11 / facold.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
        let dense = DenseStep::new(t, h, &y, &k1, &step);
        // The interpolant's own residual is held to `tol` as well as the local error.
        let (defect, floor) = if err <= 1.0 { dense.defect(ode) } else { (0.0, 0.0) };
        if err <= 1.0 && defect > tol && defect > floor {
            stats.rejected += 1;
            h *= (0.9 * (tol / defect).powf(0.25)).clamp(FAC_MIN, 0.9);
            last_rejected = true;
            continue;
        }
        if err <= 1.0 {
            facold = err.max(1e-4);
            steps.push(dense);
            stats.accepted += 1;
            t += h;
            y = step.y_new;
            k1 = step.k_new;
            if t >= t1 {
                break;
            }
            let mut hnew = h / fac;
            if last_rejected {
                hnew = hnew.min(h);
            }
            last_rejected = false;
            h = hnew;
        } else {
            stats.rejected += 1;
            h /= (fac11 / SAFETY).min(1.0 / FAC_MIN);
            last_rejected = true;
        }
    }

    Ok(Trajectory {
        steps,
        t0,
        t1,
        y1: ComplexScalar::new(y[0], y[1]),
        dy1: ComplexScalar::new(y[2], y[3]),
        stats,
    })
}

/// The same Runge–Kutta pair with `n_steps` equal steps and no error control.
/// Used to measure the observed order of the method.
pub fn integrate_fixed(
    ode: &LinearOde,
    y0: ComplexScalar,
    dy0: ComplexScalar,
    span: (f64, f64),
    n_steps: usize,
) -> Result<Trajectory> {
    validate_span(span)?;
    if n_steps == 0 {
        return Err(MathieuError::InvalidInput("n_steps must be positive".into()));
    }
    let (t0, t1) = span;
    let h = (t1 - t0) / n_steps as f64;
    let mut y: State = [y0.re, y0.im, dy0.re, dy0.im];
    let mut k1 = ode.rhs(t0, &y);
    let mut steps = Vec::with_capacity(n_steps);
    for j in 0..n_steps {
        let t = t0 + j as f64 * h;
        let step = dopri_step(ode, t, &y, &k1, h, 1.0);
        steps.push(DenseStep::new(t, h, &y, &k1, &step));
        y = step.y_new;
        k1 = step.k_new;
    }
    Ok(Trajectory {
        steps,
        t0,
        t1,
        y1: ComplexScalar::new(y[0], y[1]),
        dy1: ComplexScalar::new(y[2], y[3]),
        stats: IntegrationStats {
            accepted: n_steps,
            rejected: 0,
            evaluations: 1 + 6 * n_steps,
        },
    })
}

/// Outcome of a residual or identity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    ReportOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// Largest relative residual.
    pub linf: f64,
    /// Root-mean-square relative residual.
    pub l2: f64,
    /// Scale the raw residuals were divided by.
    pub normalization: f64,
    /// Relative residual at each grid point.
    pub per_point: Option<Vec<f64>>,
    pub verdict: Verdict,
}

impl ResidualReport {
    fn from_raw(raw: &[f64], normalization: f64) -> Self {
        let norm = normalization.max(NORMALIZATION_FLOOR);
        let per_point: Vec<f64> = raw.iter().map(|r| r / norm).collect();
        let linf = per_point.iter().cloned().fold(0.0, f64::max);
        let l2 = if per_point.is_empty() {
            0.0
        } else {
            (per_point.iter().map(|r| r * r).sum::<f64>() / per_point.len() as f64).sqrt()
        };
        Self {
            linf,
            l2,
            normalization: norm,
            per_point: Some(per_point),
            verdict: Verdict::ReportOnly,
        }
    }

    /// Sets the verdict to pass when `linf < threshold`, fail otherwise.
    pub fn judged(mut self, threshold: f64) -> Self {
        self.verdict = if self.linf < threshold {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        self
    }

    pub fn without_points(mut self) -> Self {
        self.per_point = None;
        self
    }
}

/// Pointwise residual `y'' + p y' + q y - f` relative to
/// `max(1, max_t |each term|)`.
pub fn residual<S: AnalyticSolution + ?Sized>(
    ode: &LinearOde,
    candidate: &S,
    grid: &[f64],
) -> Result<ResidualReport> {
    let samples = grid
        .iter()
        .map(|&t| candidate.sample(t))
        .collect::<Result<Vec<_>>>()?;
    Ok(residual_of_samples(ode, &samples))
}

pub fn residual_of_samples(ode: &LinearOde, samples: &[SolutionSample]) -> ResidualReport {
    let mut scale: f64 = 1.0;
    let mut raw = Vec::with_capacity(samples.len());
    for s in samples {
        let terms = [
            s.d2y,
            (ode.p)(s.t) * s.dy,
            (ode.q)(s.t) * s.y,
            -(ode.f)(s.t),
        ];
        for term in &terms {
            scale = scale.max(term.norm());
        }
        raw.push(terms.iter().sum::<ComplexScalar>().norm());
    }
    ResidualReport::from_raw(&raw, scale)
}

/// Monodromy data of `y'' + (h - 2θ cos 2t) y = 0` over one period `π`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonodromyResult {
    /// Characteristic exponent in normal form.
    pub mu: ComplexScalar,
    /// `[[y1(π), y2(π)], [y1'(π), y2'(π)]]` for `y1 = (1, 0)`, `y2 = (0, 1)` at `t = 0`.
    pub matrix: [[ComplexScalar; 2]; 2],
    pub trace: ComplexScalar,
    pub det: ComplexScalar,
    pub multipliers: [ComplexScalar; 2],
    /// The dominant multiplier lies on the negative real axis, where `ln ρ` switches branch.
    pub branch_ambiguous: bool,
}

/// Tolerance used for monodromy integrations.
pub const MONODROMY_TOL: f64 = 1e-13;

pub fn monodromy_exponent(gp: GeneralParams) -> Result<MonodromyResult> {
    monodromy_exponent_with_tol(gp, MONODROMY_TOL)
}

pub fn monodromy_exponent_with_tol(gp: GeneralParams, tol: f64) -> Result<MonodromyResult> {
    let ode = LinearOde::mathieu(gp);
    let one = ComplexScalar::new(1.0, 0.0);
    let zero = ComplexScalar::new(0.0, 0.0);
    let a = integrate(&ode, one, zero, (0.0, PI), tol)?.end_state();
    let b = integrate(&ode, zero, one, (0.0, PI), tol)?.end_state();
    let matrix = [[a.0, b.0], [a.1, b.1]];
    let trace = a.0 + b.1;
    let det = a.0 * b.1 - a.1 * b.0;

    // Liouville: det M = 1 exactly for this equation.
    let disc = (trace * trace - 4.0).sqrt();
    let mut r1 = (trace + disc) * 0.5;
    let mut r2 = (trace - disc) * 0.5;
    if r2.norm() > r1.norm() {
        std::mem::swap(&mut r1, &mut r2);
    }
    if r1.norm() == 0.0 {
        return Err(MathieuError::Degenerate("zero Floquet multiplier".into()));
    }
    let branch_ambiguous = r1.re < 0.0 && r1.im.abs() <= 1e-6 * r1.norm();
    let mu = normal_form(r1.ln() / PI);
    Ok(MonodromyResult {
        mu,
        matrix,
        trace,
        det,
        multipliers: [r1, r2],
        branch_ambiguous,
    })
}

/// Abel-identity check for a pair of solutions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbelReport {
    pub report: ResidualReport,
    /// Wronskian at the first grid point.
    pub w0: ComplexScalar,
    /// The pair is numerically linearly dependent at the first grid point.
    pub dependent: bool,
}

const GAUSS5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GAUSS5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

fn integrate_coefficient(p: &Coefficient, a: f64, b: f64) -> ComplexScalar {
    const PANELS: usize = 8;
    let width = (b - a) / PANELS as f64;
    let mut sum = ComplexScalar::new(0.0, 0.0);
    for k in 0..PANELS {
        let mid = a + (k as f64 + 0.5) * width;
        for (x, w) in GAUSS5_NODES.iter().zip(GAUSS5_WEIGHTS) {
            sum += p(mid + 0.5 * width * x) * w;
        }
    }
    sum * (0.5 * width)
}

/// `W(t) = y1 y2' - y1' y2` against `W(t0) exp(-∫ p)`, relative to `|W(t0) exp(-∫p)|` pointwise.
pub fn wronskian_abel<A, B>(pair: (&A, &B), ode: &LinearOde, grid: &[f64]) -> Result<AbelReport>
where
    A: AnalyticSolution + ?Sized,
    B: AnalyticSolution + ?Sized,
{
    if grid.is_empty() {
        return Err(MathieuError::InvalidInput("empty grid".into()));
    }
    let mut raw = Vec::with_capacity(grid.len());
    let mut w0 = ComplexScalar::new(0.0, 0.0);
    let mut dependent = false;
    let mut integral = ComplexScalar::new(0.0, 0.0);
    for (i, &t) in grid.iter().enumerate() {
        let a = pair.0.sample(t)?;
        let b = pair.1.sample(t)?;
        let w = a.y * b.dy - a.dy * b.y;
        if i == 0 {
            w0 = w;
            let scale = (a.y * b.dy).norm() + (a.dy * b.y).norm();
            dependent = w.norm() <= 1e-12 * scale.max(NORMALIZATION_FLOOR);
        } else {
            integral += integrate_coefficient(&ode.p, grid[i - 1], t);
        }
        let expected = w0 * (-integral).exp();
        let denom = expected.norm().max(NORMALIZATION_FLOOR);
        raw.push((w - expected).norm() / denom);
    }
    let mut report = ResidualReport::from_raw(&raw, 1.0);
    report.normalization = w0.norm().max(NORMALIZATION_FLOOR);
    if dependent {
        report.verdict = Verdict::Fail;
    }
    Ok(AbelReport {
        report,
        w0,
        dependent,
    })
}

/// `n + 1` evenly spaced points covering `[t0, t1]`.
pub fn uniform_grid(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    (0..=n)
        .map(|i| if i == n { t1 } else { t0 + (t1 - t0) * i as f64 / n as f64 })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> ComplexScalar {
        ComplexScalar::new(re, im)
    }

    fn harmonic() -> LinearOde {
        LinearOde::constant(c(0.0, 0.0), c(1.0, 0.0))
    }

    #[test]
    fn cosine_reaches_minus_one_at_pi() {
        let tr = integrate(&harmonic(), c(1.0, 0.0), c(0.0, 0.0), (0.0, PI), 1e-11).unwrap();
        let (y, dy) = tr.end_state();
        assert!((y - c(-1.0, 0.0)).norm() < 1e-9, "{y}");
        assert!(dy.norm() < 1e-9);
    }

    #[test]
    fn energy_is_conserved_over_a_period() {
        let tr = integrate(&harmonic(), c(0.3, 0.0), c(0.7, 0.0), (0.0, 2.0 * PI), 1e-11).unwrap();
        let e0 = 0.3f64.powi(2) + 0.7f64.powi(2);
        for t in uniform_grid(0.0, 2.0 * PI, 50) {
            let s = tr.at(t).unwrap();
            assert!((s.y.norm_sqr() + s.dy.norm_sqr() - e0).abs() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn complex_coefficients_are_carried() {
        // y'' = -i y has y = exp(λt) with λ² = -i.
        let lam = c(0.0, -1.0).sqrt();
        let ode = LinearOde::constant(c(0.0, 0.0), c(0.0, 1.0));
        let tr = integrate(&ode, c(1.0, 0.0), lam, (0.0, 3.0), 1e-12).unwrap();
        let exact = (lam * 3.0).exp();
        assert!((tr.end_state().0 - exact).norm() / exact.norm() < 1e-10);
    }

    #[test]
    fn rejects_bad_tolerance_and_span() {
        let ode = harmonic();
        assert!(integrate(&ode, c(1.0, 0.0), c(0.0, 0.0), (0.0, 1.0), 1e-2).is_err());
        assert!(integrate(&ode, c(1.0, 0.0), c(0.0, 0.0), (0.0, 1.0), 1e-16).is_err());
        assert!(integrate(&ode, c(1.0, 0.0), c(0.0, 0.0), (1.0, 1.0), 1e-8).is_err());
    }

    #[test]
    fn exact_solution_has_tiny_residual() {
        let cosine = |t: f64| -> Result<SolutionSample> {
            Ok(SolutionSample {
                t,
                y: c(t.cos(), 0.0),
                dy: c(-t.sin(), 0.0),
                d2y: c(-t.cos(), 0.0),
            })
        };
        let r = residual(&harmonic(), &cosine, &uniform_grid(0.0, 10.0, 200)).unwrap();
        assert!(r.linf < 1e-12);
        assert_eq!(r.verdict, Verdict::ReportOnly);
        assert_eq!(r.clone().judged(1e-10).verdict, Verdict::Pass);
    }

    #[test]
    fn dense_output_is_consistent_with_ode() {
        let ode = LinearOde::mathieu(GeneralParams::real(1.0, 0.5));
        let tol = 1e-10;
        let tr = integrate(&ode, c(1.0, 0.0), c(0.0, 0.0), (0.0, 4.0 * PI), tol).unwrap();
        let r = residual(&ode, &tr, &uniform_grid(0.0, 4.0 * PI, 997)).unwrap();
        assert!(r.linf < 10.0 * tol, "{}", r.linf);
    }

    #[test]
    fn sample_outside_span_is_a_domain_error() {
        let tr = integrate(&harmonic(), c(1.0, 0.0), c(0.0, 0.0), (0.0, 1.0), 1e-8).unwrap();
        assert!(matches!(tr.at(1.5), Err(MathieuError::Domain(_))));
    }

    #[test]
    fn monodromy_of_harmonic_and_inverted_oscillator() {
        let m = monodromy_exponent(GeneralParams::real(1.0, 0.0)).unwrap();
        assert!((m.mu - c(0.0, 1.0)).norm() < 1e-6, "{}", m.mu);
        assert!(m.branch_ambiguous);
        assert!((m.det - 1.0).norm() < 1e-9);

        let m = monodromy_exponent(GeneralParams::real(-1.0, 0.0)).unwrap();
        assert!((m.mu - c(1.0, 0.0)).norm() < 1e-9, "{}", m.mu);
        assert!(!m.branch_ambiguous);
    }

    #[test]
    fn abel_for_cos_sin_and_dependent_pair() {
        let cosine = |t: f64| -> Result<SolutionSample> {
            Ok(SolutionSample { t, y: c(t.cos(), 0.0), dy: c(-t.sin(), 0.0), d2y: c(-t.cos(), 0.0) })
        };
        let sine = |t: f64| -> Result<SolutionSample> {
            Ok(SolutionSample { t, y: c(t.sin(), 0.0), dy: c(t.cos(), 0.0), d2y: c(-t.sin(), 0.0) })
        };
        let grid = uniform_grid(0.0, 10.0, 100);
        let r = wronskian_abel((&cosine, &sine), &harmonic(), &grid).unwrap();
        assert!(!r.dependent);
        assert!((r.w0 - c(1.0, 0.0)).norm() < 1e-15);
        assert!(r.report.linf < 1e-14);

        let r = wronskian_abel((&cosine, &cosine), &harmonic(), &grid).unwrap();
        assert!(r.dependent);
        assert_eq!(r.report.verdict, Verdict::Fail);
    }

    #[test]
    fn abel_with_damping() {
        // y'' + 2γ y' + (γ² + 1) y = 0 has e^{-γt} cos t and e^{-γt} sin t.
        let g = 0.3;
        let ode = LinearOde::constant(c(2.0 * g, 0.0), c(g * g + 1.0, 0.0));
        let y1 = move |t: f64| -> Result<SolutionSample> {
            let e = (-g * t).exp();
            let (s, co) = t.sin_cos();
            Ok(SolutionSample {
                t,
                y: c(e * co, 0.0),
                dy: c(e * (-g * co - s), 0.0),
                d2y: c(e * ((g * g - 1.0) * co + 2.0 * g * s), 0.0),
            })
        };
        let y2 = move |t: f64| -> Result<SolutionSample> {
            let e = (-g * t).exp();
            let (s, co) = t.sin_cos();
            Ok(SolutionSample {
                t,
                y: c(e * s, 0.0),
                dy: c(e * (co - g * s), 0.0),
                d2y: c(e * ((g * g - 1.0) * s - 2.0 * g * co), 0.0),
            })
        };
        let r = wronskian_abel((&y1, &y2), &ode, &uniform_grid(0.0, 10.0, 40)).unwrap();
        assert!(r.report.linf < 1e-12, "{}", r.report.linf);
    }
}
