//! Flux-lattice dynamics
//!
//! ```text
//! m y'' + η y' + (K0 + k cos ωt) y = (B J0 / c) cos Ωt
//! ```
//!
//! Steady states of the unmodulated and linearized problems, the
//! amplitude-modulated induced-field model, the first-order symmetric branch,
//! full numerical simulation and a demodulator for the simulated field.
//!
//! The field is taken as `E(t) = -(B/c) y'(t)`.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::oracle::{integrate, uniform_grid, LinearOde, TimeSeries};
use crate::{AnalyticSolution, ComplexScalar, DampedParams, MathieuError, Result, SolutionSample};

/// Largest `k/|K0|`, `ω/Ω` and `mΩ²/|K0|` for which the field model is in regime.
pub const REGIME_RATIO: f64 = 0.02;
/// Carrier periods spanned by the demodulation low-pass window.
pub const LOWPASS_CARRIER_PERIODS: f64 = 8.0;
/// Modulation periods required by [`modulation_analysis`].
pub const MIN_MODULATION_PERIODS: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxParams {
    pub base: DampedParams,
    /// Magnetic induction `B`.
    pub b_field: f64,
    /// Microwave current amplitude `J0`.
    pub j0: f64,
    /// Microwave angular frequency `Ω`.
    pub big_omega: f64,
    /// Light velocity `c`.
    pub c_light: f64,
}

impl FluxParams {
    pub fn new(base: DampedParams, b_field: f64, j0: f64, big_omega: f64, c_light: f64) -> Result<Self> {
        let fp = Self { base, b_field, j0, big_omega, c_light };
        fp.validate()?;
        Ok(fp)
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if !(self.big_omega > 0.0 && self.big_omega.is_finite()) {
            return Err(MathieuError::InvalidInput(format!("Omega = {} must be positive", self.big_omega)));
        }
        if !(self.c_light > 0.0 && self.c_light.is_finite()) {
            return Err(MathieuError::InvalidInput(format!("c = {} must be positive", self.c_light)));
        }
        if !(self.b_field.is_finite() && self.j0.is_finite()) {
            return Err(MathieuError::InvalidInput("B and J0 must be finite".into()));
        }
        Ok(())
    }

    /// Drive amplitude `B J0 / c`.
    pub fn drive(&self) -> f64 {
        self.b_field * self.j0 / self.c_light
    }
}

/// `amplitude · cos(frequency · t - phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinusoidalResponse {
    pub amplitude: f64,
    pub frequency: f64,
    pub phase: f64,
}

impl SinusoidalResponse {
    /// Normalizes to `amplitude ≥ 0`, `frequency ≥ 0`, `phase ∈ (-π, π]`.
    fn normalized(amplitude: f64, frequency: f64, phase: f64) -> Self {
        let (mut amplitude, mut frequency, mut phase) = (amplitude, frequency, phase);
        if frequency < 0.0 {
            frequency = -frequency;
            phase = -phase;
        }
        if amplitude < 0.0 {
            amplitude = -amplitude;
            phase += PI;
        }
        Self { amplitude, frequency, phase: wrap_phase(phase) }
    }

    pub fn eval(&self, t: f64) -> SolutionSample {
        let arg = self.frequency * t - self.phase;
        let (s, c) = arg.sin_cos();
        let w = self.frequency;
        SolutionSample {
            t,
            y: ComplexScalar::new(self.amplitude * c, 0.0),
            dy: ComplexScalar::new(-self.amplitude * w * s, 0.0),
            d2y: ComplexScalar::new(-self.amplitude * w * w * c, 0.0),
        }
    }
}

impl AnalyticSolution for SinusoidalResponse {
    fn sample(&self, t: f64) -> Result<SolutionSample> {
        Ok(self.eval(t))
    }
}

fn wrap_phase(phase: f64) -> f64 {
    let mut p = phase.rem_euclid(2.0 * PI);
    if p > PI {
        p -= 2.0 * PI;
    }
    p
}

/// Sum of sinusoids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SinusoidSum {
    pub components: Vec<SinusoidalResponse>,
}

impl AnalyticSolution for SinusoidSum {
    fn sample(&self, t: f64) -> Result<SolutionSample> {
        let zero = ComplexScalar::new(0.0, 0.0);
        Ok(self.components.iter().fold(
            SolutionSample { t, y: zero, dy: zero, d2y: zero },
            |acc, c| {
                let s = c.eval(t);
                SolutionSample { t, y: acc.y + s.y, dy: acc.dy + s.dy, d2y: acc.d2y + s.d2y }
            },
        ))
    }
}

/// `K(t) = K0 + k cos ωt`.
pub fn stiffness(params: &DampedParams, t: f64) -> f64 {
    params.k0 + params.k * (params.omega * t).cos()
}

/// Steady response of `m y'' + η y' + K0 y = F cos(w t - phase)`.
fn driven_steady_state(params: &DampedParams, force: f64, w: f64, phase: f64) -> Result<SinusoidalResponse> {
    let detune = params.k0 - params.m * w * w;
    let loss = params.eta * w;
    let den = detune.hypot(loss);
    let scale = params.k0.abs().max(params.m * w * w).max(f64::MIN_POSITIVE);
    if den <= 1e-14 * scale {
        return Err(MathieuError::Resonance(format!(
            "undamped drive at w = {w} matches sqrt(K0/m)"
        )));
    }
    Ok(SinusoidalResponse::normalized(force / den, w, phase + loss.atan2(detune)))
}

/// Steady state of `m y'' + η y' + K0 y = (B J0 / c) cos Ωt`.
pub fn particular_k0(fp: &FluxParams) -> Result<SinusoidalResponse> {
    fp.validate()?;
    driven_steady_state(&fp.base, fp.drive(), fp.big_omega, 0.0)
}

/// The equation satisfied by [`particular_k0`].
pub fn unmodulated_equation(fp: &FluxParams) -> LinearOde {
    let p = fp.base;
    let f = fp.drive() / p.m;
    let w = fp.big_omega;
    LinearOde::new(
        move |_| ComplexScalar::new(p.eta / p.m, 0.0),
        move |_| ComplexScalar::new(p.k0 / p.m, 0.0),
        move |t| ComplexScalar::new(f * (w * t).cos(), 0.0),
    )
}

/// Steady state of `m δy'' + η δy' + K0 δy = -k cos ωt · y0(t)`, with `y0` from
/// [`particular_k0`]. Components sit at `Ω + ω` and `|Ω - ω|`.
pub fn linearized_delta(fp: &FluxParams) -> Result<SinusoidSum> {
    let y0 = particular_k0(fp)?;
    let p = fp.base;
    if p.k == 0.0 {
        return Ok(SinusoidSum { components: Vec::new() });
    }
    let force = -0.5 * p.k * y0.amplitude;
    let components = [fp.big_omega + p.omega, fp.big_omega - p.omega]
        .into_iter()
        .map(|w| driven_steady_state(&p, force, w, y0.phase))
        .collect::<Result<Vec<_>>>()?;
    Ok(SinusoidSum { components })
}

/// The equation satisfied by [`linearized_delta`].
pub fn linearized_equation(fp: &FluxParams) -> Result<LinearOde> {
    let y0 = particular_k0(fp)?;
    let p = fp.base;
    Ok(LinearOde::new(
        move |_| ComplexScalar::new(p.eta / p.m, 0.0),
        move |_| ComplexScalar::new(p.k0 / p.m, 0.0),
        move |t| -(p.k / p.m) * (p.omega * t).cos() * y0.eval(t).y,
    ))
}

/// Full equation of motion in monic form.
pub fn flux_equation(fp: &FluxParams) -> LinearOde {
    let p = fp.base;
    let f = fp.drive() / p.m;
    let w = fp.big_omega;
    LinearOde::new(
        move |_| ComplexScalar::new(p.eta / p.m, 0.0),
        move |t| ComplexScalar::new(stiffness(&p, t) / p.m, 0.0),
        move |t| ComplexScalar::new(f * (w * t).cos(), 0.0),
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reasons", rename_all = "kebab-case")]
pub enum Validity {
    InRegime,
    OutOfRegime(Vec<String>),
}

impl Validity {
    pub fn in_regime(&self) -> bool {
        matches!(self, Validity::InRegime)
    }

    pub fn flags(&self) -> Vec<String> {
        match self {
            Validity::InRegime => Vec::new(),
            Validity::OutOfRegime(reasons) => reasons.clone(),
        }
    }
}

/// `E(t) = prefactor · [1 - ε cos(ωt - φ)] · sin(Ωt - α)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InducedFieldModel {
    pub epsilon: f64,
    pub phi: f64,
    pub alpha: f64,
    pub prefactor: f64,
    pub omega: f64,
    pub big_omega: f64,
    pub validity: Validity,
}

impl InducedFieldModel {
    pub fn new(fp: &FluxParams) -> Result<Self> {
        fp.validate()?;
        let p = fp.base;
        if p.k0 == 0.0 {
            return Err(MathieuError::Singularity("K0 = 0 in the induced-field model".into()));
        }
        let w = fp.big_omega;
        let mut reasons = Vec::new();
        let k0 = p.k0.abs();
        if p.k.abs() > REGIME_RATIO * k0 {
            reasons.push(format!("k/|K0| = {:e} exceeds {REGIME_RATIO}", p.k.abs() / k0));
        }
        if p.omega.abs() > REGIME_RATIO * w {
            reasons.push(format!("omega/Omega = {:e} exceeds {REGIME_RATIO}", p.omega.abs() / w));
        }
        if p.m * w * w > REGIME_RATIO * k0 {
            reasons.push(format!("m Omega^2/|K0| = {:e} exceeds {REGIME_RATIO}", p.m * w * w / k0));
        }
        Ok(Self {
            epsilon: p.k / p.k0,
            phi: (2.0 * p.eta * p.omega / p.k0).atan(),
            alpha: (p.eta * w / p.k0).atan(),
            prefactor: fp.b_field * fp.b_field * fp.j0 * w / (k0 * fp.c_light * fp.c_light),
            omega: p.omega,
            big_omega: w,
            validity: if reasons.is_empty() { Validity::InRegime } else { Validity::OutOfRegime(reasons) },
        })
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.prefactor
            * (1.0 - self.epsilon * (self.omega * t - self.phi).cos())
            * (self.big_omega * t - self.alpha).sin()
    }
}

/// Field value at `t` together with the model that produced it.
pub fn induced_field(fp: &FluxParams, t: f64) -> Result<(f64, InducedFieldModel)> {
    let model = InducedFieldModel::new(fp)?;
    Ok((model.eval(t), model))
}

/// `y(t) = y(0) + B J0 sin(Ωt) / (2 c η Ω)`, the solution of
/// `η y' = (B J0 / 2c) cos Ωt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetricSolution {
    pub y_at_0: f64,
    pub eta: f64,
    pub drive: f64,
    pub big_omega: f64,
}

impl SymmetricSolution {
    fn rate(&self) -> f64 {
        self.drive / (2.0 * self.eta * self.big_omega)
    }

    pub fn eval(&self, t: f64) -> SolutionSample {
        let w = self.big_omega;
        let (s, c) = (w * t).sin_cos();
        let r = self.rate();
        SolutionSample {
            t,
            y: ComplexScalar::new(self.y_at_0 + r * s, 0.0),
            dy: ComplexScalar::new(r * w * c, 0.0),
            d2y: ComplexScalar::new(-r * w * w * s, 0.0),
        }
    }

    /// `η y' - (B J0 / 2c) cos Ωt`.
    pub fn first_order_residual(&self, t: f64) -> f64 {
        self.eta * self.eval(t).dy.re - 0.5 * self.drive * (self.big_omega * t).cos()
    }
}

impl AnalyticSolution for SymmetricSolution {
    fn sample(&self, t: f64) -> Result<SolutionSample> {
        Ok(self.eval(t))
    }
}

pub fn symmetric_case_solution(fp: &FluxParams, y_at_0: f64) -> Result<SymmetricSolution> {
    fp.validate()?;
    if fp.base.eta == 0.0 {
        return Err(MathieuError::Singularity("eta = 0 in the first-order branch".into()));
    }
    Ok(SymmetricSolution { y_at_0, eta: fp.base.eta, drive: fp.drive(), big_omega: fp.big_omega })
}

/// Integrates the full equation and samples it every `dt`.
pub fn simulate_full(
    fp: &FluxParams,
    y0: f64,
    dy0: f64,
    span: (f64, f64),
    dt: f64,
    tol: f64,
) -> Result<TimeSeries> {
    fp.validate()?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(MathieuError::InvalidInput(format!("dt = {dt} must be positive")));
    }
    let ode = flux_equation(fp);
    let traj = integrate(&ode, ComplexScalar::new(y0, 0.0), ComplexScalar::new(dy0, 0.0), span, tol)?;
    let n = ((span.1 - span.0) / dt).round().max(1.0) as usize;
    traj.sample(&uniform_grid(span.0, span.1, n))
}

/// `E = -(B/c) y'` at each sample.
pub fn field_from_displacement(fp: &FluxParams, series: &TimeSeries) -> Vec<f64> {
    let scale = -fp.b_field / fp.c_light;
    series.values.iter().map(|s| scale * s.dy.re).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulationReport {
    /// Mean envelope `A`.
    pub carrier_amplitude: f64,
    /// `d` in `A (1 - d cos(ωt - ψ))`.
    pub modulation_depth: f64,
    /// `ψ`.
    pub modulation_phase: f64,
    /// Spectral peak of the signal.
    pub carrier_frequency: f64,
    /// Spectral peak of the envelope.
    pub modulation_frequency: f64,
    /// Bin width of the signal spectrum.
    pub carrier_resolution: f64,
    /// Bin width of the envelope spectrum.
    pub modulation_resolution: f64,
}

/// Demodulates a uniformly sampled real signal at carrier `Ω` and fits the
/// envelope `A (1 - d cos(ωt - ψ))`.
pub fn modulation_analysis(grid: &[f64], signal: &[f64], big_omega: f64, omega: f64) -> Result<ModulationReport> {
    if grid.len() != signal.len() || grid.len() < 16 {
        return Err(MathieuError::InvalidInput("grid and signal must match and hold at least 16 samples".into()));
    }
    if !(big_omega > 0.0 && omega > 0.0) {
        return Err(MathieuError::InvalidInput("frequencies must be positive".into()));
    }
    let n = grid.len();
    let dt = (grid[n - 1] - grid[0]) / (n - 1) as f64;
    if !(dt > 0.0) || grid.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-6 * dt) {
        return Err(MathieuError::InvalidInput("grid must be uniform and increasing".into()));
    }
    let window = (LOWPASS_CARRIER_PERIODS * 2.0 * PI / big_omega / dt).ceil() as usize;
    let usable = (n as f64 - window as f64) * dt;
    let needed = MIN_MODULATION_PERIODS * 2.0 * PI / omega;
    if window >= n || usable < needed {
        return Err(MathieuError::Span(format!(
            "{usable:.3} time units after low-pass, need {needed:.3} ({MIN_MODULATION_PERIODS} modulation periods)"
        )));
    }

    // Quadrature mixing followed by a centred moving average.
    let mixed: Vec<ComplexScalar> = grid
        .iter()
        .zip(signal)
        .map(|(&t, &e)| ComplexScalar::from_polar(2.0 * e, -big_omega * (t - grid[0])))
        .collect();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(ComplexScalar::new(0.0, 0.0));
    for z in &mixed {
        let last = *prefix.last().expect("non-empty");
        prefix.push(last + z);
    }
    let half = window / 2;
    let count = n - window;
    let mut env_t = Vec::with_capacity(count);
    let mut env = Vec::with_capacity(count);
    for i in 0..count {
        let avg = (prefix[i + window] - prefix[i]) / window as f64;
        env_t.push(grid[i + half]);
        env.push(avg.norm());
    }

    // Least squares on [1, cos ωt, sin ωt].
    let mut ata = [[0.0f64; 3]; 3];
    let mut atb = [0.0f64; 3];
    for (&t, &e) in env_t.iter().zip(&env) {
        let row = [1.0, (omega * t).cos(), (omega * t).sin()];
        for i in 0..3 {
            atb[i] += row[i] * e;
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    let [c0, c1, c2] = solve3(ata, atb)
        .ok_or_else(|| MathieuError::Degenerate("envelope fit is singular".into()))?;
    if !(c0 > 0.0) {
        return Err(MathieuError::Degenerate("signal has no carrier component".into()));
    }
    let x = 0.5 * omega * window as f64 * dt;
    let attenuation = if x == 0.0 { 1.0 } else { x.sin() / x };
    let depth = c1.hypot(c2) / c0 / attenuation;

    let (carrier_frequency, carrier_resolution) = spectral_peak(signal, dt);
    let (modulation_frequency, modulation_resolution) = spectral_peak(&env, dt);

    Ok(ModulationReport {
        carrier_amplitude: c0,
        modulation_depth: depth,
        modulation_phase: (-c2).atan2(-c1),
        carrier_frequency,
        modulation_frequency,
        carrier_resolution,
        modulation_resolution,
    })
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Angular frequency of the largest non-DC bin of the mean-removed signal,
/// and the bin width.
fn spectral_peak(signal: &[f64], dt: f64) -> (f64, f64) {
    let n = signal.len();
    let mean = signal.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex<f64>> = signal.iter().map(|&x| Complex::new(x - mean, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let peak = (1..=n / 2)
        .max_by(|&i, &j| buf[i].norm_sqr().total_cmp(&buf[j].norm_sqr()))
        .unwrap_or(0);
    let bin = 2.0 * PI / (n as f64 * dt);
    (peak as f64 * bin, bin)
}
