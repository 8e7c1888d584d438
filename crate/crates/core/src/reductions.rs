//! Changes of variable that bring several ODE families to the Mathieu form
//! `Y'' + (h - 2θ cos 2z) Y = 0`, and the pull-back of solutions to the
//! original variable.
//!
//! | family     | source equation                                  | map                 |
//! |------------|--------------------------------------------------|---------------------|
//! | `Eq11`     | `(1 - t²) y'' - t y' + (2a t² + b) y = 0`        | `t = cos z`         |
//! | `Eq13`     | `2t(t - 1) y'' + (2t - 1) y' + (a t + b) y = 0`  | `t = cos² z`        |
//! | `Eq15`     | `y'' + (a sin λt + b) y = 0`                     | `λt = 2z + π/2`     |
//! | `Eq17Sin`  | `y'' + (a sin² t + b) y = 0`                     | identity            |
//! | `Eq17Cos`  | `y'' + (a cos² t + b) y = 0`                     | identity            |
//! | `Damped`   | `m y'' + η y' + (K0 + k cos ωt) y = 0`           | `ωt = 2τ`, `y = e^{-ηt/2m} w` |

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::closed_form::damped_mathieu;
use crate::oracle::LinearOde;
use crate::{ComplexScalar, DampedParams, GeneralParams, MathieuError, Result, SolutionSample};

/// Fraction of the map's domain excluded at each singular end.
pub const INTERIOR_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionFamily {
    Eq11,
    Eq13,
    Eq15,
    Eq17Sin,
    Eq17Cos,
    Damped,
}

impl ReductionFamily {
    pub const ALL: [ReductionFamily; 6] = [
        ReductionFamily::Eq11,
        ReductionFamily::Eq13,
        ReductionFamily::Eq15,
        ReductionFamily::Eq17Sin,
        ReductionFamily::Eq17Cos,
        ReductionFamily::Damped,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ReductionFamily::Eq11 => "eq11",
            ReductionFamily::Eq13 => "eq13",
            ReductionFamily::Eq15 => "eq15",
            ReductionFamily::Eq17Sin => "eq17-sin",
            ReductionFamily::Eq17Cos => "eq17-cos",
            ReductionFamily::Damped => "damped",
        }
    }
}

impl fmt::Display for ReductionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ReductionFamily {
    type Err = MathieuError;

    fn from_str(s: &str) -> Result<Self> {
        ReductionFamily::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| MathieuError::InvalidInput(format!("unknown family '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionInput {
    pub family: ReductionFamily,
    pub a: f64,
    pub b: f64,
    /// Only used by `Eq15`.
    pub lambda: f64,
    /// Present exactly when `family` is `Damped`.
    pub params: Option<DampedParams>,
}

impl ReductionInput {
    pub fn family(family: ReductionFamily, a: f64, b: f64) -> Self {
        Self { family, a, b, lambda: 1.0, params: None }
    }

    pub fn eq15(a: f64, b: f64, lambda: f64) -> Self {
        Self { family: ReductionFamily::Eq15, a, b, lambda, params: None }
    }

    pub fn damped(params: DampedParams) -> Self {
        Self { family: ReductionFamily::Damped, a: 0.0, b: 0.0, lambda: 1.0, params: Some(params) }
    }
}

/// Relation between the original variable `t` and the Mathieu variable `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum VariableMap {
    /// `t = cos z`, `z ∈ [0, π]`.
    Cosine,
    /// `t = cos² z`, `z ∈ [0, π/2]`.
    CosineSquared,
    /// `λt = 2z + π/2`.
    Affine { lambda: f64 },
    /// `t = z`.
    Identity,
    /// `ωt = 2τ`.
    TimeRescale { omega: f64 },
}

impl VariableMap {
    pub fn description(&self) -> &'static str {
        match self {
            VariableMap::Cosine => "t = cos z",
            VariableMap::CosineSquared => "t = cos^2 z",
            VariableMap::Affine { .. } => "lambda t = 2z + pi/2",
            VariableMap::Identity => "t = z",
            VariableMap::TimeRescale { .. } => "omega t = 2 tau",
        }
    }

    /// Interval of `z` on which the map is one-to-one, when bounded.
    pub fn domain(&self) -> Option<(f64, f64)> {
        match self {
            VariableMap::Cosine => Some((0.0, PI)),
            VariableMap::CosineSquared => Some((0.0, FRAC_PI_2)),
            _ => None,
        }
    }

    /// `domain()` shrunk by [`INTERIOR_MARGIN`] at both ends.
    pub fn interior(&self) -> Option<(f64, f64)> {
        self.domain().map(|(lo, hi)| {
            let pad = INTERIOR_MARGIN * (hi - lo);
            (lo + pad, hi - pad)
        })
    }

    fn check_domain(&self, z: f64) -> Result<()> {
        if let Some((lo, hi)) = self.domain() {
            let slack = 1e-12 * (hi - lo);
            if !(z >= lo - slack && z <= hi + slack) {
                return Err(MathieuError::Domain(format!(
                    "z = {z} outside [{lo}, {hi}] for {}",
                    self.description()
                )));
            }
        }
        Ok(())
    }

    /// `(t, dt/dz, d²t/dz²)` at `z`.
    pub fn forward(&self, z: f64) -> Result<(f64, f64, f64)> {
        self.check_domain(z)?;
        Ok(match *self {
            VariableMap::Cosine => (z.cos(), -z.sin(), -z.cos()),
            VariableMap::CosineSquared => {
                let c = z.cos();
                (c * c, -(2.0 * z).sin(), -2.0 * (2.0 * z).cos())
            }
            VariableMap::Affine { lambda } => ((2.0 * z + FRAC_PI_2) / lambda, 2.0 / lambda, 0.0),
            VariableMap::Identity => (z, 1.0, 0.0),
            VariableMap::TimeRescale { omega } => (2.0 * z / omega, 2.0 / omega, 0.0),
        })
    }

    /// `z` for a given `t`.
    pub fn inverse(&self, t: f64) -> Result<f64> {
        let out_of_range = || {
            MathieuError::Domain(format!("t = {t} outside the range of {}", self.description()))
        };
        match *self {
            VariableMap::Cosine => {
                if !(-1.0..=1.0).contains(&t) {
                    return Err(out_of_range());
                }
                Ok(t.acos())
            }
            VariableMap::CosineSquared => {
                if !(0.0..=1.0).contains(&t) {
                    return Err(out_of_range());
                }
                Ok(t.sqrt().acos())
            }
            VariableMap::Affine { lambda } => Ok((lambda * t - FRAC_PI_2) / 2.0),
            VariableMap::Identity => Ok(t),
            VariableMap::TimeRescale { omega } => Ok(omega * t / 2.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionResult {
    pub family: ReductionFamily,
    pub gp: GeneralParams,
    pub variable_map: VariableMap,
    /// `η/2m` for the damped family, 0 otherwise.
    pub prefactor_rate: f64,
    /// `dt/dz` when the map is affine.
    pub time_scale: Option<f64>,
}

/// `h = (4/ω²)(K0/m - η²/4m²)`, `θ = -2k/(mω²)`, `ωt = 2τ`, `y = e^{-ηt/2m} w(τ)`.
pub fn damped_to_general(params: &DampedParams) -> Result<ReductionResult> {
    params.validate()?;
    let w2 = params.omega * params.omega;
    let decay = params.eta / (2.0 * params.m);
    let h = 4.0 / w2 * (params.k0 / params.m - decay * decay);
    let theta = -2.0 * params.k / (params.m * w2);
    Ok(ReductionResult {
        family: ReductionFamily::Damped,
        gp: GeneralParams::real(h, theta),
        variable_map: VariableMap::TimeRescale { omega: params.omega },
        prefactor_rate: decay,
        time_scale: Some(2.0 / params.omega),
    })
}

pub fn reduce(input: &ReductionInput) -> Result<ReductionResult> {
    let (a, b) = (input.a, input.b);
    if input.family != ReductionFamily::Damped && !(a.is_finite() && b.is_finite()) {
        return Err(MathieuError::InvalidInput(format!("a = {a}, b = {b} must be finite")));
    }
    let plain = |h: f64, theta: f64, map: VariableMap, scale: Option<f64>| ReductionResult {
        family: input.family,
        gp: GeneralParams::real(h, theta),
        variable_map: map,
        prefactor_rate: 0.0,
        time_scale: scale,
    };
    match input.family {
        ReductionFamily::Eq11 => Ok(plain(a + b, -a / 2.0, VariableMap::Cosine, None)),
        ReductionFamily::Eq13 => Ok(plain(-(a + 2.0 * b), a / 2.0, VariableMap::CosineSquared, None)),
        ReductionFamily::Eq15 => {
            let l = input.lambda;
            if l == 0.0 || !l.is_finite() {
                return Err(MathieuError::InvalidInput("lambda must be finite and nonzero".into()));
            }
            let l2 = l * l;
            Ok(plain(4.0 * b / l2, -2.0 * a / l2, VariableMap::Affine { lambda: l }, Some(2.0 / l)))
        }
        ReductionFamily::Eq17Sin => Ok(plain(b + a / 2.0, a / 4.0, VariableMap::Identity, Some(1.0))),
        ReductionFamily::Eq17Cos => Ok(plain(b + a / 2.0, -a / 4.0, VariableMap::Identity, Some(1.0))),
        ReductionFamily::Damped => {
            let params = input.params.ok_or_else(|| {
                MathieuError::InvalidInput("the damped family needs physical parameters".into())
            })?;
            damped_to_general(&params)
        }
    }
}

/// The source equation in monic form.
pub fn source_ode(input: &ReductionInput) -> Result<LinearOde> {
    let (a, b) = (input.a, input.b);
    fn c(x: f64) -> ComplexScalar {
        ComplexScalar::new(x, 0.0)
    }
    Ok(match input.family {
        ReductionFamily::Eq11 => LinearOde::homogeneous(
            move |t| c(-t / (1.0 - t * t)),
            move |t| c((2.0 * a * t * t + b) / (1.0 - t * t)),
        ),
        ReductionFamily::Eq13 => LinearOde::homogeneous(
            move |t| c((2.0 * t - 1.0) / (2.0 * t * (t - 1.0))),
            move |t| c((a * t + b) / (2.0 * t * (t - 1.0))),
        ),
        ReductionFamily::Eq15 => {
            let l = input.lambda;
            LinearOde::homogeneous(|_| c(0.0), move |t| c(a * (l * t).sin() + b))
        }
        ReductionFamily::Eq17Sin => {
            LinearOde::homogeneous(|_| c(0.0), move |t| c(a * t.sin().powi(2) + b))
        }
        ReductionFamily::Eq17Cos => {
            LinearOde::homogeneous(|_| c(0.0), move |t| c(a * t.cos().powi(2) + b))
        }
        ReductionFamily::Damped => {
            let params = input.params.ok_or_else(|| {
                MathieuError::InvalidInput("the damped family needs physical parameters".into())
            })?;
            damped_mathieu(&params)
        }
    })
}

/// A solution sample expressed in the original variable. Derivatives are
/// `None` where the map derivative `dt/dz` vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulledSample {
    pub t: f64,
    pub y: ComplexScalar,
    pub dy: Option<ComplexScalar>,
    pub d2y: Option<ComplexScalar>,
    pub singular: bool,
}

impl PulledSample {
    pub fn to_solution_sample(&self) -> Option<SolutionSample> {
        Some(SolutionSample {
            t: self.t,
            y: self.y,
            dy: self.dy?,
            d2y: self.d2y?,
        })
    }
}

/// Maps samples of a Mathieu solution `Y(z)` back to the source variable.
pub fn pullback(result: &ReductionResult, z_solution: &[SolutionSample]) -> Result<Vec<PulledSample>> {
    z_solution
        .iter()
        .map(|s| {
            let (t, dt, d2t) = result.variable_map.forward(s.t)?;
            if dt.abs() <= 1e-12 {
                return Ok(PulledSample { t, y: s.y, dy: None, d2y: None, singular: true });
            }
            let dy = s.dy / dt;
            let d2y = (s.d2y - dy * d2t) / (dt * dt);
            let (y, dy, d2y) = if result.prefactor_rate != 0.0 {
                let d = result.prefactor_rate;
                let e = (-d * t).exp();
                (s.y * e, (dy - s.y * d) * e, (d2y - dy * (2.0 * d) + s.y * (d * d)) * e)
            } else {
                (s.y, dy, d2y)
            };
            Ok(PulledSample { t, y, dy: Some(dy), d2y: Some(d2y), singular: false })
        })
        .collect()
}
