use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{MathieuError, Result};

/// Complex value used for solutions, exponents and Bessel arguments.
pub type ComplexScalar = Complex64;

/// A solution value with its first two time derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolutionSample {
    pub t: f64,
    pub y: ComplexScalar,
    pub dy: ComplexScalar,
    pub d2y: ComplexScalar,
}

/// Anything that can report `y`, `y'` and `y''` at a time `t` without finite differencing.
pub trait AnalyticSolution {
    fn sample(&self, t: f64) -> Result<SolutionSample>;
}

impl<F> AnalyticSolution for F
where
    F: Fn(f64) -> Result<SolutionSample>,
{
    fn sample(&self, t: f64) -> Result<SolutionSample> {
        self(t)
    }
}

/// Physical coefficients of `m y'' + η y' + (K0 + k cos ωt) y = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DampedParams {
    pub m: f64,
    pub eta: f64,
    pub k0: f64,
    pub k: f64,
    pub omega: f64,
}

impl DampedParams {
    pub fn new(m: f64, eta: f64, k0: f64, k: f64, omega: f64) -> Result<Self> {
        let p = Self { m, eta, k0, k, omega };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [self.m, self.eta, self.k0, self.k, self.omega];
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(MathieuError::InvalidInput(format!(
                "damped parameters must be finite: {self:?}"
            )));
        }
        if self.m <= 0.0 {
            return Err(MathieuError::InvalidInput(format!("m must be > 0, got {}", self.m)));
        }
        if self.eta < 0.0 {
            return Err(MathieuError::InvalidInput(format!("eta must be >= 0, got {}", self.eta)));
        }
        if self.omega == 0.0 {
            return Err(MathieuError::InvalidInput("omega must be nonzero".into()));
        }
        Ok(())
    }

    /// Damping per unit mass, `η/m`.
    pub fn damping_rate(&self) -> f64 {
        self.eta / self.m
    }

    /// Static stiffness per unit mass, `K0/m`.
    pub fn stiffness_rate(&self) -> f64 {
        self.k0 / self.m
    }

    /// Modulation amplitude per unit mass, `k/m`.
    pub fn modulation_rate(&self) -> f64 {
        self.k / self.m
    }

    /// Exponential rate `iω` of the first split equation.
    pub fn lambda(&self) -> ComplexScalar {
        ComplexScalar::new(0.0, self.omega)
    }

    /// Exponential rate `-iω` of the second split equation.
    pub fn lambda_conj(&self) -> ComplexScalar {
        ComplexScalar::new(0.0, -self.omega)
    }
}

/// Coefficients of `y'' + (h - 2θ cos 2t) y = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralParams {
    pub h: ComplexScalar,
    pub theta: ComplexScalar,
}

impl GeneralParams {
    pub fn real(h: f64, theta: f64) -> Self {
        Self {
            h: ComplexScalar::new(h, 0.0),
            theta: ComplexScalar::new(theta, 0.0),
        }
    }

    pub fn new(h: ComplexScalar, theta: ComplexScalar) -> Result<Self> {
        let gp = Self { h, theta };
        if !(h.is_finite() && theta.is_finite()) {
            return Err(MathieuError::InvalidInput(format!("h and theta must be finite: {gp:?}")));
        }
        Ok(gp)
    }
}
