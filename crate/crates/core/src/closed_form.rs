//! Bessel-function solutions of the exponentially modulated equation
//!
//! ```text
//! y'' + a y' + b y + c exp(iωt) y = 0,    a = η/m, b = K0/m, c = k/m
//! ```
//!
//! in the form `y = exp(-ηt/2m) [c1 J_ν(z(t)) + c2 Y_ν(z(t))]` with
//! `z(t) = z0 exp(iωt/2)`.
//!
//! Two parameterizations are provided. [`Variant::PaperLiteral`] puts `K0/m`
//! in the argument and `k/m` in the index; [`Variant::Corrected`] swaps them,
//! which is what substituting the ansatz into the equation requires. The
//! residual report produced by [`adjudicate`] shows which one holds.
//!
//! As `t` grows the argument winds around the origin, so `Y_ν` is continued
//! analytically across its branch cut rather than evaluated on the principal
//! sheet.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bessel::{bessel_j, bessel_jy, BesselValue};
use crate::oracle::{residual, LinearOde, ResidualReport};
use crate::{ComplexScalar, DampedParams, GeneralParams, MathieuError, Result, SolutionSample};

/// Default absolute tolerance on `|ν - round ν|`.
pub const ADMISSIBILITY_TOL: f64 = 1e-9;
/// Relative L∞ residual below which a variant passes adjudication.
pub const PASS_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    PaperLiteral,
    Corrected,
}

impl Variant {
    pub const ALL: [Variant; 2] = [Variant::PaperLiteral, Variant::Corrected];

    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::PaperLiteral => "paper-literal",
            Variant::Corrected => "corrected",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = MathieuError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper-literal" => Ok(Variant::PaperLiteral),
            "corrected" => Ok(Variant::Corrected),
            other => Err(MathieuError::InvalidInput(format!(
                "unknown variant '{other}' (expected paper-literal or corrected)"
            ))),
        }
    }
}

fn csqrt(x: f64) -> ComplexScalar {
    ComplexScalar::new(x, 0.0).sqrt()
}

/// Index `ν` (principal square root).
///
/// Paper-literal: `√(a² - 4k/m) / (iω)`; corrected: `√(a² - 4K0/m) / (iω)`.
pub fn index(params: &DampedParams, variant: Variant) -> ComplexScalar {
    let a = params.damping_rate();
    let inner = match variant {
        Variant::PaperLiteral => params.modulation_rate(),
        Variant::Corrected => params.stiffness_rate(),
    };
    csqrt(a * a - 4.0 * inner) / params.lambda()
}

/// Nearest integer to `ν` when `ν` is within `tol` of it, or when the defect
/// in `ν²` is within the rounding error of computing `ν²` from the inputs.
/// The second test matters near `ν = 0`, where the square root turns an
/// input rounding of `ε` into an index error of `√ε`.
///
/// The paper-literal index is taken in its real form `√(4k/m - a²) / ω`.
pub fn is_admissible(params: &DampedParams, variant: Variant, tol: f64) -> Option<i64> {
    let a = params.damping_rate();
    let w2 = params.omega * params.omega;
    // ν² and the magnitude of the terms it is computed from.
    let (nu_sq, size) = match variant {
        Variant::PaperLiteral => {
            let s = 4.0 * params.modulation_rate();
            ((s - a * a) / w2, (s.abs() + a * a) / w2)
        }
        Variant::Corrected => {
            let s = 4.0 * params.stiffness_rate();
            ((s - a * a) / w2, (s.abs() + a * a) / w2)
        }
    };
    let nu = csqrt(nu_sq);
    let nearest = nu.re.round();
    let within_tol = (nu.re - nearest).abs() <= tol && nu.im.abs() <= tol;
    let within_rounding = (nu_sq - nearest * nearest).abs() <= 64.0 * f64::EPSILON * size.max(1.0);
    if within_tol || within_rounding {
        Some(nearest as i64)
    } else {
        None
    }
}

/// `z0 = 2√s / (iω)` where `s = K0/m` (paper-literal) or `k/m` (corrected).
pub fn argument_scale(params: &DampedParams, variant: Variant) -> ComplexScalar {
    let s = match variant {
        Variant::PaperLiteral => params.stiffness_rate(),
        Variant::Corrected => params.modulation_rate(),
    };
    csqrt(s) * 2.0 / params.lambda()
}

/// `z(t) = z0 exp(iωt/2)` on the principal sheet.
pub fn bessel_argument(params: &DampedParams, variant: Variant, t: f64) -> ComplexScalar {
    argument_scale(params, variant) * ComplexScalar::from_polar(1.0, 0.5 * params.omega * t)
}

/// One member of the closed-form family, ready to evaluate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormSpec {
    pub variant: Variant,
    pub params: DampedParams,
    /// Index as computed (principal branch).
    pub nu: ComplexScalar,
    /// Integer index when `ν` passed the admissibility test.
    pub admissible_nu: Option<i64>,
    /// Integer order actually evaluated.
    pub order: i64,
    /// Evaluation was forced for an inadmissible index.
    pub overridden: bool,
    pub c1: ComplexScalar,
    pub c2: ComplexScalar,
    /// `η/2m`.
    pub decay_rate: f64,
    /// `z0` in `z(t) = z0 exp(iωt/2)`.
    pub argument_scale: ComplexScalar,
    /// `iω/2`.
    pub exponent_rate: ComplexScalar,
    /// Constants of the conjugate (`-iω`) equation implied by `c1`, `c2` and the
    /// parity of `ν`: `(-1)^ν c1`, `(-1)^ν c2`.
    pub partner_c1: ComplexScalar,
    pub partner_c2: ComplexScalar,
    /// Square-root branch used for `ν` and `z0`.
    pub branch: String,
}

impl ClosedFormSpec {
    fn build(
        params: &DampedParams,
        variant: Variant,
        c1: ComplexScalar,
        c2: ComplexScalar,
        tol: f64,
        allow_override: bool,
    ) -> Result<Self> {
        params.validate()?;
        let nu = index(params, variant);
        let admissible_nu = is_admissible(params, variant, tol);
        let (order, overridden) = match admissible_nu {
            Some(n) => (n, false),
            None if allow_override => (nu.re.round() as i64, true),
            None => {
                return Err(MathieuError::Admissibility {
                    nu,
                    nearest: nu.re.round() as i64,
                    tol,
                })
            }
        };
        let parity = if order.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        Ok(Self {
            variant,
            params: *params,
            nu,
            admissible_nu,
            order,
            overridden,
            c1,
            c2,
            decay_rate: params.eta / (2.0 * params.m),
            argument_scale: argument_scale(params, variant),
            exponent_rate: params.lambda() * 0.5,
            partner_c1: c1 * parity,
            partner_c2: c2 * parity,
            branch: "principal".to_string(),
        })
    }

    /// Same index and argument, different constants.
    pub fn with_constants(&self, c1: ComplexScalar, c2: ComplexScalar) -> Self {
        let parity = if self.order.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        Self {
            c1,
            c2,
            partner_c1: c1 * parity,
            partner_c2: c2 * parity,
            ..self.clone()
        }
    }

    /// `J_n`, `Y_n` and their `z`-derivatives at `z(t)`, continued along the
    /// path `z0 exp(iωs/2)`, `s ∈ [0, t]`.
    fn bessel_at(&self, t: f64) -> Result<(ComplexScalar, BesselValue, BesselValue)> {
        let n = self.order;
        let phase = self.argument_scale.arg() + 0.5 * self.params.omega * t;
        let radius = self.argument_scale.norm();
        let z = ComplexScalar::from_polar(radius, phase);
        let sheet = (phase / PI).round();
        let w = ComplexScalar::from_polar(radius, phase - sheet * PI);
        let order = i32::try_from(n).map_err(|_| MathieuError::Range(format!("order {n}")))?;
        if radius == 0.0 {
            if self.c2 != ComplexScalar::new(0.0, 0.0) {
                return Err(MathieuError::Singularity(format!(
                    "Bessel argument vanishes at t = {t} while c2 = {}",
                    self.c2
                )));
            }
            let zero = ComplexScalar::new(0.0, 0.0);
            let j = bessel_j(order, zero)?;
            return Ok((z, j, BesselValue { value: zero, derivative: zero }));
        }
        let (j, y) = bessel_jy(order, w)?;
        // z = w e^{mπi}: J_n(z) = (-1)^{mn} J_n(w), Y_n(z) = (-1)^{mn} [Y_n(w) + 2im J_n(w)],
        // and d/dz = (-1)^m d/dw.
        let m = sheet as i64;
        let s_val = if (m * n).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let s_der = if (m * (n + 1)).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let shift = ComplexScalar::new(0.0, 2.0 * sheet);
        let jz = BesselValue {
            value: j.value * s_val,
            derivative: j.derivative * s_der,
        };
        let yz = BesselValue {
            value: (y.value + shift * j.value) * s_val,
            derivative: (y.derivative + shift * j.derivative) * s_der,
        };
        Ok((z, jz, yz))
    }

    /// The bracket `c1 J_n(z) + c2 Y_n(z)` and its first two time derivatives.
    pub fn bracket(&self, t: f64) -> Result<[ComplexScalar; 3]> {
        let (z, j, y) = self.bessel_at(t)?;
        let r = self.exponent_rate;
        let n = self.order as f64;
        let b = self.c1 * j.value + self.c2 * y.value;
        let db = self.c1 * j.derivative + self.c2 * y.derivative;
        let bt = r * z * db;
        // Bessel's equation turns z²B'' + zB' into (n² - z²)B.
        let btt = r * r * (ComplexScalar::new(n * n, 0.0) - z * z) * b;
        Ok([b, bt, btt])
    }

    pub fn eval(&self, t: f64) -> Result<SolutionSample> {
        let [b, bt, btt] = self.bracket(t)?;
        let d = self.decay_rate;
        let e = (-d * t).exp();
        Ok(SolutionSample {
            t,
            y: b * e,
            dy: (bt - b * d) * e,
            d2y: (btt - bt * (2.0 * d) + b * (d * d)) * e,
        })
    }
}

impl crate::AnalyticSolution for ClosedFormSpec {
    fn sample(&self, t: f64) -> Result<SolutionSample> {
        self.eval(t)
    }
}

/// `exp(-ηt/2m) [c1 J_ν(z) + c2 Y_ν(z)]` for an admissible index.
///
/// With `allow_override` an inadmissible index is rounded to the nearest
/// integer and the result is tagged `overridden`.
pub fn general_solution(
    params: &DampedParams,
    variant: Variant,
    c1: ComplexScalar,
    c2: ComplexScalar,
    allow_override: bool,
) -> Result<ClosedFormSpec> {
    ClosedFormSpec::build(params, variant, c1, c2, ADMISSIBILITY_TOL, allow_override)
}

/// The pair `(c2 Y_ν branch, c1 J_ν branch)`. A zero constant is replaced by 1
/// so that both members are nontrivial.
pub fn fundamental_pair(
    params: &DampedParams,
    variant: Variant,
    c1: ComplexScalar,
    c2: ComplexScalar,
) -> Result<(ClosedFormSpec, ClosedFormSpec)> {
    let zero = ComplexScalar::new(0.0, 0.0);
    let one = ComplexScalar::new(1.0, 0.0);
    let c1 = if c1 == zero { one } else { c1 };
    let c2 = if c2 == zero { one } else { c2 };
    let base = ClosedFormSpec::build(params, variant, zero, zero, ADMISSIBILITY_TOL, false)?;
    Ok((base.with_constants(zero, c2), base.with_constants(c1, zero)))
}

/// Damped parameters `(m = 1, η = 0, K0 = h, k = -2θ, ω = 2)` whose equation is
/// `y'' + (h - 2θ cos 2t) y = 0` in the original time.
pub fn undamped_preimage(gp: &GeneralParams) -> Result<DampedParams> {
    if gp.h.im != 0.0 || gp.theta.im != 0.0 {
        return Err(MathieuError::Mapping(format!(
            "complex (h, θ) = ({}, {}) has no real undamped preimage",
            gp.h, gp.theta
        )));
    }
    DampedParams::new(1.0, 0.0, gp.h.re, -2.0 * gp.theta.re, 2.0)
}

/// The closed form at `η = 0`, offered as a solution of the general Mathieu equation.
pub fn undamped_general_solution(
    gp: &GeneralParams,
    variant: Variant,
    c1: ComplexScalar,
    c2: ComplexScalar,
    allow_override: bool,
) -> Result<ClosedFormSpec> {
    let params = undamped_preimage(gp)?;
    general_solution(&params, variant, c1, c2, allow_override)
}

/// `y'' + (η/m) y' + (K0/m + (k/m) exp(iωt)) y = 0`.
pub fn first_equation(params: &DampedParams) -> LinearOde {
    let p = *params;
    LinearOde::homogeneous(
        move |_| ComplexScalar::new(p.damping_rate(), 0.0),
        move |t| {
            ComplexScalar::new(p.stiffness_rate(), 0.0)
                + ComplexScalar::from_polar(p.modulation_rate(), p.omega * t)
        },
    )
}

/// `y'' + (η/m) y' + (K0 + k cos ωt)/m y = 0`.
pub fn damped_mathieu(params: &DampedParams) -> LinearOde {
    let p = *params;
    LinearOde::homogeneous(
        move |_| ComplexScalar::new(p.damping_rate(), 0.0),
        move |t| ComplexScalar::new((p.k0 + p.k * (p.omega * t).cos()) / p.m, 0.0),
    )
}

/// Per-variant residuals of the closed form against [`first_equation`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adjudication {
    pub paper_literal: VariantOutcome,
    pub corrected: VariantOutcome,
    /// The variant whose residual is below [`PASS_THRESHOLD`]; the smaller one if both are.
    pub passing_variant: Option<Variant>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantOutcome {
    pub nu: ComplexScalar,
    pub order: i64,
    pub overridden: bool,
    pub report: ResidualReport,
}

/// Evaluates both variants with constants `(c1, c2)` on `grid`. Inadmissible
/// indices are evaluated with the override so that both residuals are always reported.
pub fn adjudicate(
    params: &DampedParams,
    c1: ComplexScalar,
    c2: ComplexScalar,
    grid: &[f64],
) -> Result<Adjudication> {
    let ode = first_equation(params);
    let outcome = |variant| -> Result<VariantOutcome> {
        let spec = general_solution(params, variant, c1, c2, true)?;
        let report = residual(&ode, &spec, grid)?.without_points().judged(PASS_THRESHOLD);
        Ok(VariantOutcome {
            nu: spec.nu,
            order: spec.order,
            overridden: spec.overridden,
            report,
        })
    };
    let paper_literal = outcome(Variant::PaperLiteral)?;
    let corrected = outcome(Variant::Corrected)?;
    let pass = |o: &VariantOutcome| !o.overridden && o.report.linf < PASS_THRESHOLD;
    let passing_variant = match (pass(&paper_literal), pass(&corrected)) {
        (true, true) if paper_literal.report.linf < corrected.report.linf => Some(Variant::PaperLiteral),
        (true, true) | (false, true) => Some(Variant::Corrected),
        (true, false) => Some(Variant::PaperLiteral),
        (false, false) => None,
    };
    Ok(Adjudication {
        paper_literal,
        corrected,
        passing_variant,
    })
}
