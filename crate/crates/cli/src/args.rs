use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use mathieu_core::{ReductionFamily, Variant};

#[derive(Debug, Parser)]
#[command(name = "mathieu-kit", version, about = "Damped Mathieu equation toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Evaluate the Bessel closed form of the damped equation on a time grid.
    Solve(SolveArgs),
    /// Characteristic exponent and Floquet series of the general Mathieu equation.
    Floquet(FloquetArgs),
    /// Residuals of both closed-form variants and the passing one.
    Residual(ResidualArgs),
    /// Stability chart over an (h, theta) grid.
    Sweep(SweepArgs),
    /// Reduce an ODE family to Mathieu form and check the pull-back.
    Transform(TransformArgs),
    /// Simulate the flux-lattice equation and demodulate the induced field.
    Flux(FluxArgs),
    /// Integrate an equation with the reference integrator.
    Integrate(IntegrateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Primary artifact format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub output: OutputFormat,
    /// Write the primary artifact here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON sidecar path for CSV output (defaults to `out` with a .json extension).
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
    /// Oracle tolerance; overrides MATHIEU_KIT_TOL.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, Args, Serialize)]
pub struct DampedArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub m: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub eta: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub k0: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub k: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub omega: f64,
}

#[derive(Debug, Clone, Copy, Args, Serialize)]
pub struct ConstantsArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub c1_re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub c1_im: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub c2_re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub c2_im: f64,
}

#[derive(Debug, Clone, Copy, Args, Serialize)]
pub struct GridArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub t0: f64,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    pub t1: f64,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolveArgs {
    #[command(flatten)]
    pub damped: DampedArgs,
    #[arg(long, value_enum, default_value_t = VariantArg::Corrected)]
    pub variant: VariantArg,
    #[command(flatten)]
    pub constants: ConstantsArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Evaluate with the nearest integer order when the index is not admissible.
    #[arg(long)]
    pub allow_override: bool,
    #[command(flatten)]
    #[serde(skip)]
    pub io: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FloquetArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub h: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub theta: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub h_im: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta_im: f64,
    /// Hill-determinant truncation N (matrix size 2N+1).
    #[arg(long, default_value_t = 25)]
    pub trunc: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub t0: f64,
    #[arg(long, default_value_t = std::f64::consts::PI, allow_negative_numbers = true)]
    pub t1: f64,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    #[command(flatten)]
    #[serde(skip)]
    pub io: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ResidualArgs {
    #[command(flatten)]
    pub damped: DampedArgs,
    #[command(flatten)]
    pub constants: ConstantsArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub io: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub h_min: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub h_max: f64,
    #[arg(long)]
    pub h_n: usize,
    #[arg(long, allow_negative_numbers = true)]
    pub theta_min: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub theta_max: f64,
    #[arg(long)]
    pub theta_n: usize,
    #[arg(long, default_value_t = 25)]
    pub trunc: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub io: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TransformArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub m: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub eta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub k0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub omega: Option<f64>,
    /// Number of pull-back samples on the interior of the domain.
    #[arg(long, default_value_t = 400)]
    pub samples: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub io: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FluxArgs {
    #[command(flatten)]
    pub damped: DampedArgs,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub b_field: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub j0: f64,
    /// Microwave angular frequency.
    #[arg(long, allow_negative_numbers = true)]
    pub big_omega: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub c_light: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub y0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub dy0: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub t1: f64,
    #[arg(long, default_value_t = 0.05)]
    pub dt: f64,
    /// Samples before this time are excluded from the modulation analysis.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub t_discard: f64,
    #[command(flatten)]
    #[serde(skip)]
    pub io: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EquationArg {
    /// y'' + (h - 2 theta cos 2t) y = 0
    Mathieu,
    /// m y'' + eta y' + (K0 + k cos omega t) y = 0
    Damped,
    /// y'' + (eta/m) y' + (K0/m + (k/m) exp(i omega t)) y = 0
    Split,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct IntegrateArgs {
    #[arg(long, value_enum)]
    pub equation: EquationArg,
    #[arg(long, allow_negative_numbers = true)]
    pub h: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub m: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub eta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub k0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub omega: Option<f64>,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub y0_re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub y0_im: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub dy0_re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub dy0_im: f64,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub io: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantArg {
    PaperLiteral,
    Corrected,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::PaperLiteral => Variant::PaperLiteral,
            VariantArg::Corrected => Variant::Corrected,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyArg {
    Eq11,
    Eq13,
    Eq15,
    #[value(name = "eq17-sin")]
    Eq17Sin,
    #[value(name = "eq17-cos")]
    Eq17Cos,
    Damped,
}

impl From<FamilyArg> for ReductionFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Eq11 => ReductionFamily::Eq11,
            FamilyArg::Eq13 => ReductionFamily::Eq13,
            FamilyArg::Eq15 => ReductionFamily::Eq15,
            FamilyArg::Eq17Sin => ReductionFamily::Eq17Sin,
            FamilyArg::Eq17Cos => ReductionFamily::Eq17Cos,
            FamilyArg::Damped => ReductionFamily::Damped,
        }
    }
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Solve(_) => "solve",
            Command::Floquet(_) => "floquet",
            Command::Residual(_) => "residual",
            Command::Sweep(_) => "sweep",
            Command::Transform(_) => "transform",
            Command::Flux(_) => "flux",
            Command::Integrate(_) => "integrate",
        }
    }

    pub fn io(&self) -> &OutputArgs {
        match self {
            Command::Solve(a) => &a.io,
            Command::Floquet(a) => &a.io,
            Command::Residual(a) => &a.io,
            Command::Sweep(a) => &a.io,
            Command::Transform(a) => &a.io,
            Command::Flux(a) => &a.io,
            Command::Integrate(a) => &a.io,
        }
    }

    pub fn params(&self) -> serde_json::Value {
        let v = match self {
            Command::Solve(a) => serde_json::to_value(a),
            Command::Floquet(a) => serde_json::to_value(a),
            Command::Residual(a) => serde_json::to_value(a),
            Command::Sweep(a) => serde_json::to_value(a),
            Command::Transform(a) => serde_json::to_value(a),
            Command::Flux(a) => serde_json::to_value(a),
            Command::Integrate(a) => serde_json::to_value(a),
        };
        v.expect("argument structs serialize")
    }
}
