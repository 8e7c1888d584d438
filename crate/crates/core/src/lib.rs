//! Analytic and numerical machinery for the damped Mathieu equation
//!
//! ```text
//! m y'' + η y' + (K0 + k cos ωt) y = (B J0 / c) cos Ωt
//! ```
//!
//! The crate is split by concern:
//!
//! - [`bessel`]: integer-order complex Bessel functions `J_n`, `Y_n` with derivatives.
//! - [`closed_form`]: Bessel-function solutions of the exponentially modulated split
//!   equations, in a literal and a substitution-corrected parameterization.
//! - [`floquet`]: Floquet exponents and Fourier coefficients of `y'' + (h - 2θ cos 2t) y = 0`.
//! - [`reductions`]: changes of variable that bring several ODE families to Mathieu form.
//! - [`oracle`]: adaptive Dormand–Prince integration, residuals, monodromy and Abel checks.
//! - [`flux`]: the flux-lattice application (steady states, induced field, demodulation).
//!
//! Every analytic solution implements [`AnalyticSolution`], so the oracle can
//! check it against any [`oracle::LinearOde`].

pub mod bessel;
pub mod closed_form;
mod error;
pub mod floquet;
pub mod flux;
pub mod oracle;
pub mod reductions;
mod types;

pub use error::{MathieuError, Result};
pub use types::{AnalyticSolution, ComplexScalar, DampedParams, GeneralParams, SolutionSample};

pub use bessel::{bessel_j, bessel_y, BesselValue};
pub use closed_form::{ClosedFormSpec, Variant};
pub use floquet::{CharacteristicExponent, FloquetSolution, Stability};
pub use flux::{FluxParams, InducedFieldModel, ModulationReport, SinusoidalResponse};
pub use oracle::{LinearOde, ResidualReport, TimeSeries, Trajectory, Verdict};
pub use reductions::{ReductionFamily, ReductionInput, ReductionResult, VariableMap};



