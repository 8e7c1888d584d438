use thiserror::Error;

use crate::ComplexScalar;

pub type Result<T, E = MathieuError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MathieuError {
    #[error("argument out of supported range: {0}")]
    Range(String),

    #[error("singularity: {0}")]
    Singularity(String),

    #[error("index nu = {nu} is not an integer (nearest integer {nearest}, tolerance {tol:e})")]
    Admissibility {
        nu: ComplexScalar,
        nearest: i64,
        tol: f64,
    },

    #[error("root search did not converge: {0}")]
    Convergence(String),

    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("sample outside the map domain: {0}")]
    Domain(String),

    #[error("step size underflow at t = {t} (last good state y = {y}, y' = {dy})")]
    Stiffness {
        t: f64,
        y: ComplexScalar,
        dy: ComplexScalar,
    },

    #[error("resonance: {0}")]
    Resonance(String),

    #[error("insufficient span: {0}")]
    Span(String),

    #[error("no preimage: {0}")]
    Mapping(String),
}
