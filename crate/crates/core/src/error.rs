//! Error type shared by every simulation module.

use thiserror::Error;

/// Failure modes of the simulators and analysis routines.
#[derive(Debug, Error)]
pub enum SimError {
    /// A parameter violates its documented precondition.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// An input value is outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The integrator produced a non-finite state; `t` names the failing time.
    #[error("integration failure at t = {t:.6e} s: {msg}")]
    Integration { t: f64, msg: String },

    /// Trace drift or overflow that a smaller step would avoid.
    #[error("instability: {0}")]
    Instability(String),

    /// A memristive-system axiom (passivity or zero-voltage stasis) was violated.
    #[error("axiom violation: {0}")]
    AxiomViolation(String),

    /// The supplied trace is too short for the requested analysis.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A quadrature did not converge or the integrand is not resolvable.
    #[error("quadrature failure: {0}")]
    Quadrature(String),

    /// A requested time grid cannot resolve the fastest scale of the model.
    #[error("resolution error: {0}")]
    Resolution(String),
}

pub type Result<T> = std::result::Result<T, SimError>;
