//! Classical and quantized single-ion-channel Hodgkin-Huxley circuit simulation.
//!
//! The crate is organized around the physical layers of the model:
//!
//! * [`hh`] — the classical membrane equations (full three-channel model,
//!   potassium-only reduction, and the adiabatic stationary-voltage variant);
//! * [`memristor`] — the voltage-controlled memristive-system formalism and
//!   hysteresis-loop analysis;
//! * [`sme`] — the quantum memristor evolved by a stochastic master equation
//!   on a truncated Fock space;
//! * [`tline`] — transmission-line quantization of the single-channel circuit:
//!   closed-form voltage response, scattering coefficients, vacuum/thermal
//!   voltage fluctuations, and the memristive impedance update;
//! * [`squid`] — the superconducting (asymmetric rf-SQUID) implementation:
//!   derived constants, oscillating quasiparticle conductance, and regime
//!   validity checks.
//!
//! Shared infrastructure lives in [`timeseries`] (named, unit-tagged traces)
//! and [`numerics`] (fixed-step RK4 and adaptive quadrature).

// Parameter guards are written `!(x > 0.0)` so NaN fails validation too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod error;
pub mod hh;
pub mod memristor;
pub mod numerics;
pub mod sme;
pub mod squid;
pub mod timeseries;
pub mod tline;

pub use error::SimError;
pub use timeseries::TimeSeries;
