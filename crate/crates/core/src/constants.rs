//! Physical constants (SI, 2019 redefinition).

/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant (J/K).
pub const K_B: f64 = 1.380_649e-23;

/// Planck constant h = 2πħ (J·s).
pub const H_PLANCK: f64 = 2.0 * std::f64::consts::PI * HBAR;
