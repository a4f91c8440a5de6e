//! Transmission-line quantization of the single-channel circuit.
//!
//! The memristor is represented by a semi-infinite transmission line whose
//! impedance tracks the potassium conductance. This module carries the
//! closed-form voltage response to a classical sinusoidal source, single- and
//! dual-line scattering coefficients, vacuum and thermal voltage fluctuations,
//! and the adiabatic impedance-update loop.

use crate::constants::HBAR;
use crate::error::{Result, SimError};
use crate::hh::gate_step_fixed_rates;
use crate::numerics::{adaptive_simpson, rk4_step, trapezoid_complex};
use crate::timeseries::TimeSeries;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Circuit constants of the quantized single-channel model.
#[derive(Debug, Clone, Copy)]
pub struct TLParams {
    /// Line impedance Z0 = sqrt(L0/C0) (Ω). For the memristive run this is
    /// the minimum impedance; the live impedance is part of the state.
    pub z0: f64,
    /// Membrane capacitance coupling the node to ground (F).
    pub cc: f64,
    /// Source coupling capacitance (F).
    pub cg: f64,
    /// Resting potential of the channel (V). Enters only as a DC offset and
    /// is dropped from dynamical traces.
    pub v0: f64,
    /// Second-line impedance for dual-line runs (Ω).
    pub z1: f64,
}

impl TLParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.z0 > 0.0) || !(self.z1 > 0.0) {
            return Err(SimError::Parameter(format!(
                "line impedances must be > 0, got Z0 = {}, Z1 = {}",
                self.z0, self.z1
            )));
        }
        if !(self.cc >= 0.0) || !(self.cg >= 0.0) {
            return Err(SimError::Parameter(
                "coupling capacitances must be >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// Memristive impedance state: Z = Z_min n⁻⁴ with the gate value n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpedanceState {
    /// Live impedance (Ω).
    pub z: f64,
    /// Minimum impedance, reached at n = 1 (Ω).
    pub z_min: f64,
    /// Gate variable in (0, 1].
    pub n: f64,
}

impl ImpedanceState {
    /// State from a gate value.
    pub fn from_gate(z_min: f64, n: f64) -> Result<Self> {
        if !(z_min > 0.0) {
            return Err(SimError::Parameter(format!(
                "Z_min must be > 0, got {z_min}"
            )));
        }
        if !(n > 0.0 && n <= 1.0) {
            return Err(SimError::Parameter(format!("n must be in (0, 1], got {n}")));
        }
        Ok(ImpedanceState {
            z: z_min * n.powi(-4),
            z_min,
            n,
        })
    }

    /// State from an impedance value Z >= Z_min.
    pub fn from_impedance(z_min: f64, z: f64) -> Result<Self> {
        if !(z_min > 0.0) {
            return Err(SimError::Parameter(format!(
                "Z_min must be > 0, got {z_min}"
            )));
        }
        if !(z >= z_min) {
            return Err(SimError::Parameter(format!(
                "Z must be >= Z_min, got Z = {z}, Z_min = {z_min}"
            )));
        }
        Ok(ImpedanceState {
            z,
            z_min,
            n: (z_min / z).powf(0.25),
        })
    }

    /// Conductance 1/Z (S).
    pub fn conductance(&self) -> f64 {
        1.0 / self.z
    }

    /// Relative error of the stored Z against Z_min n⁻⁴.
    pub fn consistency(&self) -> f64 {
        let expect = self.z_min * self.n.powi(-4);
        ((self.z - expect) / expect).abs()
    }
}

/// Single-line reflection coefficient R(ω) = (i − Cc ω Z0)/(i + Cc ω Z0).
pub fn reflection_single(omega: f64, cc: f64, z0: f64) -> Complex64 {
    let a = Complex64::new(0.0, 1.0);
    let x = Complex64::new(cc * omega * z0, 0.0);
    (a - x) / (a + x)
}

/// Closed-form voltage response to I(t) = I0 sin(Ωt) with the line in vacuum:
/// V(t) = I0 Z0 (sin Ωt − Cc Ω Z0 cos Ωt) / (1 + (Cc Ω Z0)²).
pub fn voltage_classical_source(i0: f64, omega: f64, cc: f64, z0: f64, t: f64) -> f64 {
    let a = cc * omega * z0;
    i0 * z0 * ((omega * t).sin() - a * (omega * t).cos()) / (1.0 + a * a)
}

/// Vacuum second moment of the voltage with an explicit UV cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VacuumMoment {
    /// Adaptive quadrature of (ħZ0/π) ∫ ω/(1+(CcωZ0)²) dω up to `omega_max`.
    pub quadrature: f64,
    /// Analytic antiderivative (ħ/(2πCc²Z0)) ln(1+(Cc ω_max Z0)²).
    pub closed_form: f64,
    /// The cutoff used (rad/s); the integral diverges without one.
    pub omega_max: f64,
}

/// Zero-point contribution to ⟨V²⟩, divergent in the cutoff.
pub fn vacuum_second_moment(cc: f64, z0: f64, omega_max: f64) -> Result<VacuumMoment> {
    if !(omega_max > 0.0) {
        return Err(SimError::Parameter(format!(
            "omega_max must be > 0, got {omega_max}"
        )));
    }
    let integrand = |w: f64| w / (1.0 + (cc * w * z0).powi(2));
    let quadrature = HBAR * z0 / PI * adaptive_simpson(&integrand, 0.0, omega_max, 1e-11)?;
    let a = cc * z0;
    let closed_form = if a > 0.0 {
        HBAR / (2.0 * PI * cc * cc * z0) * (a * omega_max).powi(2).ln_1p()
    } else {
        HBAR * z0 / (2.0 * PI) * omega_max * omega_max
    };
    Ok(VacuumMoment {
        quadrature,
        closed_form,
        omega_max,
    })
}

/// Thermal-minus-vacuum voltage fluctuation Δ and its comparison values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalDelta {
    /// Quadrature of the Bose-weighted integrand
    /// (ħZ0/π) ∫ ω [coth(βħω/2) − 1]/(1+(CcωZ0)²) dω.
    pub bose: f64,
    /// Quadrature of the high-frequency-reduced integrand
    /// (2ħZ0/π) ∫ ω e^{−βħω}/(1+(CcωZ0)²) dω.
    pub boltzmann: f64,
    /// Large-β closed form 2Z0/(ħπβ²).
    pub closed_form: f64,
    /// Effective upper limit chosen so the neglected tail is < 1e-6 of the total.
    pub omega_max: f64,
}

/// Thermal contribution of the circuit-voltage fluctuations.
///
/// Both the exact Bose-statistics integrand and its high-frequency
/// (Boltzmann) reduction are integrated; the large-β closed form
/// 2Z0/(ħπβ²) is the β→∞ limit of the reduced integral. The exact Bose
/// integral exceeds it by a factor π²/6 in the same limit; all three values
/// are reported.
pub fn thermal_delta(z0: f64, cc: f64, beta: f64) -> Result<ThermalDelta> {
    if !(beta > 0.0) {
        return Err(SimError::Parameter(format!("beta must be > 0, got {beta}")));
    }
    // Both integrands decay like e^{-βħω}; at ω = 60/(βħ) the tail is
    // ~ 1e-24 of the total, far below the 1e-6 target.
    let omega_max = 60.0 / (beta * HBAR);
    let lorentz = |w: f64| 1.0 / (1.0 + (cc * w * z0).powi(2));
    // coth(x) − 1 = 2/(e^{2x} − 1); exp_m1 keeps small arguments exact.
    let bose_integrand = |w: f64| {
        if w == 0.0 {
            // ω (coth(βħω/2) − 1) → 2/(βħ) as ω → 0.
            2.0 / (beta * HBAR)
        } else {
            w * 2.0 / (beta * HBAR * w).exp_m1() * lorentz(w)
        }
    };
    let boltz_integrand = |w: f64| 2.0 * w * (-beta * HBAR * w).exp() * lorentz(w);
    let bose = HBAR * z0 / PI * adaptive_simpson(&bose_integrand, 0.0, omega_max, 1e-11)?;
    let boltzmann = HBAR * z0 / PI * adaptive_simpson(&boltz_integrand, 0.0, omega_max, 1e-11)?;
    Ok(ThermalDelta {
        bose,
        boltzmann,
        closed_form: 2.0 * z0 / (HBAR * PI * beta * beta),
        omega_max,
    })
}

/// One adiabatic impedance update: the gate advances one step of the gate
/// equation at the measured voltage, and Z is recomputed from Z = Z_min n⁻⁴.
pub fn impedance_update_step(
    state: &ImpedanceState,
    v: f64,
    dt: f64,
    alpha: &dyn Fn(f64) -> f64,
    beta: &dyn Fn(f64) -> f64,
) -> Result<ImpedanceState> {
    if !(dt > 0.0) {
        return Err(SimError::Parameter(format!("dt must be > 0, got {dt}")));
    }
    let n = gate_step_fixed_rates(state.n, alpha(v), beta(v), dt);
    if n <= 0.0 {
        return Err(SimError::Instability(format!(
            "gate collapsed to n = {n} (Z -> infinity)"
        )));
    }
    let z = state.z_min * n.powi(-4);
    if !z.is_finite() {
        return Err(SimError::Instability(format!(
            "impedance overflow at n = {n}"
        )));
    }
    Ok(ImpedanceState {
        z,
        z_min: state.z_min,
        n,
    })
}

/// One step of the impedance equation integrated directly in Z:
/// Ż = −4 Z_min (Z/Z_min)^{5/4} α(V) + 4 Z (α(V) + β(V)).
///
/// This is the change-of-variables twin of [`impedance_update_step`]; the two
/// must agree to integrator tolerance.
pub fn impedance_step_z_path(
    state: &ImpedanceState,
    v: f64,
    dt: f64,
    alpha: &dyn Fn(f64) -> f64,
    beta: &dyn Fn(f64) -> f64,
) -> Result<ImpedanceState> {
    if !(dt > 0.0) {
        return Err(SimError::Parameter(format!("dt must be > 0, got {dt}")));
    }
    let (a, b) = (alpha(v), beta(v));
    let z_min = state.z_min;
    let f = |_t: f64, y: &[f64; 1]| {
        let z = y[0];
        [-4.0 * z_min * (z / z_min).powf(1.25) * a + 4.0 * z * (a + b)]
    };
    let z = rk4_step(&f, 0.0, &[state.z], dt)[0];
    if !z.is_finite() || z <= 0.0 {
        return Err(SimError::Instability(format!(
            "impedance overflow from Z = {}",
            state.z
        )));
    }
    Ok(ImpedanceState {
        z,
        z_min,
        n: (z_min / z).powf(0.25),
    })
}

/// Quantized single-channel run with a classical sinusoidal source.
///
/// Per the adiabatic contract the voltage is evaluated from the closed form
/// with the impedance frozen, then the impedance advances one gate step at
/// that voltage. `refresh_stride` updates the impedance every that many
/// steps (1 = every step). Returns channels `V, g, I`.
#[allow(clippy::too_many_arguments)]
pub fn simulate_quantized_hh(
    tl: &TLParams,
    i0: f64,
    omega: f64,
    init: ImpedanceState,
    rates: (&dyn Fn(f64) -> f64, &dyn Fn(f64) -> f64),
    tspan: (f64, f64),
    dt: f64,
    refresh_stride: usize,
) -> Result<TimeSeries> {
    tl.validate()?;
    if !(dt > 0.0) {
        return Err(SimError::Parameter(format!("dt must be > 0, got {dt}")));
    }
    if refresh_stride == 0 {
        return Err(SimError::Parameter("refresh stride must be >= 1".into()));
    }
    let mut state = init;
    let mut ts = TimeSeries::new(&[("V", "V"), ("g", "S"), ("I", "A")]);
    let steps = ((tspan.1 - tspan.0) / dt).round() as usize;
    for k in 0..=steps {
        let t = tspan.0 + k as f64 * dt;
        let v = voltage_classical_source(i0, omega, tl.cc, state.z, t);
        if !v.is_finite() {
            return Err(SimError::Integration {
                t,
                msg: "voltage became non-finite".into(),
            });
        }
        ts.push(t, &[v, state.conductance(), i0 * (omega * t).sin()]);
        if k < steps && (k + 1) % refresh_stride == 0 {
            state = impedance_update_step(&state, v, dt * refresh_stride as f64, rates.0, rates.1)?;
        }
    }
    Ok(ts)
}

/// Dual-line scattering coefficients at one angular frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualScattering {
    /// Reflection on the source line.
    pub r0: Complex64,
    /// Reflection on the circuit line.
    pub r1: Complex64,
    /// Transmission between the lines.
    pub s: Complex64,
}

impl DualScattering {
    /// The scattering matrix [[R0, s], [s, R1]].
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        [[self.r0, self.s], [self.s, self.r1]]
    }
}

/// Dual-line scattering coefficients {R0, R1, s} at angular frequency ω.
///
/// The 2×2 matrix [[R0, s], [s, R1]] is unitary for every ω.
pub fn dual_line_scattering(omega: f64, cg: f64, cc: f64, z0: f64, z1: f64) -> DualScattering {
    let i = Complex64::new(0.0, 1.0);
    let d = Complex64::new(1.0, 0.0)
        - i * omega * (cg + cc) * z1
        - omega * cg * z0 * (i + Complex64::new(omega * cc * z1, 0.0));
    let num0 = Complex64::new(1.0, 0.0) - i * omega * (cg + cc) * z1
        + omega * cg * z0 * (i + Complex64::new(omega * cc * z1, 0.0));
    let num1 = Complex64::new(1.0, 0.0) + i * omega * (cg + cc) * z1
        - omega * cg * z0 * (i - Complex64::new(omega * cc * z1, 0.0));
    let nums = -2.0 * i * omega * cg * (z0 * z1).sqrt();
    DualScattering {
        r0: num0 / d,
        r1: num1 / d,
        s: nums / d,
    }
}

/// A source state given as coherent amplitudes ⟨a_in(ω)⟩ on an ascending
/// frequency grid, with an optional classical current transform on the same
/// grid.
#[derive(Debug, Clone)]
pub struct DriveSpectrum {
    /// Frequency grid (rad/s), ascending.
    pub omega: Vec<f64>,
    /// Coherent amplitudes ⟨a_in(ω)⟩ at the grid points.
    pub amplitude: Vec<Complex64>,
    /// Optional classical source transform 𝓘(ω) at the grid points.
    pub classical: Option<Vec<Complex64>>,
}

impl DriveSpectrum {
    /// The vacuum: zero amplitude everywhere on the given grid.
    pub fn vacuum(omega: Vec<f64>) -> Self {
        let n = omega.len();
        DriveSpectrum {
            omega,
            amplitude: vec![Complex64::new(0.0, 0.0); n],
            classical: None,
        }
    }

    fn validate(&self, t: f64) -> Result<()> {
        if self.omega.len() != self.amplitude.len() || self.omega.len() < 2 {
            return Err(SimError::Parameter(
                "spectrum grid and amplitudes must match and hold >= 2 points".into(),
            ));
        }
        if self
            .omega
            .windows(2)
            .any(|w| !(w[1] > w[0]) || !w[0].is_finite())
        {
            return Err(SimError::Parameter("spectrum grid must ascend".into()));
        }
        if self.amplitude.iter().any(|a| !a.is_finite()) {
            return Err(SimError::Quadrature("spectrum amplitude not finite".into()));
        }
        // The oscillatory kernel e^{-iωt} must be resolved by the grid.
        let max_dw = self
            .omega
            .windows(2)
            .fold(0.0f64, |acc, w| acc.max(w[1] - w[0]));
        if max_dw * t.abs() > PI / 2.0 {
            return Err(SimError::Quadrature(format!(
                "grid spacing {max_dw:e} rad/s cannot resolve e^(-iωt) at t = {t:e} s"
            )));
        }
        Ok(())
    }
}

/// Voltage response and second moment of the dual-line circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualLineResponse {
    /// First moment ⟨V⟩ at time t (V).
    pub voltage: f64,
    /// Full second moment ⟨V²⟩ = vacuum part + source-correlation part (V²).
    pub second_moment: f64,
    /// Cutoff-regularized vacuum part of the second moment (V²).
    pub vacuum_part: f64,
    /// Source-correlation part of the second moment (V²).
    pub correlation_part: f64,
    /// UV cutoff used for the vacuum part (rad/s).
    pub omega_max: f64,
}

/// Evaluates the dual-line voltage response and second moment at time `t`,
/// averaging over the vacuum of the circuit-side line and the supplied
/// coherent source state on the other. The vacuum part of the second moment
/// carries an explicit UV cutoff `omega_max`.
pub fn dual_line_response(
    spectrum: &DriveSpectrum,
    tl: &TLParams,
    t: f64,
    omega_max: f64,
) -> Result<DualLineResponse> {
    tl.validate()?;
    spectrum.validate(t)?;
    if !(omega_max > 0.0) {
        return Err(SimError::Parameter(format!(
            "omega_max must be > 0, got {omega_max}"
        )));
    }
    let (cg, cc, z0, z1) = (tl.cg, tl.cc, tl.z0, tl.z1);

    let denom = |w: f64| -> f64 {
        1.0 + w
            * w
            * (cg * cg * z0 * z0
                + 2.0 * cg * cg * z0 * z1
                + ((cc + cg) * (cc + cg) + w * w * cg * cg * cc * cc * z0 * z0) * z1 * z1)
    };

    // First moment: -Cg Z1 sqrt(ħZ0/π) ∫ ω^{3/2} [bracket] dω with the
    // bracket reducing to 2 Re{(A_real - i A_imag-part) ⟨a⟩ e^{-iωt}} / denom.
    let first: Vec<Complex64> = spectrum
        .omega
        .iter()
        .zip(&spectrum.amplitude)
        .map(|(&w, &a)| {
            let real_part = 1.0 - w * w * cg * cc * z0 * z1;
            let imag_part = w * ((cc + cg) * z1 + cg * z0);
            let phase = Complex64::new(0.0, -w * t).exp();
            let core = a * phase;
            let bracket = Complex64::new(real_part, imag_part) * core;
            Complex64::new(w.powf(1.5) * 2.0 * bracket.re / denom(w), 0.0)
        })
        .collect();
    let voltage =
        -cg * z1 * (HBAR * z0 / PI).sqrt() * trapezoid_complex(&spectrum.omega, &first).re;

    // Vacuum part: (ħZ1/π) ∫_0^cutoff ω (1 + ω²Cg²Z0²)/denom dω.
    let vac_integrand = |w: f64| w * (1.0 + w * w * cg * cg * z0 * z0) / denom(w);
    let vacuum_part = HBAR * z1 / PI * adaptive_simpson(&vac_integrand, 0.0, omega_max, 1e-10)?;

    // Correlation part: with coherent (factorizing) source statistics the
    // four-fold correlator reduces to -(ħZ1/2π)(Re F² - |F|²) with
    // F(t) = ∫ sqrt(ω) s(ω) ⟨a(ω)⟩ e^{-iωt} dω.
    let f_vals: Vec<Complex64> = spectrum
        .omega
        .iter()
        .zip(&spectrum.amplitude)
        .map(|(&w, &a)| {
            let sc = dual_line_scattering(w, cg, cc, z0, z1);
            w.sqrt() * sc.s * a * Complex64::new(0.0, -w * t).exp()
        })
        .collect();
    let f = trapezoid_complex(&spectrum.omega, &f_vals);
    let correlation_part = -(HBAR * z1 / (2.0 * PI)) * ((f * f).re - f.norm_sqr());

    Ok(DualLineResponse {
        voltage,
        second_moment: vacuum_part + correlation_part,
        vacuum_part,
        correlation_part,
        omega_max,
    })
}
