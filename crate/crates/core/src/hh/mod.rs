//! Classical Hodgkin-Huxley membrane dynamics.
//!
//! Three integrators are provided: the full three-channel model, the
//! potassium-only single-channel reduction, and the adiabatic variant that
//! evaluates the stationary voltage in closed form while stepping only the
//! gate variable. All quantities are SI; the canonical per-area constants are
//! scaled by an explicit membrane area.

pub mod rates;

use crate::error::{Result, SimError};
use crate::numerics::rk4_step;
use crate::timeseries::TimeSeries;
pub use rates::{RateFn, RateFunctions};

/// Circuit constants of the membrane patch (absolute SI values).
#[derive(Debug, Clone, Copy)]
pub struct HHParams {
    /// Membrane capacitance (F).
    pub cg: f64,
    /// Maximum potassium conductance (S).
    pub g_k_max: f64,
    /// Maximum sodium conductance (S).
    pub g_na_max: f64,
    /// Leak conductance (S).
    pub g_l: f64,
    /// Potassium resting potential (V).
    pub v_k: f64,
    /// Sodium resting potential (V).
    pub v_na: f64,
    /// Leak resting potential (V).
    pub v_l: f64,
}

impl HHParams {
    /// Standard per-area constants (36/120/0.3 mS/cm², 1 µF/cm²) scaled to
    /// `area_cm2`, in the displacement-from-rest convention (V_K = 0, the
    /// sodium and leak potentials keep their 1952 displacement values).
    pub fn standard(area_cm2: f64) -> Self {
        HHParams {
            cg: 1e-6 * area_cm2,
            g_k_max: 36e-3 * area_cm2,
            g_na_max: 120e-3 * area_cm2,
            g_l: 0.3e-3 * area_cm2,
            v_k: 0.0,
            v_na: 115e-3,
            v_l: 10.6e-3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cg > 0.0) {
            return Err(SimError::Parameter(format!(
                "Cg must be > 0, got {}",
                self.cg
            )));
        }
        for (name, g) in [
            ("gK_max", self.g_k_max),
            ("gNa_max", self.g_na_max),
            ("gL", self.g_l),
        ] {
            if !(g >= 0.0) {
                return Err(SimError::Parameter(format!("{name} must be >= 0, got {g}")));
            }
        }
        Ok(())
    }
}

/// Gate state of the three ion-channel variables, each in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateVars {
    pub n: f64,
    pub m: f64,
    pub h: f64,
}

impl GateVars {
    /// Stationary gate values at voltage `v`.
    pub fn stationary(rates: &RateFunctions, v: f64) -> Self {
        GateVars {
            n: rates.n_inf(v),
            m: rates.m_inf(v),
            h: rates.h_inf(v),
        }
    }
}

/// Input current drive.
#[derive(Clone, Debug)]
pub enum Drive {
    /// I(t) = I0 sin(Ω t).
    Sinusoid {
        /// Amplitude (A).
        i0: f64,
        /// Angular frequency (rad/s).
        omega: f64,
    },
    /// Piecewise-linear interpolation of sampled current values.
    Sampled { times: Vec<f64>, values: Vec<f64> },
}

impl Drive {
    pub fn sinusoid(i0: f64, omega: f64) -> Self {
        Drive::Sinusoid { i0, omega }
    }

    /// Current at time `t` (A).
    pub fn current(&self, t: f64) -> f64 {
        match self {
            Drive::Sinusoid { i0, omega } => i0 * (omega * t).sin(),
            Drive::Sampled { times, values } => {
                if times.is_empty() {
                    return 0.0;
                }
                match times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
                    Ok(k) => values[k],
                    Err(0) => values[0],
                    Err(k) if k >= times.len() => *values.last().unwrap(),
                    Err(k) => {
                        let w = (t - times[k - 1]) / (times[k] - times[k - 1]);
                        values[k - 1] * (1.0 - w) + values[k] * w
                    }
                }
            }
        }
    }

    /// Drive period 2π/Ω for sinusoids.
    pub fn period(&self) -> Option<f64> {
        match self {
            Drive::Sinusoid { omega, .. } if *omega > 0.0 => {
                Some(2.0 * std::f64::consts::PI / omega)
            }
            _ => None,
        }
    }
}

/// The six rates evaluated at voltage `v` (SI): (α_n, β_n, α_m, β_m, α_h, β_h).
///
/// Fails on non-finite voltage; each returned rate is checked nonnegative.
pub fn eval_rates(rates: &RateFunctions, v: f64) -> Result<[f64; 6]> {
    if !v.is_finite() {
        return Err(SimError::Domain(format!("voltage must be finite, got {v}")));
    }
    let out = [
        (rates.alpha_n)(v),
        (rates.beta_n)(v),
        (rates.alpha_m)(v),
        (rates.beta_m)(v),
        (rates.alpha_h)(v),
        (rates.beta_h)(v),
    ];
    for r in out {
        if !(r.is_finite() && r >= 0.0) {
            return Err(SimError::Domain(format!(
                "rate functions must be finite and nonnegative, got {r} at V = {v}"
            )));
        }
    }
    Ok(out)
}

/// Right-hand side of a gate equation: α(1 − x) − βx.
pub fn gate_derivative(x: f64, alpha: f64, beta: f64) -> f64 {
    alpha * (1.0 - x) - beta * x
}

/// One RK4 step of the gate equation with rates frozen (voltage held fixed).
pub fn gate_step_fixed_rates(x: f64, alpha: f64, beta: f64, dt: f64) -> f64 {
    let f = |_t: f64, y: &[f64; 1]| [gate_derivative(y[0], alpha, beta)];
    rk4_step(&f, 0.0, &[x], dt)[0].clamp(0.0, 1.0)
}

fn check_finite(state: &[f64], t: f64) -> Result<()> {
    if state.iter().any(|x| !x.is_finite()) {
        return Err(SimError::Integration {
            t,
            msg: "state became non-finite; reduce dt".into(),
        });
    }
    Ok(())
}

fn check_dt(dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(SimError::Parameter(format!("dt must be > 0, got {dt}")));
    }
    Ok(())
}

/// Potassium-only membrane model: Cg V' = I(t) − gK_max n⁴ (V − V_K) coupled
/// to the n-gate equation. Returns channels `V, n, gK, I`.
pub fn simulate_single_channel(
    params: &HHParams,
    rates: &RateFunctions,
    drive: &Drive,
    v0: f64,
    n0: Option<f64>,
    tspan: (f64, f64),
    dt: f64,
) -> Result<TimeSeries> {
    params.validate()?;
    check_dt(dt)?;
    let n0 = n0.unwrap_or_else(|| rates.n_inf(v0));
    if !(0.0..=1.0).contains(&n0) {
        return Err(SimError::Parameter(format!(
            "initial n must be in [0,1], got {n0}"
        )));
    }

    let rhs = |t: f64, y: &[f64; 2]| {
        let (v, n) = (y[0], y[1]);
        let gk = params.g_k_max * n.powi(4);
        let dv = (drive.current(t) - gk * (v - params.v_k)) / params.cg;
        let dn = gate_derivative(n, (rates.alpha_n)(v), (rates.beta_n)(v));
        [dv, dn]
    };

    let mut ts = TimeSeries::new(&[("V", "V"), ("n", "1"), ("gK", "S"), ("I", "A")]);
    let mut y = [v0, n0];
    let steps = ((tspan.1 - tspan.0) / dt).round() as usize;
    for k in 0..=steps {
        let t = tspan.0 + k as f64 * dt;
        check_finite(&y, t)?;
        ts.push(
            t,
            &[y[0], y[1], params.g_k_max * y[1].powi(4), drive.current(t)],
        );
        if k < steps {
            y = rk4_step(&rhs, t, &y, dt);
            y[1] = y[1].clamp(0.0, 1.0);
        }
    }
    Ok(ts)
}

/// Full three-channel model. Returns channels `V, n, m, h, gK, gNa, I`.
pub fn simulate_full_hh(
    params: &HHParams,
    rates: &RateFunctions,
    drive: &Drive,
    v0: f64,
    gates0: Option<GateVars>,
    tspan: (f64, f64),
    dt: f64,
) -> Result<TimeSeries> {
    params.validate()?;
    check_dt(dt)?;
    let g0 = gates0.unwrap_or_else(|| GateVars::stationary(rates, v0));
    for (name, x) in [("n", g0.n), ("m", g0.m), ("h", g0.h)] {
        if !(0.0..=1.0).contains(&x) {
            return Err(SimError::Parameter(format!(
                "initial {name} must be in [0,1], got {x}"
            )));
        }
    }

    let rhs = |t: f64, y: &[f64; 4]| {
        let (v, n, m, h) = (y[0], y[1], y[2], y[3]);
        let i_k = params.g_k_max * n.powi(4) * (v - params.v_k);
        let i_na = params.g_na_max * m.powi(3) * h * (v - params.v_na);
        let i_l = params.g_l * (v - params.v_l);
        let dv = (drive.current(t) - i_k - i_na - i_l) / params.cg;
        [
            dv,
            gate_derivative(n, (rates.alpha_n)(v), (rates.beta_n)(v)),
            gate_derivative(m, (rates.alpha_m)(v), (rates.beta_m)(v)),
            gate_derivative(h, (rates.alpha_h)(v), (rates.beta_h)(v)),
        ]
    };

    let mut ts = TimeSeries::new(&[
        ("V", "V"),
        ("n", "1"),
        ("m", "1"),
        ("h", "1"),
        ("gK", "S"),
        ("gNa", "S"),
        ("I", "A"),
    ]);
    let mut y = [v0, g0.n, g0.m, g0.h];
    let steps = ((tspan.1 - tspan.0) / dt).round() as usize;
    for k in 0..=steps {
        let t = tspan.0 + k as f64 * dt;
        check_finite(&y, t)?;
        ts.push(
            t,
            &[
                y[0],
                y[1],
                y[2],
                y[3],
                params.g_k_max * y[1].powi(4),
                params.g_na_max * y[2].powi(3) * y[3],
                drive.current(t),
            ],
        );
        if k < steps {
            y = rk4_step(&rhs, t, &y, dt);
            for x in &mut y[1..] {
                *x = x.clamp(0.0, 1.0);
            }
        }
    }
    Ok(ts)
}

/// Stationary single-channel voltage for a sinusoidal drive with the
/// potassium conductance frozen at `g_k`:
/// V = V_K + I0 (gK sin Ωt − Ω Cg cos Ωt) / (gK² + Cg² Ω²).
pub fn adiabatic_voltage(params: &HHParams, i0: f64, omega: f64, g_k: f64, t: f64) -> Result<f64> {
    let denom = g_k * g_k + params.cg * params.cg * omega * omega;
    if denom == 0.0 {
        return Err(SimError::Parameter(
            "stationary voltage undefined: gK = 0 with Ω Cg = 0 (division by zero)".into(),
        ));
    }
    Ok(params.v_k + i0 * (g_k * (omega * t).sin() - omega * params.cg * (omega * t).cos()) / denom)
}

/// Adiabatic single-channel run: at each step the voltage is taken from the
/// stationary closed form with the conductance frozen, then the gate advances
/// one step at that voltage. Returns channels `V, n, gK`.
pub fn simulate_single_channel_adiabatic(
    params: &HHParams,
    rates: &RateFunctions,
    drive: &Drive,
    n0: Option<f64>,
    tspan: (f64, f64),
    dt: f64,
) -> Result<TimeSeries> {
    params.validate()?;
    check_dt(dt)?;
    let (i0, omega) = match drive {
        Drive::Sinusoid { i0, omega } => (*i0, *omega),
        _ => {
            return Err(SimError::Parameter(
                "the adiabatic variant requires a sinusoidal drive".into(),
            ))
        }
    };
    let mut n = n0.unwrap_or_else(|| rates.n_inf(0.0));
    if !(0.0..=1.0).contains(&n) {
        return Err(SimError::Parameter(format!(
            "initial n must be in [0,1], got {n}"
        )));
    }

    let mut ts = TimeSeries::new(&[("V", "V"), ("n", "1"), ("gK", "S")]);
    let steps = ((tspan.1 - tspan.0) / dt).round() as usize;
    for k in 0..=steps {
        let t = tspan.0 + k as f64 * dt;
        let gk = params.g_k_max * n.powi(4);
        let v = adiabatic_voltage(params, i0, omega, gk, t)?;
        check_finite(&[v, n], t)?;
        ts.push(t, &[v, n, gk]);
        if k < steps {
            n = gate_step_fixed_rates(n, (rates.alpha_n)(v), (rates.beta_n)(v), dt);
        }
    }
    Ok(ts)
}
