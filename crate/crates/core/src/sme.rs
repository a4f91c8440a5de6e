//! Quantum memristor evolved by a stochastic master equation.
//!
//! The density matrix of an LC oscillator lives on a truncated Fock space and
//! evolves under three parts: the von Neumann term, a continuous weak
//! measurement of the charge, and Caldeira-Leggett dissipation with a
//! state-dependent relaxation rate γ(μ). The Hamiltonian part advances by its
//! exact diagonal propagator; the open-system and stochastic parts advance
//! Euler–Maruyama style, followed by Hermitian symmetrization and trace
//! renormalization.

use crate::constants::{HBAR, K_B};
use crate::error::{Result, SimError};
use crate::numerics::rk4_step;
use crate::timeseries::TimeSeries;
use ndarray::Array2;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use std::sync::Arc;

type CMat = Array2<Complex64>;

fn commutator(a: &CMat, b: &CMat) -> CMat {
    a.dot(b) - b.dot(a)
}

fn anticommutator(a: &CMat, b: &CMat) -> CMat {
    a.dot(b) + b.dot(a)
}

/// Charge/flux/Hamiltonian matrices of the truncated oscillator.
#[derive(Debug, Clone)]
pub struct OscillatorOps {
    pub dim: usize,
    /// Charge operator q = i sqrt(ħCω/2) (a† − a).
    pub q: CMat,
    /// Flux operator φ = sqrt(ħ/(2Cω)) (a + a†).
    pub phi: CMat,
    /// Hamiltonian q²/2C + φ²/2L, built exactly as diag(ħω(k+½)).
    pub h: CMat,
    /// Oscillator frequency 1/sqrt(LC) (rad/s).
    pub omega: f64,
    pub hbar: f64,
}

/// Ladder-operator construction of the oscillator at ω = 1/sqrt(LC).
///
/// The Hamiltonian is written directly in the Fock basis, diag(ħω(k+½)),
/// rather than from products of the truncated q and φ, so its spectrum is
/// exact at every dimension.
pub fn build_operators(dim: usize, c: f64, l: f64, hbar: f64) -> Result<OscillatorOps> {
    if dim < 2 {
        return Err(SimError::Parameter(format!("dim must be >= 2, got {dim}")));
    }
    if !(c > 0.0 && l > 0.0 && hbar > 0.0) {
        return Err(SimError::Parameter(
            "C, L and ħ must all be positive".into(),
        ));
    }
    let omega = 1.0 / (l * c).sqrt();
    let q_zpf = (hbar * c * omega / 2.0).sqrt();
    let phi_zpf = (hbar / (2.0 * c * omega)).sqrt();

    let mut q = CMat::zeros((dim, dim));
    let mut phi = CMat::zeros((dim, dim));
    for k in 1..dim {
        let s = (k as f64).sqrt();
        // a[k-1, k] = sqrt(k); a†[k, k-1] = sqrt(k).
        phi[[k - 1, k]] = Complex64::new(phi_zpf * s, 0.0);
        phi[[k, k - 1]] = Complex64::new(phi_zpf * s, 0.0);
        q[[k - 1, k]] = Complex64::new(0.0, -q_zpf * s);
        q[[k, k - 1]] = Complex64::new(0.0, q_zpf * s);
    }
    let mut h = CMat::zeros((dim, dim));
    for k in 0..dim {
        h[[k, k]] = Complex64::new(hbar * omega * (k as f64 + 0.5), 0.0);
    }
    Ok(OscillatorOps {
        dim,
        q,
        phi,
        h,
        omega,
        hbar,
    })
}

/// Truncated-Fock-space density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub dim: usize,
    pub data: CMat,
}

impl DensityMatrix {
    pub fn from_matrix(data: CMat) -> Result<Self> {
        if data.nrows() != data.ncols() || data.nrows() < 2 {
            return Err(SimError::Parameter(
                "density matrix must be square, dim >= 2".into(),
            ));
        }
        Ok(DensityMatrix {
            dim: data.nrows(),
            data,
        })
    }

    /// |0⟩⟨0|.
    pub fn ground(dim: usize) -> Self {
        let mut data = CMat::zeros((dim, dim));
        data[[0, 0]] = Complex64::new(1.0, 0.0);
        DensityMatrix { dim, data }
    }

    /// Coherent state |α⟩⟨α| truncated to `dim` levels and renormalized.
    pub fn coherent(dim: usize, alpha: Complex64) -> Self {
        let mut psi = vec![Complex64::new(0.0, 0.0); dim];
        let mut amp = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
        for (k, slot) in psi.iter_mut().enumerate() {
            *slot = amp;
            amp = amp * alpha / Complex64::new(((k + 1) as f64).sqrt(), 0.0);
        }
        let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut psi {
            *a /= norm;
        }
        let mut data = CMat::zeros((dim, dim));
        for i in 0..dim {
            for j in 0..dim {
                data[[i, j]] = psi[i] * psi[j].conj();
            }
        }
        DensityMatrix { dim, data }
    }

    pub fn trace(&self) -> Complex64 {
        self.data.diag().sum()
    }

    /// ⟨A⟩ = Re tr(ρA) for Hermitian A.
    pub fn expectation(&self, op: &CMat) -> f64 {
        self.data.dot(op).diag().sum().re
    }

    /// tr(ρ²).
    pub fn purity(&self) -> f64 {
        self.data.dot(&self.data).diag().sum().re
    }

    /// Largest |ρ − ρ†| entry.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self.data[[i, j]] - self.data[[j, i]].conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue (Hermitian eigensolve); the positivity monitor.
    pub fn min_eigenvalue(&self) -> f64 {
        let m = nalgebra::DMatrix::from_fn(self.dim, self.dim, |i, j| self.data[[i, j]]);
        let eig = nalgebra::SymmetricEigen::new(m);
        eig.eigenvalues.iter().fold(f64::INFINITY, |a, &b| a.min(b))
    }

    /// Exact Hermitian symmetrization (ρ + ρ†)/2, written entrywise so the
    /// result is Hermitian bit-for-bit.
    fn symmetrize(&mut self) {
        for i in 0..self.dim {
            self.data[[i, i]] = Complex64::new(self.data[[i, i]].re, 0.0);
            for j in i + 1..self.dim {
                let avg = 0.5 * (self.data[[i, j]] + self.data[[j, i]].conj());
                self.data[[i, j]] = avg;
                self.data[[j, i]] = avg.conj();
            }
        }
    }
}

type GammaMap = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type StateLaw = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Parameters of the stochastic master equation.
#[derive(Clone)]
pub struct SmeParams {
    /// Capacitance (F).
    pub c: f64,
    /// Inductance (H).
    pub l: f64,
    /// Projection frequency τ (1/s).
    pub tau: f64,
    /// Charge uncertainty q0 (C).
    pub q0: f64,
    /// Relaxation-rate map γ(μ) (1/s).
    pub gamma: GammaMap,
    /// λ = k_B T / ħ (1/s).
    pub lambda: f64,
    /// Step size (s).
    pub dt: f64,
    /// RNG seed for the Wiener increments.
    pub seed: u64,
    /// ħ; 1 in natural units, the SI value otherwise.
    pub hbar: f64,
    /// Classical sources: no Wiener noise is injected.
    pub classical_sources: bool,
    /// Internal-variable law μ' = f(μ, ⟨V⟩).
    pub state_law: StateLaw,
    /// Initial internal state.
    pub mu0: f64,
    /// Conductance map for the memristive current; 2Cγ(μ) when unset.
    pub conductance: Option<GammaMap>,
    /// Steps between positivity-monitor eigensolves.
    pub monitor_stride: usize,
}

impl SmeParams {
    /// Measurement strength κ = τ/q0².
    pub fn kappa(&self) -> f64 {
        self.tau / (self.q0 * self.q0)
    }

    /// Conductance of the memristive element at state μ. Defaults to the
    /// damping-to-resistance identification G(μ) = 2Cγ(μ).
    pub fn conductance_at(&self, mu: f64) -> f64 {
        match &self.conductance {
            Some(g) => g(mu),
            None => 2.0 * self.c * (self.gamma)(mu),
        }
    }

    /// λ from a physical temperature.
    pub fn lambda_from_temperature(t_kelvin: f64, hbar: f64) -> f64 {
        K_B * t_kelvin / hbar
    }

    /// Natural-unit (ħ = 1) defaults reproducing the qualitative hysteresis
    /// run: C = L = 1, weak measurement, γ(μ) = γ0 μ, and a gate-form state
    /// law f(μ, V) = r [V]₊(1 − μ) − r [−V]₊ μ that is quiescent at V = 0.
    ///
    /// λ = k_B T/ħ sits at 2ω: the Caldeira-Leggett form needs the diffusion
    /// term to dominate its friction term (k_B T ≳ ħω) or the evolution
    /// amplifies high Fock levels instead of relaxing.
    pub fn natural_defaults() -> Self {
        let gamma0 = 0.15;
        let rate = 0.4;
        SmeParams {
            c: 1.0,
            l: 1.0,
            tau: 2.5e-3,
            q0: 0.5,
            gamma: Arc::new(move |mu: f64| gamma0 * mu.clamp(0.0, 1.0)),
            lambda: 2.0,
            dt: 2.0 * std::f64::consts::PI / 1000.0,
            seed: 0,
            hbar: 1.0,
            classical_sources: true,
            state_law: Arc::new(move |mu: f64, v: f64| {
                rate * (v.max(0.0) * (1.0 - mu) - (-v).max(0.0) * mu)
            }),
            mu0: 0.5,
            conductance: None,
            monitor_stride: 50,
        }
    }

    /// SI variant of the defaults (ħ takes its physical value).
    pub fn si_defaults() -> Self {
        SmeParams {
            hbar: HBAR,
            ..SmeParams::natural_defaults()
        }
    }
}

impl std::fmt::Debug for SmeParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SmeParams")
            .field("c", &self.c)
            .field("l", &self.l)
            .field("tau", &self.tau)
            .field("q0", &self.q0)
            .field("lambda", &self.lambda)
            .field("dt", &self.dt)
            .field("seed", &self.seed)
            .field("hbar", &self.hbar)
            .field("classical_sources", &self.classical_sources)
            .field("mu0", &self.mu0)
            .finish()
    }
}

/// Von Neumann part dρ_H = −(i/ħ)[H, ρ] dt.
pub fn von_neumann_term(ops: &OscillatorOps, rho: &CMat, dt: f64) -> CMat {
    commutator(&ops.h, rho).mapv(|x| x * Complex64::new(0.0, -dt / ops.hbar))
}

/// Deterministic measurement part dρ = −κ [q, [q, ρ]] dt.
pub fn measurement_drift_term(ops: &OscillatorOps, kappa: f64, rho: &CMat, dt: f64) -> CMat {
    let inner = commutator(&ops.q, rho);
    commutator(&ops.q, &inner).mapv(|x| x * Complex64::new(-kappa * dt, 0.0))
}

/// Stochastic measurement part dρ = sqrt(2κ) ({q, ρ} − 2⟨q⟩ρ) dW.
pub fn measurement_stochastic_term(ops: &OscillatorOps, kappa: f64, rho: &CMat, dw: f64) -> CMat {
    let mean_q = rho.dot(&ops.q).diag().sum().re;
    let mut term = anticommutator(&ops.q, rho);
    term.zip_mut_with(rho, |t, r| *t -= 2.0 * mean_q * r);
    term.mapv(|x| x * Complex64::new((2.0 * kappa).sqrt() * dw, 0.0))
}

/// Caldeira-Leggett friction part dρ = −(iγ/ħ) [φ, {q, ρ}] dt.
pub fn dissipator_friction_term(ops: &OscillatorOps, gamma: f64, rho: &CMat, dt: f64) -> CMat {
    let anti = anticommutator(&ops.q, rho);
    commutator(&ops.phi, &anti).mapv(|x| x * Complex64::new(0.0, -gamma * dt / ops.hbar))
}

/// Caldeira-Leggett diffusion part dρ = −(2Cλγ/ħ) [φ, [φ, ρ]] dt.
pub fn dissipator_diffusion_term(
    ops: &OscillatorOps,
    c: f64,
    lambda: f64,
    gamma: f64,
    rho: &CMat,
    dt: f64,
) -> CMat {
    let inner = commutator(&ops.phi, rho);
    commutator(&ops.phi, &inner)
        .mapv(|x| x * Complex64::new(-2.0 * c * lambda * gamma * dt / ops.hbar, 0.0))
}

/// One step of the stochastic master equation at internal state `mu`.
///
/// The Hamiltonian part advances by its exact diagonal propagator (equal to
/// the von Neumann increment at first order in dt); the measurement drift,
/// the Caldeira-Leggett terms, an optional bias −V_b·q, and the stochastic
/// measurement term advance Euler–Maruyama style. The result is symmetrized
/// and trace-renormalized; pre-renormalization drift beyond 1e-3 raises an
/// instability error.
pub fn sme_step(
    rho: &DensityMatrix,
    ops: &OscillatorOps,
    params: &SmeParams,
    mu: f64,
    v_bias: f64,
    dw: f64,
) -> Result<DensityMatrix> {
    if rho.dim != ops.dim {
        return Err(SimError::Parameter(format!(
            "dimension mismatch: rho {} vs ops {}",
            rho.dim, ops.dim
        )));
    }
    let dt = params.dt;
    let gamma = (params.gamma)(mu);
    if !(gamma >= 0.0) {
        return Err(SimError::Parameter(format!(
            "gamma({mu}) = {gamma} is negative"
        )));
    }

    // Exact unitary conjugation: U = diag(exp(-i h_k dt / ħ)).
    let mut next = CMat::zeros((ops.dim, ops.dim));
    let phases: Vec<Complex64> = (0..ops.dim)
        .map(|k| Complex64::new(0.0, -ops.h[[k, k]].re * dt / ops.hbar).exp())
        .collect();
    for i in 0..ops.dim {
        for j in 0..ops.dim {
            next[[i, j]] = phases[i] * rho.data[[i, j]] * phases[j].conj();
        }
    }

    let kappa = params.kappa();
    if kappa > 0.0 {
        let term = measurement_drift_term(ops, kappa, &next, dt);
        next = next + term;
    }
    if gamma > 0.0 {
        let friction = dissipator_friction_term(ops, gamma, &next, dt);
        let diffusion = if params.lambda > 0.0 {
            Some(dissipator_diffusion_term(
                ops,
                params.c,
                params.lambda,
                gamma,
                &next,
                dt,
            ))
        } else {
            None
        };
        next = next + friction;
        if let Some(d) = diffusion {
            next = next + d;
        }
    }
    if v_bias != 0.0 {
        // Bias Hamiltonian −V_b q: dρ = +(i V_b/ħ)[q, ρ] dt.
        next = next
            + commutator(&ops.q, &rho.data)
                .mapv(|x| x * Complex64::new(0.0, v_bias * dt / ops.hbar));
    }
    if dw != 0.0 && kappa > 0.0 {
        let term = measurement_stochastic_term(ops, kappa, &next, dw);
        next = next + term;
    }

    let mut out = DensityMatrix {
        dim: ops.dim,
        data: next,
    };
    out.symmetrize();
    let tr = out.trace().re;
    if (tr - 1.0).abs() > 1e-3 {
        return Err(SimError::Instability(format!(
            "trace drifted to {tr:.6} before renormalization; reduce dt"
        )));
    }
    out.data.mapv_inplace(|x| x / tr);
    Ok(out)
}

/// First positivity-monitor breach along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositivityBreach {
    pub t: f64,
    pub min_eigenvalue: f64,
}

/// Run metadata reported next to the trace.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrajectoryInfo {
    /// Set if the monitored minimum eigenvalue dropped below −1e-6;
    /// the run continues and the breach is reported here.
    pub positivity_breach: Option<PositivityBreach>,
    /// Largest |tr(ρ) − 1| seen before renormalization.
    pub max_trace_drift: f64,
    pub final_purity: f64,
}

/// Eigenvalue floor below which the positivity monitor flags the run.
pub const POSITIVITY_FLOOR: f64 = -1e-6;

/// Evolves the memristively damped oscillator and records expectation traces.
///
/// Channels: charge ⟨q⟩, voltage ⟨V⟩ = ⟨q⟩/C, memristive current
/// I = G(μ)⟨V⟩, and the internal state μ. With classical sources no Wiener
/// noise is injected; otherwise increments are drawn Normal(0, dt) from a
/// seeded stream, so identical seeds replay bit-identical trajectories.
pub fn simulate_trajectory(
    rho0: &DensityMatrix,
    ops: &OscillatorOps,
    params: &SmeParams,
    t_end: f64,
    drive: Option<&(dyn Fn(f64) -> f64 + Sync)>,
) -> Result<(TimeSeries, TrajectoryInfo)> {
    if !(t_end > 0.0 && params.dt > 0.0) {
        return Err(SimError::Parameter("t_end and dt must be > 0".into()));
    }
    let mut rho = rho0.clone();
    let mut mu = params.mu0;
    let mut rng = ChaCha12Rng::seed_from_u64(params.seed);
    let sqrt_dt = params.dt.sqrt();
    let mut info = TrajectoryInfo::default();
    let mut ts = TimeSeries::new(&[("q", "C"), ("V", "V"), ("I_mem", "A"), ("mu", "1")]);

    let steps = (t_end / params.dt).round() as usize;
    for k in 0..=steps {
        let t = k as f64 * params.dt;
        let mean_q = rho.expectation(&ops.q);
        let v = mean_q / params.c;
        ts.push(t, &[mean_q, v, params.conductance_at(mu) * v, mu]);

        if params.monitor_stride > 0 && k % params.monitor_stride == 0 {
            let lam = rho.min_eigenvalue();
            if lam < POSITIVITY_FLOOR && info.positivity_breach.is_none() {
                info.positivity_breach = Some(PositivityBreach {
                    t,
                    min_eigenvalue: lam,
                });
            }
        }

        if k == steps {
            break;
        }
        let drift = (rho.trace().re - 1.0).abs();
        info.max_trace_drift = info.max_trace_drift.max(drift);
        let dw = if params.classical_sources {
            0.0
        } else {
            let z: f64 = StandardNormal.sample(&mut rng);
            z * sqrt_dt
        };
        let v_bias = drive.map_or(0.0, |f| f(t));
        rho = sme_step(&rho, ops, params, mu, v_bias, dw)?;
        // Internal state advances with the measured voltage held fixed.
        let law = &params.state_law;
        let f = |_t: f64, y: &[f64; 1]| [law(y[0], v)];
        mu = rk4_step(&f, 0.0, &[mu], params.dt)[0];
        if !mu.is_finite() {
            return Err(SimError::Integration {
                t,
                msg: "internal state became non-finite".into(),
            });
        }
    }
    info.final_purity = rho.purity();
    Ok((ts, info))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn hermitian_probe(dim: usize) -> DensityMatrix {
        // A deterministic, well-spread Hermitian unit-trace matrix.
        let mut data = CMat::zeros((dim, dim));
        for i in 0..dim {
            for j in 0..dim {
                let re = ((i * 7 + j * 3) as f64 * 0.37).sin() / dim as f64;
                let im = ((i as f64) - (j as f64)) * 0.11;
                data[[i, j]] = Complex64::new(re, im);
            }
        }
        let mut rho = DensityMatrix { dim, data };
        rho.symmetrize();
        let tr = rho.trace().re;
        let shift = (1.0 - tr) / dim as f64;
        for k in 0..dim {
            rho.data[[k, k]] += Complex64::new(shift, 0.0);
        }
        rho
    }

    #[test]
    fn harmonic_spectrum_dim2() {
        let ops = build_operators(2, 1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(ops.h[[0, 0]].re, 0.5, max_relative = 1e-15);
        assert_relative_eq!(ops.h[[1, 1]].re, 1.5, max_relative = 1e-15);
        assert!(build_operators(1, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn ground_state_charge_variance() {
        // ⟨0|q²|0⟩ = (ħ/2) sqrt(C/L).
        let (c, l, hbar) = (2.0, 0.5, 1.0);
        let ops = build_operators(24, c, l, hbar).unwrap();
        let rho = DensityMatrix::ground(24);
        let q2 = ops.q.dot(&ops.q);
        assert_relative_eq!(
            rho.expectation(&q2),
            hbar / 2.0 * (c / l).sqrt(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn commutator_deviation_is_confined_to_truncation_corner() {
        let ops = build_operators(16, 1.0, 1.0, 1.0).unwrap();
        let comm = commutator(&ops.phi, &ops.q);
        for i in 0..16 {
            for j in 0..16 {
                let expect = if i == j {
                    Complex64::new(0.0, ops.hbar)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                let dev = (comm[[i, j]] - expect).norm();
                if i < 14 && j < 14 {
                    assert!(dev < 1e-12, "deviation {dev} at interior ({i}, {j})");
                }
            }
        }
        // The truncation artifact sits in the last diagonal entry.
        assert!((comm[[15, 15]] - Complex64::new(0.0, ops.hbar)).norm() > 1.0);
    }

    #[test]
    fn deterministic_terms_preserve_trace() {
        let dim = 30;
        let ops = build_operators(dim, 1.0, 1.0, 1.0).unwrap();
        let rho = hermitian_probe(dim);
        let dt = 1e-3;
        for (name, term) in [
            ("von_neumann", von_neumann_term(&ops, &rho.data, dt)),
            (
                "measurement",
                measurement_drift_term(&ops, 0.3, &rho.data, dt),
            ),
            (
                "friction",
                dissipator_friction_term(&ops, 0.2, &rho.data, dt),
            ),
            (
                "diffusion",
                dissipator_diffusion_term(&ops, 1.0, 0.5, 0.2, &rho.data, dt),
            ),
        ] {
            let tr = term.diag().sum();
            assert!(tr.norm() < 1e-12, "{name} trace = {tr} is not preserved");
        }
    }

    #[test]
    fn stochastic_term_is_traceless() {
        let dim = 20;
        let ops = build_operators(dim, 1.0, 1.0, 1.0).unwrap();
        let rho = DensityMatrix::coherent(dim, Complex64::new(1.2, -0.4));
        let term = measurement_stochastic_term(&ops, 0.5, &rho.data, 0.031);
        assert!(term.diag().sum().norm() < 1e-12);
    }

    #[test]
    fn closed_system_conserves_energy_and_amplitude() {
        let dim = 20;
        let ops = build_operators(dim, 1.0, 1.0, 1.0).unwrap();
        let mut params = SmeParams::natural_defaults();
        params.tau = 0.0;
        params.gamma = Arc::new(|_| 0.0);
        let rho0 = DensityMatrix::coherent(dim, Complex64::new(0.4, 1.5));
        let (ts, info) = simulate_trajectory(&rho0, &ops, &params, 6.0 * PI, None).unwrap();
        let q = ts.values("q").unwrap();
        // ⟨q⟩ oscillates at ω = 1 with constant amplitude, within 0.1%.
        let first_max = q.iter().take(1200).fold(0.0f64, |a, &x| a.max(x.abs()));
        let last_max = q
            .iter()
            .skip(q.len() - 1200)
            .fold(0.0f64, |a, &x| a.max(x.abs()));
        assert_relative_eq!(first_max, last_max, max_relative = 1e-3);
        assert!(info.final_purity <= 1.0 + 1e-9);
        assert!(info.max_trace_drift < 1e-12);
        // One full revolution returns ⟨q⟩ to its initial value.
        let period_steps = (2.0 * PI / params.dt).round() as usize;
        assert_relative_eq!(q[period_steps], q[0], max_relative = 1e-6);
    }

    #[test]
    fn closed_step_conserves_energy() {
        let dim = 20;
        let ops = build_operators(dim, 1.0, 1.0, 1.0).unwrap();
        let mut params = SmeParams::natural_defaults();
        params.tau = 0.0;
        params.gamma = Arc::new(|_| 0.0);
        let rho0 = DensityMatrix::coherent(dim, Complex64::new(1.5, 0.0));
        let e0 = rho0.expectation(&ops.h);
        let stepped = sme_step(&rho0, &ops, &params, 0.5, 0.0, 0.0).unwrap();
        let e1 = stepped.expectation(&ops.h);
        // Exact propagation: conservation to rounding, well inside O(dt²).
        assert!((e1 - e0).abs() <= 1e-12 * e0.abs() + params.dt * params.dt);
    }

    #[test]
    fn damped_oscillator_envelope_decays_at_gamma() {
        let dim = 24;
        let ops = build_operators(dim, 1.0, 1.0, 1.0).unwrap();
        let gamma0 = 0.12;
        let mut params = SmeParams::natural_defaults();
        params.tau = 0.0;
        params.gamma = Arc::new(move |_| gamma0);
        params.dt = 2.0 * PI / 2000.0;
        let rho0 = DensityMatrix::coherent(dim, Complex64::new(1.8, 0.0));
        let (ts, _) = simulate_trajectory(&rho0, &ops, &params, 8.0 * PI, None).unwrap();
        let t = &ts.time;
        let q = ts.values("q").unwrap();
        // Log-envelope fit across oscillation peaks.
        let mut peaks = Vec::new();
        for k in 1..q.len() - 1 {
            if q[k].abs() > q[k - 1].abs() && q[k].abs() >= q[k + 1].abs() && q[k].abs() > 1e-3 {
                peaks.push((t[k], q[k].abs().ln()));
            }
        }
        assert!(peaks.len() >= 6, "too few peaks: {}", peaks.len());
        let n = peaks.len() as f64;
        let sx: f64 = peaks.iter().map(|p| p.0).sum();
        let sy: f64 = peaks.iter().map(|p| p.1).sum();
        let sxx: f64 = peaks.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = peaks.iter().map(|p| p.0 * p.1).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        assert_relative_eq!(slope, -gamma0, max_relative = 0.1);
    }

    #[test]
    fn hysteresis_run_closes_a_loop() {
        let dim = 20;
        let ops = build_operators(dim, 1.0, 1.0, 1.0).unwrap();
        let params = SmeParams::natural_defaults();
        let rho0 = DensityMatrix::coherent(dim, Complex64::new(2.0, 0.0));
        let (ts, info) = simulate_trajectory(&rho0, &ops, &params, 6.0 * PI, None).unwrap();
        let v = ts.values("V").unwrap();
        let i = ts.values("I_mem").unwrap();
        let m = crate::memristor::loop_metrics(&ts.time, v, i, Some(2.0 * PI)).unwrap();
        assert!(m.abs_area > 0.0, "loop area vanished");
        assert!(m.pinched, "memristive loop must pass the origin");
        assert!(
            info.positivity_breach.is_none(),
            "{:?}",
            info.positivity_breach
        );
        assert!(info.final_purity <= 1.0 + 1e-9);
    }

    #[test]
    fn seeded_noise_replays_bit_identically() {
        let dim = 12;
        let ops = build_operators(dim, 1.0, 1.0, 1.0).unwrap();
        let mut params = SmeParams::natural_defaults();
        params.classical_sources = false;
        params.seed = 42;
        params.dt = 2.0 * PI / 400.0;
        let rho0 = DensityMatrix::coherent(dim, Complex64::new(1.0, 0.5));
        let (a, _) = simulate_trajectory(&rho0, &ops, &params, 2.0 * PI, None).unwrap();
        let (b, _) = simulate_trajectory(&rho0, &ops, &params, 2.0 * PI, None).unwrap();
        assert_eq!(a.values("q").unwrap(), b.values("q").unwrap());
        params.seed = 43;
        let (c, _) = simulate_trajectory(&rho0, &ops, &params, 2.0 * PI, None).unwrap();
        assert_ne!(a.values("q").unwrap(), c.values("q").unwrap());
    }

    #[test]
    fn positivity_breach_is_flagged_not_fatal() {
        // Friction with too little thermal diffusion drives the state
        // non-positive; the monitor reports it and the run completes.
        let dim = 14;
        let ops = build_operators(dim, 1.0, 1.0, 1.0).unwrap();
        let mut params = SmeParams::natural_defaults();
        params.tau = 0.0;
        params.lambda = 0.01;
        params.gamma = Arc::new(|_| 0.3);
        params.monitor_stride = 10;
        params.dt = 2.0 * PI / 2000.0;
        let rho0 = DensityMatrix::coherent(dim, Complex64::new(1.5, 0.0));
        let (ts, info) = simulate_trajectory(&rho0, &ops, &params, 4.0 * PI, None).unwrap();
        assert_eq!(ts.len(), 4001);
        let breach = info.positivity_breach.expect("expected a flagged breach");
        assert!(breach.min_eigenvalue < POSITIVITY_FLOOR);
    }

    #[test]
    fn step_rejects_dimension_mismatch() {
        let ops = build_operators(8, 1.0, 1.0, 1.0).unwrap();
        let rho = DensityMatrix::ground(10);
        let params = SmeParams::natural_defaults();
        assert!(sme_step(&rho, &ops, &params, 0.5, 0.0, 0.0).is_err());
    }

    #[test]
    fn biased_step_moves_the_charge() {
        let dim = 16;
        let ops = build_operators(dim, 1.0, 1.0, 1.0).unwrap();
        let mut params = SmeParams::natural_defaults();
        params.tau = 0.0;
        params.gamma = Arc::new(|_| 0.0);
        let rho0 = DensityMatrix::ground(dim);
        let bias = |_t: f64| 0.5;
        let (ts, _) = simulate_trajectory(&rho0, &ops, &params, PI, Some(&bias)).unwrap();
        let q = ts.values("q").unwrap();
        assert!(
            q.last().unwrap().abs() > 1e-3,
            "bias did not drive the charge"
        );
    }
}
