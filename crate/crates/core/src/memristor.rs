//! Voltage-controlled memristive systems and hysteresis-loop analysis.
//!
//! A memristive system is a state-dependent Ohm's law I = G(μ)V together with
//! an internal-state equation μ' = f(μ, V), subject to two axioms: G(μ) ≥ 0
//! (passivity) and f(μ, 0) = 0 with f monotone in V (no dynamics without
//! voltage). Loop analysis extracts per-cycle signed areas, pinch detection,
//! and lobe counts from driven I-V traces.

use crate::error::{Result, SimError};
use crate::numerics::rk4_step;
use std::sync::Arc;

type StateMap = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type StateRate = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A voltage-controlled memristive system: internal state, conductance map,
/// and state-rate function.
#[derive(Clone)]
pub struct MemristiveSystem {
    /// Internal state μ (dimensionless).
    pub mu: f64,
    conductance: StateMap,
    state_rate: StateRate,
}

impl MemristiveSystem {
    pub fn new(
        mu0: f64,
        conductance: impl Fn(f64) -> f64 + Send + Sync + 'static,
        state_rate: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        MemristiveSystem {
            mu: mu0,
            conductance: Arc::new(conductance),
            state_rate: Arc::new(state_rate),
        }
    }

    /// Potassium-channel form: G(μ) = g_max μ⁴ with the gate equation
    /// μ' = α(V)(1 − μ) − β(V)μ.
    pub fn potassium(
        g_max: f64,
        alpha: impl Fn(f64) -> f64 + Send + Sync + 'static,
        beta: impl Fn(f64) -> f64 + Send + Sync + 'static,
        mu0: f64,
    ) -> Self {
        MemristiveSystem::new(
            mu0,
            move |mu| g_max * mu.powi(4),
            move |mu, v| alpha(v) * (1.0 - mu) - beta(v) * mu,
        )
    }

    /// Conductance at the current state (S).
    pub fn conductance(&self) -> f64 {
        (self.conductance)(self.mu)
    }

    /// State rate f(μ, V) at the current state.
    pub fn rate(&self, v: f64) -> f64 {
        (self.state_rate)(self.mu, v)
    }

    /// Samples G ≥ 0, f(·, 0) = 0, and monotonicity of f in V on a grid.
    pub fn check_axioms(&self, mu_grid: &[f64], v_grid: &[f64], tol: f64) -> Result<()> {
        for &mu in mu_grid {
            let g = (self.conductance)(mu);
            if !(g >= 0.0) {
                return Err(SimError::AxiomViolation(format!(
                    "G({mu}) = {g} is negative"
                )));
            }
            let f0 = (self.state_rate)(mu, 0.0);
            if f0.abs() > tol {
                return Err(SimError::AxiomViolation(format!(
                    "f({mu}, 0) = {f0} is nonzero"
                )));
            }
            let mut sorted: Vec<f64> = v_grid.to_vec();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let rates: Vec<f64> = sorted.iter().map(|&v| (self.state_rate)(mu, v)).collect();
            let increasing = rates.windows(2).all(|w| w[1] >= w[0] - tol);
            let decreasing = rates.windows(2).all(|w| w[1] <= w[0] + tol);
            if !increasing && !decreasing {
                return Err(SimError::AxiomViolation(format!(
                    "f({mu}, V) is not monotone in V on the sampled grid"
                )));
            }
        }
        Ok(())
    }
}

impl std::fmt::Debug for MemristiveSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "MemristiveSystem {{ mu: {} }}", self.mu)
    }
}

/// State-dependent Ohm's law I = G(μ)V. Fails if the conductance is negative.
pub fn memristor_current(sys: &MemristiveSystem, v: f64) -> Result<f64> {
    let g = sys.conductance();
    if !(g >= 0.0) {
        return Err(SimError::AxiomViolation(format!(
            "G({}) = {g} is negative",
            sys.mu
        )));
    }
    Ok(g * v)
}

/// One RK4 step of μ' = f(μ, V) with the voltage held fixed.
///
/// When f(μ, 0) = 0 the state is bit-unchanged for V = 0: every stage
/// derivative evaluates to exactly zero.
pub fn state_step(sys: &MemristiveSystem, v: f64, dt: f64) -> Result<f64> {
    if !(dt > 0.0) {
        return Err(SimError::Parameter(format!("dt must be > 0, got {dt}")));
    }
    let f = |_t: f64, y: &[f64; 1]| [(sys.state_rate)(y[0], v)];
    let next = rk4_step(&f, 0.0, &[sys.mu], dt)[0];
    if !next.is_finite() {
        return Err(SimError::Integration {
            t: 0.0,
            msg: format!("state rate produced non-finite μ from μ = {}", sys.mu),
        });
    }
    Ok(next)
}

/// Per-cycle hysteresis metrics of a driven I-V trace.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopMetrics {
    /// Signed shoelace area of the final complete cycle (A·V);
    /// counterclockwise traversal is positive.
    pub area: f64,
    /// |area| of the final complete cycle.
    pub abs_area: f64,
    /// Whether the normalized trace passes through the origin.
    pub pinched: bool,
    /// Lobes of the final cycle (segments between origin passages carrying
    /// more than 5% of the cycle's total unsigned area).
    pub lobes: usize,
    /// Cycle duration used for segmentation (s).
    pub period: f64,
    /// Signed area of every complete cycle, in order.
    pub cycle_areas: Vec<f64>,
}

/// Normalized distance from the origin to the closest point of the polyline,
/// checking segments rather than samples so a crossing between samples counts.
fn min_origin_distance(v: &[f64], i: &[f64], v_scale: f64, i_scale: f64) -> f64 {
    let mut best = f64::INFINITY;
    let n = v.len();
    for k in 0..n.saturating_sub(1) {
        let (x1, y1) = (v[k] / v_scale, i[k] / i_scale);
        let (x2, y2) = (v[k + 1] / v_scale, i[k + 1] / i_scale);
        let (dx, dy) = (x2 - x1, y2 - y1);
        let len2 = dx * dx + dy * dy;
        let t = if len2 > 0.0 {
            (-(x1 * dx + y1 * dy) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let (px, py) = (x1 + t * dx, y1 + t * dy);
        best = best.min((px * px + py * py).sqrt());
    }
    best
}

/// Signed shoelace area of the closed polygon through the samples.
fn shoelace(v: &[f64], i: &[f64]) -> f64 {
    let n = v.len();
    let mut acc = 0.0;
    for k in 0..n {
        let j = (k + 1) % n;
        acc += v[k] * i[j] - v[j] * i[k];
    }
    0.5 * acc
}

/// Dominant period of a signal by normalized autocorrelation.
fn autocorrelation_period(t: &[f64], x: &[f64]) -> Option<f64> {
    let n = x.len();
    if n < 8 {
        return None;
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let xs: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let var: f64 = xs.iter().map(|v| v * v).sum();
    if var == 0.0 {
        return None;
    }
    let corr = |lag: usize| -> f64 {
        let mut acc = 0.0;
        for k in 0..n - lag {
            acc += xs[k] * xs[k + lag];
        }
        acc / var
    };
    // Skip the zero-lag peak, then take the best peak in the remainder.
    let mut lag = 1;
    while lag < n / 2 && corr(lag) > 0.0 {
        lag += 1;
    }
    let (mut best_lag, mut best) = (0usize, f64::NEG_INFINITY);
    for l in lag..n / 2 {
        let c = corr(l);
        if c > best {
            best = c;
            best_lag = l;
        }
    }
    if best_lag == 0 {
        return None;
    }
    Some(t[best_lag] - t[0])
}

/// Pinch tolerance in max-normalized (V, I) coordinates.
pub const PINCH_TOLERANCE: f64 = 1e-3;

/// Hysteresis metrics of a driven (V, I) trace covering at least two cycles.
///
/// Cycles are segmented by `drive_period` when given, otherwise by the
/// autocorrelation-detected period of V. Areas use the shoelace rule per
/// cycle; the pinch test takes the minimum origin distance over polyline
/// segments in max-normalized coordinates.
pub fn loop_metrics(
    time: &[f64],
    v: &[f64],
    i: &[f64],
    drive_period: Option<f64>,
) -> Result<LoopMetrics> {
    if time.len() != v.len() || time.len() != i.len() {
        return Err(SimError::Parameter("time/V/I lengths differ".into()));
    }
    if time.len() < 4 {
        return Err(SimError::InsufficientData("trace too short".into()));
    }
    let span = time[time.len() - 1] - time[0];
    let period = match drive_period {
        Some(p) if p > 0.0 => p,
        Some(p) => {
            return Err(SimError::Parameter(format!(
                "drive period must be > 0, got {p}"
            )))
        }
        None => autocorrelation_period(time, v).ok_or_else(|| {
            SimError::InsufficientData("could not detect a cycle period from V".into())
        })?,
    };
    if span < 2.0 * period * (1.0 - 1e-9) {
        return Err(SimError::InsufficientData(format!(
            "trace covers {span:.3e} s, need at least two periods of {period:.3e} s"
        )));
    }

    let v_scale = v
        .iter()
        .fold(0.0f64, |a, &x| a.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    let i_scale = i
        .iter()
        .fold(0.0f64, |a, &x| a.max(x.abs()))
        .max(f64::MIN_POSITIVE);

    // Complete-cycle boundaries.
    let t0 = time[0];
    let n_cycles = (span / period * (1.0 + 1e-12)).floor() as usize;
    let mut cycle_areas = Vec::with_capacity(n_cycles);
    let mut last_cycle: Option<(usize, usize)> = None;
    for c in 0..n_cycles {
        let lo = t0 + c as f64 * period;
        let hi = lo + period;
        let a = time.partition_point(|&t| t < lo - 1e-12 * period);
        let b = time.partition_point(|&t| t < hi - 1e-12 * period);
        if b - a >= 3 {
            cycle_areas.push(shoelace(&v[a..b], &i[a..b]));
            last_cycle = Some((a, b));
        }
    }
    let (a, b) = last_cycle.ok_or_else(|| {
        SimError::InsufficientData("no complete cycle with enough samples".into())
    })?;
    let area = *cycle_areas.last().unwrap();

    let pinched = min_origin_distance(v, i, v_scale, i_scale) < PINCH_TOLERANCE;

    // Lobe count on the final cycle: split at origin passages, keep segments
    // holding > 5% of the cycle's unsigned area.
    let (cv, ci) = (&v[a..b], &i[a..b]);
    let mut splits = vec![0usize];
    for k in 1..cv.len() {
        let d = min_origin_distance(&cv[k - 1..=k], &ci[k - 1..=k], v_scale, i_scale);
        if d < PINCH_TOLERANCE && *splits.last().unwrap() + 2 < k {
            splits.push(k);
        }
    }
    splits.push(cv.len());
    let seg_areas: Vec<f64> = splits
        .windows(2)
        .filter(|w| w[1] - w[0] >= 3)
        .map(|w| shoelace(&cv[w[0]..w[1]], &ci[w[0]..w[1]]).abs())
        .collect();
    let total: f64 = seg_areas.iter().sum();
    let lobes = if total <= PINCH_TOLERANCE * v_scale * i_scale {
        0
    } else {
        seg_areas.iter().filter(|&&s| s > 0.05 * total).count()
    };

    Ok(LoopMetrics {
        area,
        abs_area: area.abs(),
        pinched,
        lobes,
        period,
        cycle_areas,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn passive_linear() -> MemristiveSystem {
        // f(μ, V) = V (1 - μ): no dynamics at V = 0, monotone in V.
        MemristiveSystem::new(0.3, |mu| 2.0 * mu, |mu, v| v * (1.0 - mu))
    }

    #[test]
    fn ohms_law_and_pinch() {
        let sys = MemristiveSystem::new(0.5, |_| 2.0, |_, v| v);
        assert_eq!(memristor_current(&sys, 3.0).unwrap(), 6.0);
        assert_eq!(memristor_current(&sys, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn potassium_conductance_example() {
        // G = g_max n^4 at n = 0.5, g_max = 36 mS, V = 10 mV -> 2.25e-5 A.
        let sys = MemristiveSystem::potassium(36e-3, |_| 0.0, |_| 0.0, 0.5);
        let i = memristor_current(&sys, 10e-3).unwrap();
        assert_relative_eq!(i, 36e-3 * 0.0625 * 0.01, max_relative = 1e-12);
    }

    #[test]
    fn negative_conductance_is_axiom_violation() {
        let sys = MemristiveSystem::new(0.5, |mu| -mu, |_, v| v);
        assert!(matches!(
            memristor_current(&sys, 1.0),
            Err(SimError::AxiomViolation(_))
        ));
    }

    #[test]
    fn zero_voltage_state_is_bit_identical() {
        let sys = passive_linear();
        let next = state_step(&sys, 0.0, 1e-3).unwrap();
        assert_eq!(next, sys.mu);
    }

    #[test]
    fn gate_form_relaxes_to_fixed_point() {
        // With V fixed the gate form has the closed-form solution
        // μ(t) = μ_inf + (μ0 - μ_inf) e^{-(α+β)t}.
        let (alpha, beta) = (2.0, 3.0);
        let mut sys = MemristiveSystem::new(
            0.9,
            |mu| mu,
            move |mu, v| {
                let a = alpha * v;
                let b = beta * v;
                a * (1.0 - mu) - b * mu
            },
        );
        let v = 1.0;
        let dt = 1e-3;
        let t_end = 2.0;
        let steps = (t_end / dt) as usize;
        for _ in 0..steps {
            sys.mu = state_step(&sys, v, dt).unwrap();
        }
        let mu_inf = alpha / (alpha + beta);
        let expect = mu_inf + (0.9 - mu_inf) * (-(alpha + beta) * t_end).exp();
        assert_relative_eq!(sys.mu, expect, max_relative = 1e-9);
    }

    #[test]
    fn axiom_checks_pass_and_fail() {
        let good = passive_linear();
        let mu_grid: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
        let v_grid: Vec<f64> = (-10..=10).map(|k| k as f64 / 5.0).collect();
        good.check_axioms(&mu_grid, &v_grid, 1e-12).unwrap();

        let biased = MemristiveSystem::new(0.5, |_| 1.0, |_, v| v + 0.1);
        assert!(biased.check_axioms(&mu_grid, &v_grid, 1e-12).is_err());

        let nonmono = MemristiveSystem::new(0.5, |_| 1.0, |_, v| v * v * v - v);
        assert!(nonmono.check_axioms(&mu_grid, &v_grid, 1e-12).is_err());
    }

    fn sample_curve(
        f: impl Fn(f64) -> (f64, f64),
        t_end: f64,
        n: usize,
    ) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let mut t = Vec::with_capacity(n + 1);
        let mut v = Vec::with_capacity(n + 1);
        let mut i = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let tk = t_end * k as f64 / n as f64;
            let (vk, ik) = f(tk);
            t.push(tk);
            v.push(vk);
            i.push(ik);
        }
        (t, v, i)
    }

    #[test]
    fn resistor_trace_has_zero_area_and_pinch() {
        let (t, v, i) = sample_curve(|t| ((t).sin(), 0.5 * (t).sin()), 6.0 * PI, 3000);
        let m = loop_metrics(&t, &v, &i, Some(2.0 * PI)).unwrap();
        assert!(m.abs_area < 1e-6);
        assert!(m.pinched);
        assert_eq!(m.lobes, 0);
        assert_eq!(m.cycle_areas.len(), 3);
    }

    #[test]
    fn ellipse_area_is_pi() {
        let (t, v, i) = sample_curve(|t| (t.sin(), t.cos()), 4.0 * PI, 4000);
        let m = loop_metrics(&t, &v, &i, Some(2.0 * PI)).unwrap();
        // (sin, cos) traverses the unit circle clockwise: signed area -π.
        assert_relative_eq!(m.area, -PI, max_relative = 1e-4);
        assert_relative_eq!(m.abs_area, PI, max_relative = 1e-4);
        assert!(!m.pinched);
        assert_eq!(m.lobes, 1);
    }

    #[test]
    fn figure_eight_has_two_lobes() {
        // I = sin(2t)/2 against V = sin(t) is a pinched figure eight.
        let (t, v, i) = sample_curve(|t| (t.sin(), 0.5 * (2.0 * t).sin()), 4.0 * PI, 8000);
        let m = loop_metrics(&t, &v, &i, Some(2.0 * PI)).unwrap();
        assert!(m.pinched);
        assert_eq!(m.lobes, 2);
    }

    #[test]
    fn short_trace_is_insufficient() {
        let (t, v, i) = sample_curve(|t| (t.sin(), t.cos()), PI, 100);
        assert!(matches!(
            loop_metrics(&t, &v, &i, Some(2.0 * PI)),
            Err(SimError::InsufficientData(_))
        ));
    }

    #[test]
    fn autocorrelation_detects_period() {
        let (t, v, i) = sample_curve(|t| (t.sin(), t.cos()), 8.0 * PI, 8000);
        let m = loop_metrics(&t, &v, &i, None).unwrap();
        assert_relative_eq!(m.period, 2.0 * PI, max_relative = 2e-2);
    }
}
