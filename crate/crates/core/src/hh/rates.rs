//! Gate opening/closing rate functions.
//!
//! The canonical 1952 forms are written in the displacement-from-rest
//! convention: the resting membrane voltage is 0, depolarization is positive,
//! voltages are in mV and rates in 1/ms. [`RateFunctions`] wraps them into SI
//! (volts in, 1/s out) and accepts user-supplied alternatives so other
//! conventions can be injected.

use std::sync::Arc;

/// Guard band around a removable singularity, in mV.
const SINGULARITY_BAND_MV: f64 = 1e-6;

/// α_n(V) = 0.01 (10 − V) / (exp((10 − V)/10) − 1), V in mV, result in 1/ms.
///
/// The V = 10 mV singularity is removable; inside a ±1e-6 mV band the
/// second-order series of u / (e^(u/10) − 1) is used instead.
pub fn alpha_n(v_mv: f64) -> f64 {
    let u = 10.0 - v_mv;
    if u.abs() < SINGULARITY_BAND_MV {
        // 0.01 u / (e^(u/10) - 1) = 0.1 (1 - u/20 + u^2/1200 - ...)
        0.1 * (1.0 - u / 20.0 + u * u / 1200.0)
    } else {
        0.01 * u / (u / 10.0).exp_m1()
    }
}

/// β_n(V) = 0.125 exp(−V/80), V in mV, result in 1/ms.
pub fn beta_n(v_mv: f64) -> f64 {
    0.125 * (-v_mv / 80.0).exp()
}

/// α_m(V) = 0.1 (25 − V) / (exp((25 − V)/10) − 1), V in mV, result in 1/ms.
pub fn alpha_m(v_mv: f64) -> f64 {
    let u = 25.0 - v_mv;
    if u.abs() < SINGULARITY_BAND_MV {
        1.0 * (1.0 - u / 20.0 + u * u / 1200.0)
    } else {
        0.1 * u / (u / 10.0).exp_m1()
    }
}

/// β_m(V) = 4 exp(−V/18), V in mV, result in 1/ms.
pub fn beta_m(v_mv: f64) -> f64 {
    4.0 * (-v_mv / 18.0).exp()
}

/// α_h(V) = 0.07 exp(−V/20), V in mV, result in 1/ms.
pub fn alpha_h(v_mv: f64) -> f64 {
    0.07 * (-v_mv / 20.0).exp()
}

/// β_h(V) = 1 / (exp((30 − V)/10) + 1), V in mV, result in 1/ms.
pub fn beta_h(v_mv: f64) -> f64 {
    1.0 / (((30.0 - v_mv) / 10.0).exp() + 1.0)
}

/// A rate function: voltage (V) to rate (1/s).
pub type RateFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The six gate rate functions in SI units (volts in, 1/s out).
#[derive(Clone)]
pub struct RateFunctions {
    pub alpha_n: RateFn,
    pub beta_n: RateFn,
    pub alpha_m: RateFn,
    pub beta_m: RateFn,
    pub alpha_h: RateFn,
    pub beta_h: RateFn,
}

impl RateFunctions {
    /// The 1952 forms in the displacement-from-rest convention (resting V = 0).
    pub fn hh1952() -> Self {
        // mV/ms closed forms wrapped to SI: V * 1e3 mV, rate * 1e3 1/s.
        fn si(f: fn(f64) -> f64) -> RateFn {
            Arc::new(move |v: f64| 1e3 * f(v * 1e3))
        }
        RateFunctions {
            alpha_n: si(alpha_n),
            beta_n: si(beta_n),
            alpha_m: si(alpha_m),
            beta_m: si(beta_m),
            alpha_h: si(alpha_h),
            beta_h: si(beta_h),
        }
    }

    /// Stationary value n_∞(V) = α_n / (α_n + β_n) of the potassium gate.
    pub fn n_inf(&self, v: f64) -> f64 {
        let a = (self.alpha_n)(v);
        let b = (self.beta_n)(v);
        a / (a + b)
    }

    pub fn m_inf(&self, v: f64) -> f64 {
        let a = (self.alpha_m)(v);
        let b = (self.beta_m)(v);
        a / (a + b)
    }

    pub fn h_inf(&self, v: f64) -> f64 {
        let a = (self.alpha_h)(v);
        let b = (self.beta_h)(v);
        a / (a + b)
    }
}

impl std::fmt::Debug for RateFunctions {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("RateFunctions {..}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn alpha_n_at_rest() {
        // 0.01 * 10 / (e - 1) = 0.1 / (e - 1)
        let expect = 0.1 / (1f64.exp() - 1.0);
        assert_relative_eq!(alpha_n(0.0), expect, max_relative = 1e-12);
        assert_relative_eq!(alpha_n(0.0), 0.0582, max_relative = 1e-3);
    }

    #[test]
    fn beta_n_at_rest() {
        assert_relative_eq!(beta_n(0.0), 0.125, max_relative = 1e-15);
    }

    #[test]
    fn alpha_n_removable_singularity() {
        // l'Hôpital limit of 0.01 (10 - V)/(exp((10 - V)/10) - 1) at V = 10 mV.
        assert_relative_eq!(alpha_n(10.0), 0.1, max_relative = 1e-12);
        // Continuity across the guard band; the rate itself varies by
        // ~u/20 = 1e-7 across a 2e-6 mV displacement.
        let just_below = alpha_n(10.0 - 2e-6);
        let just_above = alpha_n(10.0 + 2e-6);
        assert_relative_eq!(alpha_n(10.0), just_below, max_relative = 5e-7);
        assert_relative_eq!(alpha_n(10.0), just_above, max_relative = 5e-7);
    }

    #[test]
    fn alpha_m_removable_singularity() {
        assert_relative_eq!(alpha_m(25.0), 1.0, max_relative = 1e-12);
        assert_relative_eq!(alpha_m(25.0 - 1e-7), 1.0, max_relative = 1e-8);
    }

    #[test]
    fn rates_nonnegative_over_wide_range() {
        for k in -5000..=5000 {
            let v = k as f64 / 10.0; // -500..500 mV
            for (name, r) in [
                ("alpha_n", alpha_n(v)),
                ("beta_n", beta_n(v)),
                ("alpha_m", alpha_m(v)),
                ("beta_m", beta_m(v)),
                ("alpha_h", alpha_h(v)),
                ("beta_h", beta_h(v)),
            ] {
                assert!(r.is_finite() && r >= 0.0, "{name}({v}) = {r}");
            }
        }
    }

    #[test]
    fn si_wrapper_converts_units() {
        let rf = RateFunctions::hh1952();
        // 0 V -> alpha_n = 0.0582 / ms = 58.2 / s
        assert_relative_eq!(
            (rf.alpha_n)(0.0),
            1e3 * 0.1 / (1f64.exp() - 1.0),
            max_relative = 1e-12
        );
        // 10 mV -> 0.1 / ms = 100 / s
        assert_relative_eq!((rf.alpha_n)(0.010), 100.0, max_relative = 1e-12);
        assert_relative_eq!((rf.beta_n)(0.0), 125.0, max_relative = 1e-12);
    }

    #[test]
    fn n_inf_at_rest() {
        let rf = RateFunctions::hh1952();
        let a = 0.1 / (1f64.exp() - 1.0);
        assert_relative_eq!(rf.n_inf(0.0), a / (a + 0.125), max_relative = 1e-12);
    }
}
