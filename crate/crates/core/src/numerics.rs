//! Fixed-step integration and quadrature kernels shared across modules.

use crate::error::{Result, SimError};
use num_complex::Complex64;

/// One classic fourth-order Runge-Kutta step of `y' = f(t, y)`.
pub fn rk4_step<const N: usize, F>(f: &F, t: f64, y: &[f64; N], dt: f64) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let k1 = f(t, y);
    let mut y2 = *y;
    for i in 0..N {
        y2[i] = y[i] + 0.5 * dt * k1[i];
    }
    let k2 = f(t + 0.5 * dt, &y2);
    let mut y3 = *y;
    for i in 0..N {
        y3[i] = y[i] + 0.5 * dt * k2[i];
    }
    let k3 = f(t + 0.5 * dt, &y3);
    let mut y4 = *y;
    for i in 0..N {
        y4[i] = y[i] + dt * k3[i];
    }
    let k4 = f(t + dt, &y4);
    let mut out = *y;
    for i in 0..N {
        out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Adaptive Simpson quadrature of `f` on `[a, b]` to relative tolerance `rtol`.
///
/// The error estimate is the standard |S2 - S1| / 15 comparison between one
/// Simpson panel and its two halves; panels are split until the estimate falls
/// below `rtol * |total|` (with a small absolute floor for integrals near zero).
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rtol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(SimError::Parameter(
            "quadrature limits must be finite".into(),
        ));
    }
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    if !(fa.is_finite() && fb.is_finite() && fm.is_finite()) {
        return Err(SimError::Quadrature(format!(
            "integrand not finite on [{a:e}, {b:e}]"
        )));
    }
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    // Magnitude estimate for the relative-error target: a 129-point |f| scan
    // so narrow features the three-point rule misses still set the scale.
    let mut scan = 0.0;
    let n_scan = 128;
    for k in 0..=n_scan {
        let x = a + (b - a) * k as f64 / n_scan as f64;
        let fx = f(x);
        if !fx.is_finite() {
            return Err(SimError::Quadrature(format!(
                "integrand not finite at {x:e}"
            )));
        }
        let w = if k == 0 || k == n_scan { 0.5 } else { 1.0 };
        scan += w * fx.abs() * (b - a).abs() / n_scan as f64;
    }
    let scale = whole.abs().max(scan);
    let atol = rtol * scale.max(f64::MIN_POSITIVE);
    simpson_recurse(f, a, b, fa, fm, fb, whole, atol, 60)
}

#[allow(clippy::too_many_arguments)]
fn simpson_recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    if !(flm.is_finite() && frm.is_finite()) {
        return Err(SimError::Quadrature(format!(
            "integrand not finite near [{a:e}, {b:e}]"
        )));
    }
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    // Width at the floating-point resolution limit cannot be subdivided further.
    let width_floor = (b - a).abs() <= 8.0 * f64::EPSILON * (a.abs() + b.abs());
    if delta.abs() <= 15.0 * tol || width_floor || depth == 0 {
        if depth == 0 && delta.abs() > 15.0 * tol && !width_floor {
            return Err(SimError::Quadrature(format!(
                "no convergence on [{a:e}, {b:e}] (residual {:e})",
                delta.abs()
            )));
        }
        return Ok(left + right + delta / 15.0);
    }
    let l = simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let r = simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Ok(l + r)
}

/// Trapezoid rule for a complex integrand sampled on an ascending grid.
pub fn trapezoid_complex(omega: &[f64], values: &[Complex64]) -> Complex64 {
    assert_eq!(omega.len(), values.len());
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 1..omega.len() {
        acc += 0.5 * (omega[k] - omega[k - 1]) * (values[k] + values[k - 1]);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rk4_exponential_decay() {
        // y' = -y, exact y(1) = e^-1.
        let f = |_t: f64, y: &[f64; 1]| [-y[0]];
        let mut y = [1.0];
        let n = 100;
        let dt = 1.0 / n as f64;
        for k in 0..n {
            y = rk4_step(&f, k as f64 * dt, &y, dt);
        }
        assert_relative_eq!(y[0], (-1.0f64).exp(), max_relative = 1e-9);
    }

    #[test]
    fn rk4_fourth_order_convergence() {
        // Halving dt should shrink the error ~16x on a smooth problem.
        let f = |t: f64, y: &[f64; 1]| [t * y[0]];
        let run = |steps: usize| {
            let dt = 1.0 / steps as f64;
            let mut y = [1.0];
            for k in 0..steps {
                y = rk4_step(&f, k as f64 * dt, &y, dt);
            }
            (y[0] - (0.5f64).exp()).abs()
        };
        let ratio = run(50) / run(100);
        assert!((10.0..25.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn simpson_matches_analytic() {
        let v = adaptive_simpson(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-10).unwrap();
        assert_relative_eq!(v, 2.0, max_relative = 1e-9);
        let v = adaptive_simpson(&|x: f64| (-x).exp(), 0.0, 40.0, 1e-10).unwrap();
        assert_relative_eq!(v, 1.0, max_relative = 1e-8);
    }

    #[test]
    fn simpson_rejects_non_finite() {
        assert!(adaptive_simpson(&|x: f64| 1.0 / x, -1.0, 1.0, 1e-6).is_err());
    }

    #[test]
    fn trapezoid_linear_exact() {
        let omega = [0.0, 1.0, 3.0];
        let vals: Vec<Complex64> = omega.iter().map(|&w| Complex64::new(w, 2.0 * w)).collect();
        let got = trapezoid_complex(&omega, &vals);
        assert_relative_eq!(got.re, 4.5, max_relative = 1e-14);
        assert_relative_eq!(got.im, 9.0, max_relative = 1e-14);
    }
}
