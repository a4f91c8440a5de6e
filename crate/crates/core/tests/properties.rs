//! Property tests for the invariants the closed forms must satisfy.

use hhq_core::hh::{self, Drive, HHParams, RateFunctions};
use hhq_core::memristor::{memristor_current, MemristiveSystem};
use hhq_core::tline::{dual_line_scattering, reflection_single};
use proptest::prelude::*;

fn log_range(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

proptest! {
    #[test]
    fn single_line_reflection_is_unimodular(
        omega in log_range(1e-3, 1e12),
        cc in log_range(1e-15, 1e-6),
        z0 in log_range(1.0, 1e4),
    ) {
        let r = reflection_single(omega, cc, z0);
        prop_assert!((r.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dual_line_scattering_is_unitary(
        omega in log_range(1e-2, 1e11),
        cg in log_range(1e-15, 1e-6),
        cc in log_range(1e-15, 1e-6),
        z0 in log_range(1.0, 1e4),
        z1 in log_range(1.0, 1e4),
    ) {
        let sc = dual_line_scattering(omega, cg, cc, z0, z1);
        prop_assert!((sc.r0.norm_sqr() + sc.s.norm_sqr() - 1.0).abs() < 1e-12);
        prop_assert!((sc.r1.norm_sqr() + sc.s.norm_sqr() - 1.0).abs() < 1e-12);
        prop_assert!((sc.r0 * sc.s.conj() + sc.s * sc.r1.conj()).norm() < 1e-12);
    }

    #[test]
    fn memristor_power_is_nonnegative(
        g_scale in log_range(1e-6, 10.0),
        mu in 0.0..1.0f64,
        v in -10.0..10.0f64,
    ) {
        let sys = MemristiveSystem::new(mu, move |m| g_scale * m * m, |_, vv| vv);
        let i = memristor_current(&sys, v).unwrap();
        prop_assert!(i * v >= 0.0, "dissipated power went negative");
    }

    #[test]
    fn gate_stays_in_unit_box(
        n0 in 0.0..1.0f64,
        // Drive range keeping voltages within the rate functions' tens-of-mV
        // scale; beyond it the gate equation turns stiff at this fixed step.
        i0 in log_range(1e-7, 2e-5),
        freq in log_range(50.0, 500.0),
    ) {
        let params = HHParams::standard(1.0);
        let rf = RateFunctions::hh1952();
        let omega = 2.0 * std::f64::consts::PI * freq;
        let period = 2.0 * std::f64::consts::PI / omega;
        let drive = Drive::sinusoid(i0, omega);
        let ts = hh::simulate_single_channel(
            &params, &rf, &drive, 0.0, Some(n0), (0.0, 3.0 * period), period / 2000.0,
        ).unwrap();
        for &n in ts.values("n").unwrap() {
            prop_assert!((0.0..=1.0).contains(&n), "n left [0,1]: {n}");
        }
    }

    #[test]
    fn rates_are_nonnegative_everywhere(v in -0.5..0.5f64) {
        let rf = RateFunctions::hh1952();
        let out = hh::eval_rates(&rf, v).unwrap();
        for r in out {
            prop_assert!(r >= 0.0);
        }
    }
}
