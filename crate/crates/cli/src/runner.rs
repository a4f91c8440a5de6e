//! Scenario dispatch: build the model from a validated config, run it,
//! write the CSV trace and JSON metrics.

use crate::csvio::write_csv;
use crate::error::CliError;
use crate::metrics::{analyze_loops, provenance, MetricsReport, PositivityJson, SmeRunJson};
use crate::scenario::{Model, ScenarioConfig};
use hhq_core::hh::{self, rates, Drive, GateVars, RateFunctions};
use hhq_core::sme;
use hhq_core::squid;
use hhq_core::timeseries::TimeSeries;
use hhq_core::tline;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::sync::Arc;

/// Where a run wrote its outputs, plus the report it serialized.
#[derive(Debug)]
pub struct RunOutput {
    pub csv_path: PathBuf,
    pub json_path: PathBuf,
    pub report: MetricsReport,
}

/// The (voltage, element-current) pair metrics are computed on, when the
/// model has a memristive element, together with auxiliary run info.
struct ModelRun {
    trace: TimeSeries,
    loop_pair: Option<(Vec<f64>, Vec<f64>)>,
    loop_period: Option<f64>,
    sme_run: Option<SmeRunJson>,
    uv_cutoff: Option<f64>,
}

fn si_rate_pair() -> (impl Fn(f64) -> f64, impl Fn(f64) -> f64) {
    (
        |v: f64| 1e3 * rates::alpha_n(v * 1e3),
        |v: f64| 1e3 * rates::beta_n(v * 1e3),
    )
}

fn run_model(cfg: &ScenarioConfig) -> Result<ModelRun, CliError> {
    let rf = RateFunctions::hh1952();
    match cfg.model {
        Model::Classical => {
            let drive = Drive::sinusoid(cfg.drive_i0, cfg.drive_omega);
            let ts = hh::simulate_single_channel(
                &cfg.hh.params,
                &rf,
                &drive,
                cfg.hh.v_init,
                cfg.hh.n_init,
                (0.0, cfg.time_span()),
                cfg.step(),
            )?;
            let pair = potassium_pair(&ts, cfg.hh.params.v_k)?;
            Ok(ModelRun {
                trace: ts,
                loop_pair: Some(pair),
                loop_period: Some(cfg.drive_period()),
                sme_run: None,
                uv_cutoff: None,
            })
        }
        Model::ClassicalFull => {
            let drive = Drive::sinusoid(cfg.drive_i0, cfg.drive_omega);
            let gates = match (cfg.hh.n_init, cfg.hh.m_init, cfg.hh.h_init) {
                (None, None, None) => None,
                (n, m, h) => {
                    let eq = GateVars::stationary(&rf, cfg.hh.v_init);
                    Some(GateVars {
                        n: n.unwrap_or(eq.n),
                        m: m.unwrap_or(eq.m),
                        h: h.unwrap_or(eq.h),
                    })
                }
            };
            let ts = hh::simulate_full_hh(
                &cfg.hh.params,
                &rf,
                &drive,
                cfg.hh.v_init,
                gates,
                (0.0, cfg.time_span()),
                cfg.step(),
            )?;
            let pair = potassium_pair(&ts, cfg.hh.params.v_k)?;
            Ok(ModelRun {
                trace: ts,
                loop_pair: Some(pair),
                loop_period: Some(cfg.drive_period()),
                sme_run: None,
                uv_cutoff: None,
            })
        }
        Model::ClassicalAdiabatic => {
            let drive = Drive::sinusoid(cfg.drive_i0, cfg.drive_omega);
            let ts = hh::simulate_single_channel_adiabatic(
                &cfg.hh.params,
                &rf,
                &drive,
                cfg.hh.n_init,
                (0.0, cfg.time_span()),
                cfg.step(),
            )?;
            let pair = potassium_pair(&ts, cfg.hh.params.v_k)?;
            Ok(ModelRun {
                trace: ts,
                loop_pair: Some(pair),
                loop_period: Some(cfg.drive_period()),
                sme_run: None,
                uv_cutoff: None,
            })
        }
        Model::Quantized => {
            let q = cfg.quantized.as_ref().unwrap();
            let tl = tline::TLParams {
                z0: q.z_min,
                cc: q.cc,
                cg: cfg.hh.params.cg,
                v0: 0.0,
                z1: q.z_min,
            };
            let init = tline::ImpedanceState::from_gate(q.z_min, q.n_init)?;
            let (alpha, beta) = si_rate_pair();
            let ts = tline::simulate_quantized_hh(
                &tl,
                cfg.drive_i0,
                cfg.drive_omega,
                init,
                (&alpha, &beta),
                (0.0, cfg.time_span()),
                cfg.step(),
                q.refresh_stride,
            )?;
            let v = ts.values("V")?.to_vec();
            let g = ts.values("g")?;
            let i_el: Vec<f64> = v.iter().zip(g).map(|(vv, gg)| vv * gg).collect();
            Ok(ModelRun {
                trace: ts,
                loop_pair: Some((v, i_el)),
                loop_period: Some(cfg.drive_period()),
                sme_run: None,
                uv_cutoff: None,
            })
        }
        Model::QmemSme => {
            let s = cfg.sme.as_ref().unwrap();
            let hbar = if s.natural_units {
                1.0
            } else {
                hhq_core::constants::HBAR
            };
            let ops = sme::build_operators(s.dim, s.c, s.l, hbar)?;
            let osc_period = 2.0 * PI / ops.omega;
            let dt = cfg.dt.unwrap_or(cfg.dt_per_period * osc_period);
            let gamma0 = s.gamma0;
            let rate0 = s.rate0;
            let params = sme::SmeParams {
                c: s.c,
                l: s.l,
                tau: s.tau,
                q0: s.q0,
                gamma: Arc::new(move |mu: f64| gamma0 * mu.clamp(0.0, 1.0)),
                lambda: s.lambda,
                dt,
                seed: cfg.seed,
                hbar,
                classical_sources: !s.wiener_noise,
                state_law: Arc::new(move |mu: f64, v: f64| {
                    rate0 * (v.max(0.0) * (1.0 - mu) - (-v).max(0.0) * mu)
                }),
                mu0: s.mu0,
                conductance: None,
                monitor_stride: s.monitor_stride,
            };
            let rho0 = sme::DensityMatrix::coherent(s.dim, Complex64::new(s.alpha_re, s.alpha_im));
            let t_end = cfg.t_end.unwrap_or(cfg.periods * osc_period);
            let (ts, info) = sme::simulate_trajectory(&rho0, &ops, &params, t_end, None)?;
            let v = ts.values("V")?.to_vec();
            let i = ts.values("I_mem")?.to_vec();
            Ok(ModelRun {
                trace: ts,
                loop_pair: Some((v, i)),
                loop_period: Some(osc_period),
                sme_run: Some(SmeRunJson {
                    positivity_breach: info.positivity_breach.map(|b| PositivityJson {
                        t: b.t,
                        min_eigenvalue: b.min_eigenvalue,
                    }),
                    max_trace_drift: info.max_trace_drift,
                    final_purity: info.final_purity,
                }),
                uv_cutoff: None,
            })
        }
        Model::TwoTl => {
            let t = cfg.two_tl.as_ref().unwrap();
            let tl = tline::TLParams {
                z0: t.z0,
                cc: t.cc,
                cg: t.cg,
                v0: 0.0,
                z1: t.z1,
            };
            let lo = (t.spec_center - 6.0 * t.spec_width).max(t.spec_center * 1e-6);
            let hi = t.spec_center + 6.0 * t.spec_width;
            let omega: Vec<f64> = (0..t.grid_points)
                .map(|k| lo + (hi - lo) * k as f64 / (t.grid_points - 1) as f64)
                .collect();
            let amplitude: Vec<Complex64> = omega
                .iter()
                .map(|&w| {
                    let x = (w - t.spec_center) / t.spec_width;
                    Complex64::new(t.spec_amp * (-x * x).exp(), 0.0)
                })
                .collect();
            let spectrum = tline::DriveSpectrum {
                omega,
                amplitude,
                classical: None,
            };
            let span = cfg.t_end.unwrap_or(cfg.periods * 2.0 * PI / t.spec_center);
            let mut ts = TimeSeries::new(&[("V", "V"), ("V2", "V^2"), ("V2_vacuum", "V^2")]);
            for k in 0..=t.samples {
                let tk = span * k as f64 / t.samples as f64;
                let r = tline::dual_line_response(&spectrum, &tl, tk, t.omega_max)?;
                ts.push(tk, &[r.voltage, r.second_moment, r.vacuum_part]);
            }
            Ok(ModelRun {
                trace: ts,
                loop_pair: None,
                loop_period: None,
                sme_run: None,
                uv_cutoff: Some(t.omega_max),
            })
        }
        Model::ScFeasibility => {
            let s = cfg.sc.as_ref().unwrap();
            let t_end = cfg.t_end.unwrap_or(s.params.t_spike);
            let ts = squid::simulate_sc_hh(&s.params, (0.0, t_end), cfg.dt)?;
            let v = ts.values("V_norm")?.to_vec();
            let i = ts.values("I_norm")?.to_vec();
            Ok(ModelRun {
                trace: ts,
                loop_pair: Some((v, i)),
                loop_period: Some(2.0 * PI / s.params.omega),
                sme_run: None,
                uv_cutoff: None,
            })
        }
    }
}

fn potassium_pair(ts: &TimeSeries, v_k: f64) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let v = ts.values("V")?;
    let gk = ts.values("gK")?;
    let dv: Vec<f64> = v.iter().map(|x| x - v_k).collect();
    let i_el: Vec<f64> = dv.iter().zip(gk).map(|(d, g)| d * g).collect();
    Ok((dv, i_el))
}

/// Runs a validated scenario and writes `csv`/`json` outputs under `out_dir`.
pub fn run_scenario(cfg: &ScenarioConfig, out_dir: &Path) -> Result<RunOutput, CliError> {
    let run = run_model(cfg)?;

    let mut report = MetricsReport {
        provenance: provenance(&cfg.raw_text, cfg.seed),
        model: cfg.model.name().to_string(),
        loop_metrics: None,
        limit_cycle: None,
        regime: None,
        sme_run: run.sme_run.clone(),
        uv_cutoff: run.uv_cutoff,
    };
    if let (Some((v, i)), Some(period)) = (&run.loop_pair, run.loop_period) {
        let span = run.trace.time.last().unwrap() - run.trace.time[0];
        // Loop analysis needs at least two drive periods; shorter windows
        // (the 5 ms superconducting spike at a 6.3 ms drive period) simply
        // omit it.
        if span >= 2.0 * period * (1.0 - 1e-9) {
            let (loops, limit) = analyze_loops(&run.trace.time, v, i, period)?;
            report.loop_metrics = Some(loops);
            report.limit_cycle = Some(limit);
        }
    }
    if let Some(sc) = &cfg.sc {
        report.regime = Some((&squid::regime_check(&sc.params, sc.lshift_threshold)).into());
    }

    std::fs::create_dir_all(out_dir)?;
    let csv_path = out_dir.join(&cfg.outputs.csv);
    let json_path = out_dir.join(&cfg.outputs.json);
    write_csv(&csv_path, &run.trace, cfg.outputs.channels.as_deref())?;
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::Io(format!("metrics serialization failed: {e}")))?;
    std::fs::write(&json_path, json + "\n")?;
    Ok(RunOutput {
        csv_path,
        json_path,
        report,
    })
}

/// Regime report for a `sc-feasibility` scenario, without running the trace.
pub fn check_regime(cfg: &ScenarioConfig) -> Result<crate::metrics::RegimeJson, CliError> {
    let sc = cfg.sc.as_ref().ok_or_else(|| {
        CliError::parse(format!(
            "check-regime needs model = sc-feasibility, got {}",
            cfg.model.name()
        ))
    })?;
    Ok((&squid::regime_check(&sc.params, sc.lshift_threshold)).into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::parse_scenario;

    #[test]
    fn classical_run_writes_expected_columns() {
        let cfg = parse_scenario(
            "[scenario]\nmodel = classical\nperiods = 3\n[drive]\nI0 = 10 uA\nOmega = 1256.6 rad/s\n[params]\nn_init = 0\n",
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let out = run_scenario(&cfg, dir.path()).unwrap();
        let text = std::fs::read_to_string(&out.csv_path).unwrap();
        let header = text.lines().next().unwrap();
        assert_eq!(header, "t (s),V (V),n (1),gK (S),I (A)");
        assert!(out.report.loop_metrics.is_some());
        assert!(out.report.loop_metrics.unwrap().pinched);
    }

    #[test]
    fn sc_default_run_reports_regime_without_loops() {
        let cfg = parse_scenario("[scenario]\nmodel = sc-feasibility\n").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let out = run_scenario(&cfg, dir.path()).unwrap();
        // 5 ms window is shorter than two 6.28 ms drive periods.
        assert!(out.report.loop_metrics.is_none());
        let regime = out.report.regime.unwrap();
        assert!(regime.pass);
        assert!((regime.cc_omega_over_g - 0.0328).abs() / 0.0328 < 0.02);
    }

    #[test]
    fn two_tl_reports_cutoff() {
        let cfg = parse_scenario(
            "[scenario]\nmodel = two-tl\nperiods = 2\n[params]\nspec_center = 1000 rad/s\nsamples = 16\ngrid_points = 501\n",
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let out = run_scenario(&cfg, dir.path()).unwrap();
        assert_eq!(out.report.uv_cutoff, Some(1e5));
        let text = std::fs::read_to_string(&out.csv_path).unwrap();
        assert!(text.lines().next().unwrap().contains("V2_vacuum"));
    }
}
