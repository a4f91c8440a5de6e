//! Metrics reports: hysteresis-loop summaries, saturation detection, limit
//! cycles, regime checks, and run provenance. The JSON layout is fixed by
//! struct order so identical runs serialize byte-identically.

use crate::error::CliError;
use hhq_core::memristor::{loop_metrics, LoopMetrics};
use hhq_core::squid::RegimeReport;
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Provenance {
    pub config_sha256: String,
    pub seed: u64,
    pub code_version: String,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct LoopSummary {
    pub area: f64,
    pub abs_area: f64,
    pub pinched: bool,
    pub lobes: usize,
    pub period: f64,
    pub cycle_areas: Vec<f64>,
}

impl From<&LoopMetrics> for LoopSummary {
    fn from(m: &LoopMetrics) -> Self {
        LoopSummary {
            area: m.area,
            abs_area: m.abs_area,
            pinched: m.pinched,
            lobes: m.lobes,
            period: m.period,
            cycle_areas: m.cycle_areas.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct LimitCycleSummary {
    pub detected: bool,
    /// First time after which every later cycle's area stays within 1% of
    /// the final cycle's (s).
    pub saturation_time: Option<f64>,
    pub period: f64,
    /// Final-cycle signed area (A·V).
    pub area: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RegimeCheckJson {
    pub name: String,
    pub ratio: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RegimeJson {
    pub pass: bool,
    pub g0_dimensionless: f64,
    pub g0_conductance_formula: f64,
    pub g0_canonical: f64,
    pub cc_omega_over_g: f64,
    pub checks: Vec<RegimeCheckJson>,
}

impl From<&RegimeReport> for RegimeJson {
    fn from(r: &RegimeReport) -> Self {
        RegimeJson {
            pass: r.pass,
            g0_dimensionless: r.g0_dimensionless,
            g0_conductance_formula: r.g0_conductance_formula,
            g0_canonical: hhq_core::squid::G0_CANONICAL,
            cc_omega_over_g: r.cc_omega_over_g,
            checks: r
                .checks
                .iter()
                .map(|c| RegimeCheckJson {
                    name: c.name.clone(),
                    ratio: c.ratio,
                    threshold: c.threshold,
                    pass: c.pass,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SmeRunJson {
    pub positivity_breach: Option<PositivityJson>,
    pub max_trace_drift: f64,
    pub final_purity: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct PositivityJson {
    pub t: f64,
    pub min_eigenvalue: f64,
}

/// The JSON document written next to every trace.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct MetricsReport {
    pub provenance: Provenance,
    pub model: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub loop_metrics: Option<LoopSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit_cycle: Option<LimitCycleSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regime: Option<RegimeJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sme_run: Option<SmeRunJson>,
    /// UV cutoff used for divergent vacuum integrals (rad/s), when one applies.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uv_cutoff: Option<f64>,
}

pub fn config_hash(text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn provenance(config_text: &str, seed: u64) -> Provenance {
    Provenance {
        config_sha256: config_hash(config_text),
        seed,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
    }
}

/// Hysteresis metrics plus saturation detection for a (V, I) pair.
///
/// Saturation time is the start of the first cycle from which every later
/// complete cycle's loop area stays within 1% of the final cycle's (with an
/// absolute floor for zero-area resistive traces). A trace that never
/// settles reports `detected: false` rather than an error.
pub fn analyze_loops(
    time: &[f64],
    v: &[f64],
    i: &[f64],
    drive_period: f64,
) -> Result<(LoopSummary, LimitCycleSummary), CliError> {
    let m = loop_metrics(time, v, i, Some(drive_period))?;
    let v_scale = v.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    let i_scale = i.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    let floor = 1e-12 * v_scale * i_scale;
    let last = *m.cycle_areas.last().unwrap();
    let tol = 0.01 * last.abs() + floor;
    let mut sat_cycle = None;
    for c in 0..m.cycle_areas.len() {
        if m.cycle_areas[c..].iter().all(|a| (a - last).abs() <= tol) {
            sat_cycle = Some(c);
            break;
        }
    }
    let limit = LimitCycleSummary {
        detected: sat_cycle.is_some(),
        saturation_time: sat_cycle.map(|c| time[0] + c as f64 * drive_period),
        period: drive_period,
        area: last,
    };
    Ok(((&m).into(), limit))
}
