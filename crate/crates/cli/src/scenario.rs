//! Line-oriented scenario format: `[section]` headers and `key = value`
//! pairs with unit suffixes. Parsing is strict: unknown sections or keys,
//! duplicate keys, unit mismatches, and non-finite numbers are errors that
//! name the offending line.

use crate::error::CliError;
use crate::units::{parse_quantity, Dim};
use hhq_core::hh::{HHParams, RateFunctions};
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Simulation model selected by `[scenario] model`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Model {
    Classical,
    ClassicalFull,
    ClassicalAdiabatic,
    Quantized,
    QmemSme,
    TwoTl,
    ScFeasibility,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Classical => "classical",
            Model::ClassicalFull => "classical-full",
            Model::ClassicalAdiabatic => "classical-adiabatic",
            Model::Quantized => "quantized",
            Model::QmemSme => "qmem-sme",
            Model::TwoTl => "two-tl",
            Model::ScFeasibility => "sc-feasibility",
        }
    }

    fn from_name(s: &str) -> Option<Model> {
        Some(match s {
            "classical" => Model::Classical,
            "classical-full" => Model::ClassicalFull,
            "classical-adiabatic" => Model::ClassicalAdiabatic,
            "quantized" => Model::Quantized,
            "qmem-sme" => Model::QmemSme,
            "two-tl" => Model::TwoTl,
            "sc-feasibility" => Model::ScFeasibility,
            _ => return None,
        })
    }
}

const ALL: &[Model] = &[
    Model::Classical,
    Model::ClassicalFull,
    Model::ClassicalAdiabatic,
    Model::Quantized,
    Model::QmemSme,
    Model::TwoTl,
    Model::ScFeasibility,
];
const HH: &[Model] = &[
    Model::Classical,
    Model::ClassicalFull,
    Model::ClassicalAdiabatic,
    Model::Quantized,
];
const CLASSICAL: &[Model] = &[
    Model::Classical,
    Model::ClassicalFull,
    Model::ClassicalAdiabatic,
];
const HH_AND_TTL: &[Model] = &[
    Model::Classical,
    Model::ClassicalFull,
    Model::ClassicalAdiabatic,
    Model::Quantized,
    Model::TwoTl,
];
const DRIVEN: &[Model] = &[
    Model::Classical,
    Model::ClassicalFull,
    Model::ClassicalAdiabatic,
    Model::Quantized,
    Model::ScFeasibility,
];

/// What a registry entry accepts.
enum Kind {
    Num(Dim),
    /// Enumerated string values.
    Choice(&'static [&'static str]),
    /// Free string (paths).
    Text,
    /// Comma-separated list of channel names.
    List,
}

struct KeySpec {
    section: &'static str,
    key: &'static str,
    kind: Kind,
    models: &'static [Model],
}

/// The full key registry; anything else is rejected.
fn registry() -> Vec<KeySpec> {
    use Kind::*;
    let mut r = Vec::new();
    let mut add = |section, key, kind, models| {
        r.push(KeySpec {
            section,
            key,
            kind,
            models,
        })
    };

    add(
        "scenario",
        "model",
        Choice(&[
            "classical",
            "classical-full",
            "classical-adiabatic",
            "quantized",
            "qmem-sme",
            "two-tl",
            "sc-feasibility",
        ]),
        ALL,
    );
    add("scenario", "seed", Num(Dim::Dimensionless), ALL);
    add("scenario", "periods", Num(Dim::Dimensionless), ALL);
    add("scenario", "t_end", Num(Dim::Time), ALL);

    add("drive", "I0", Num(Dim::Current), DRIVEN);
    add("drive", "Omega", Num(Dim::AngularFrequency), DRIVEN);

    // Membrane-circuit parameters.
    add("params", "area", Num(Dim::Area), HH);
    add("params", "Cg", Num(Dim::Capacitance), HH_AND_TTL);
    add("params", "gK_max", Num(Dim::Conductance), HH);
    add(
        "params",
        "gNa_max",
        Num(Dim::Conductance),
        &[Model::ClassicalFull],
    );
    add(
        "params",
        "gL",
        Num(Dim::Conductance),
        &[Model::ClassicalFull],
    );
    add("params", "VK", Num(Dim::Voltage), CLASSICAL);
    add("params", "VNa", Num(Dim::Voltage), &[Model::ClassicalFull]);
    add("params", "VL", Num(Dim::Voltage), &[Model::ClassicalFull]);
    add(
        "params",
        "V_init",
        Num(Dim::Voltage),
        &[Model::Classical, Model::ClassicalFull],
    );
    add("params", "n_init", Num(Dim::Dimensionless), HH);
    add(
        "params",
        "m_init",
        Num(Dim::Dimensionless),
        &[Model::ClassicalFull],
    );
    add(
        "params",
        "h_init",
        Num(Dim::Dimensionless),
        &[Model::ClassicalFull],
    );
    add(
        "params",
        "Cc",
        Num(Dim::Capacitance),
        &[Model::Quantized, Model::TwoTl, Model::ScFeasibility],
    );
    add("params", "Zmin", Num(Dim::Resistance), &[Model::Quantized]);
    add(
        "params",
        "Z_init",
        Num(Dim::Resistance),
        &[Model::Quantized],
    );
    add(
        "params",
        "V0",
        Num(Dim::Voltage),
        &[Model::Quantized, Model::TwoTl],
    );
    add(
        "params",
        "refresh_stride",
        Num(Dim::Dimensionless),
        &[Model::Quantized],
    );

    // Quantum-memristor parameters (natural units by default).
    let sme: &[Model] = &[Model::QmemSme];
    add("params", "C", Num(Dim::Capacitance), sme);
    add("params", "L", Num(Dim::Inductance), sme);
    add("params", "tau", Num(Dim::FrequencyHz), sme);
    add("params", "q0", Num(Dim::Dimensionless), sme);
    add("params", "lambda", Num(Dim::FrequencyHz), sme);
    add("params", "gamma0", Num(Dim::FrequencyHz), sme);
    add("params", "dim", Num(Dim::Dimensionless), sme);
    add("params", "alpha_re", Num(Dim::Dimensionless), sme);
    add("params", "alpha_im", Num(Dim::Dimensionless), sme);
    add("params", "mu0", Num(Dim::Dimensionless), sme);
    add("params", "rate0", Num(Dim::FrequencyHz), sme);
    add("params", "units", Choice(&["natural", "si"]), sme);
    add("params", "monitor_stride", Num(Dim::Dimensionless), sme);
    add("params", "noise", Choice(&["classical", "wiener"]), sme);

    // Dual-transmission-line parameters.
    let ttl: &[Model] = &[Model::TwoTl];
    add("params", "Z0", Num(Dim::Resistance), ttl);
    add("params", "Z1", Num(Dim::Resistance), ttl);
    add("params", "spec_center", Num(Dim::AngularFrequency), ttl);
    add("params", "spec_width", Num(Dim::AngularFrequency), ttl);
    add("params", "spec_amp", Num(Dim::Dimensionless), ttl);
    add("params", "omega_max", Num(Dim::AngularFrequency), ttl);
    add("params", "grid_points", Num(Dim::Dimensionless), ttl);
    add("params", "samples", Num(Dim::Dimensionless), ttl);

    // Superconducting-implementation parameters.
    let sc: &[Model] = &[Model::ScFeasibility];
    add("params", "EC_over_h", Num(Dim::FrequencyHz), sc);
    add("params", "EL_over_h", Num(Dim::FrequencyHz), sc);
    add("params", "Delta_over_h", Num(Dim::FrequencyHz), sc);
    add("params", "deltaE_over_h", Num(Dim::FrequencyHz), sc);
    add("params", "alpha_rs", Num(Dim::Dimensionless), sc);
    add("params", "C_d", Num(Dim::Capacitance), sc);
    add("params", "T10", Num(Dim::Time), sc);
    add("params", "T_spike", Num(Dim::Time), sc);
    add("params", "G0", Num(Dim::Conductance), sc);
    add("params", "omega_mod", Num(Dim::AngularFrequency), sc);
    add("params", "modulation", Choice(&["on", "off"]), sc);
    add("params", "lshift_threshold", Num(Dim::Dimensionless), sc);

    add("integrator", "dt", Num(Dim::Time), ALL);
    add("integrator", "dt_per_period", Num(Dim::Dimensionless), ALL);
    add("integrator", "tolerance", Num(Dim::Dimensionless), ALL);
    add("integrator", "scheme", Choice(&["rk4"]), ALL);

    add("outputs", "csv", Text, ALL);
    add("outputs", "json", Text, ALL);
    add("outputs", "channels", List, ALL);
    r
}

#[derive(Debug, Clone)]
struct RawEntry {
    line: usize,
    value: String,
}

/// Classical-model slice of the resolved configuration.
#[derive(Debug, Clone)]
pub struct HHScenario {
    pub params: HHParams,
    pub v_init: f64,
    pub n_init: Option<f64>,
    pub m_init: Option<f64>,
    pub h_init: Option<f64>,
}

/// Quantized-model slice.
#[derive(Debug, Clone)]
pub struct QuantizedScenario {
    pub cc: f64,
    pub z_min: f64,
    pub n_init: f64,
    pub refresh_stride: usize,
}

/// Quantum-memristor slice.
#[derive(Debug, Clone)]
pub struct SmeScenario {
    pub c: f64,
    pub l: f64,
    pub tau: f64,
    pub q0: f64,
    pub lambda: f64,
    pub gamma0: f64,
    pub dim: usize,
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub mu0: f64,
    pub rate0: f64,
    pub natural_units: bool,
    pub monitor_stride: usize,
    pub wiener_noise: bool,
}

/// Dual-line slice.
#[derive(Debug, Clone)]
pub struct TwoTlScenario {
    pub z0: f64,
    pub z1: f64,
    pub cg: f64,
    pub cc: f64,
    pub spec_center: f64,
    pub spec_width: f64,
    pub spec_amp: f64,
    pub omega_max: f64,
    pub grid_points: usize,
    pub samples: usize,
}

/// Superconducting slice.
#[derive(Debug, Clone)]
pub struct ScScenario {
    pub params: hhq_core::squid::SCParams,
    pub lshift_threshold: f64,
}

/// Output routing.
#[derive(Debug, Clone)]
pub struct Outputs {
    pub csv: String,
    pub json: String,
    pub channels: Option<Vec<String>>,
}

/// A fully validated scenario with defaults applied.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub model: Model,
    pub seed: u64,
    pub drive_i0: f64,
    pub drive_omega: f64,
    pub periods: f64,
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub dt_per_period: f64,
    pub tolerance: f64,
    pub hh: HHScenario,
    pub quantized: Option<QuantizedScenario>,
    pub sme: Option<SmeScenario>,
    pub two_tl: Option<TwoTlScenario>,
    pub sc: Option<ScScenario>,
    pub outputs: Outputs,
    /// Raw scenario text, hashed into provenance.
    pub raw_text: String,
}

impl ScenarioConfig {
    /// Drive period 2π/Ω.
    pub fn drive_period(&self) -> f64 {
        2.0 * PI / self.drive_omega
    }

    /// End of the simulated window (s).
    pub fn time_span(&self) -> f64 {
        match self.t_end {
            Some(t) => t,
            None => self.periods * self.drive_period(),
        }
    }

    /// Integrator step: explicit dt, or the per-period fraction of the drive.
    pub fn step(&self) -> f64 {
        self.dt.unwrap_or(self.dt_per_period * self.drive_period())
    }
}

struct Resolver {
    entries: BTreeMap<(String, String), RawEntry>,
    model: Model,
    /// Declared dimension per numeric key; the registry is the single
    /// source of truth for units.
    dims: BTreeMap<(&'static str, &'static str), Dim>,
}

impl Resolver {
    fn take(&mut self, section: &str, key: &str) -> Option<RawEntry> {
        self.entries.remove(&(section.to_string(), key.to_string()))
    }

    fn dim_of(&self, section: &str, key: &str) -> Dim {
        *self
            .dims
            .get(&(section, key))
            .unwrap_or_else(|| panic!("key '{key}' in [{section}] missing from the registry"))
    }

    fn num(
        &mut self,
        section: &'static str,
        key: &'static str,
        default: f64,
    ) -> Result<f64, CliError> {
        let dim = self.dim_of(section, key);
        match self.take(section, key) {
            None => Ok(default),
            Some(e) => parse_quantity(&e.value, dim)
                .map_err(|msg| CliError::parse_at(e.line, format!("{key}: {msg}"))),
        }
    }

    fn num_opt(
        &mut self,
        section: &'static str,
        key: &'static str,
    ) -> Result<Option<f64>, CliError> {
        let dim = self.dim_of(section, key);
        match self.take(section, key) {
            None => Ok(None),
            Some(e) => parse_quantity(&e.value, dim)
                .map(Some)
                .map_err(|msg| CliError::parse_at(e.line, format!("{key}: {msg}"))),
        }
    }

    fn num_required(&mut self, section: &'static str, key: &'static str) -> Result<f64, CliError> {
        let dim = self.dim_of(section, key);
        match self.take(section, key) {
            None => Err(CliError::parse(format!(
                "missing required key '{key}' in [{section}] for model {}",
                self.model.name()
            ))),
            Some(e) => parse_quantity(&e.value, dim)
                .map_err(|msg| CliError::parse_at(e.line, format!("{key}: {msg}"))),
        }
    }

    fn text(&mut self, section: &str, key: &str, default: &str) -> String {
        self.take(section, key)
            .map(|e| e.value)
            .unwrap_or_else(|| default.to_string())
    }

    fn choice(&mut self, section: &str, key: &str, default: &str) -> Result<String, CliError> {
        // Registry validation already checked membership.
        Ok(self.text(section, key, default))
    }

    fn positive_int(
        &mut self,
        section: &'static str,
        key: &'static str,
        default: usize,
    ) -> Result<usize, CliError> {
        let v = self.num(section, key, default as f64)?;
        if v < 0.0 || v.fract() != 0.0 {
            return Err(CliError::parse(format!(
                "{key} must be a nonnegative integer, got {v}"
            )));
        }
        Ok(v as usize)
    }
}

/// Parses and validates a scenario, applying documented defaults.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig, CliError> {
    let reg = registry();
    let known_sections = ["scenario", "drive", "params", "integrator", "outputs"];

    let mut entries: BTreeMap<(String, String), RawEntry> = BTreeMap::new();
    let mut section: Option<String> = None;
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find(['#', ';']) {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = name.trim();
            if !known_sections.contains(&name) {
                return Err(CliError::parse_at(
                    line_no,
                    format!("unknown section '[{name}]'"),
                ));
            }
            section = Some(name.to_string());
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::parse_at(line_no, format!("expected 'key = value', got '{line}'"))
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if value.is_empty() {
            return Err(CliError::parse_at(
                line_no,
                format!("empty value for '{key}'"),
            ));
        }
        let section = section.clone().ok_or_else(|| {
            CliError::parse_at(line_no, format!("key '{key}' appears before any [section]"))
        })?;
        if let Some(prev) = entries.get(&(section.clone(), key.clone())) {
            return Err(CliError::parse_at(
                line_no,
                format!(
                    "duplicate key '{key}' in [{section}] (first set on line {})",
                    prev.line
                ),
            ));
        }
        entries.insert(
            (section, key),
            RawEntry {
                line: line_no,
                value,
            },
        );
    }

    // The model must be known before per-model key validation.
    let model_entry = entries
        .get(&("scenario".to_string(), "model".to_string()))
        .ok_or_else(|| CliError::parse("missing required key 'model' in [scenario]"))?
        .clone();
    let model = Model::from_name(&model_entry.value).ok_or_else(|| {
        CliError::parse_at(
            model_entry.line,
            format!("unknown model '{}'", model_entry.value),
        )
    })?;

    // Strict registry pass: unknown keys, inapplicable keys, bad choices.
    for ((section, key), entry) in &entries {
        let spec = reg
            .iter()
            .find(|s| s.section == section && s.key == key)
            .ok_or_else(|| {
                CliError::parse_at(entry.line, format!("unknown key '{key}' in [{section}]"))
            })?;
        if !spec.models.contains(&model) {
            return Err(CliError::parse_at(
                entry.line,
                format!("key '{key}' does not apply to model {}", model.name()),
            ));
        }
        if let Kind::Choice(allowed) = &spec.kind {
            if !allowed.contains(&entry.value.as_str()) {
                return Err(CliError::parse_at(
                    entry.line,
                    format!(
                        "'{}' is not one of {} for key '{key}'",
                        entry.value,
                        allowed.join("|")
                    ),
                ));
            }
        }
    }

    let dims: BTreeMap<(&'static str, &'static str), Dim> = reg
        .iter()
        .filter_map(|s| match s.kind {
            Kind::Num(d) => Some(((s.section, s.key), d)),
            _ => None,
        })
        .collect();
    let mut r = Resolver {
        entries,
        model,
        dims,
    };
    r.take("scenario", "model");

    let seed = r.positive_int("scenario", "seed", 0)? as u64;
    let default_periods = match model {
        Model::QmemSme => 3.0,
        _ => 20.0,
    };
    let periods = r.num("scenario", "periods", default_periods)?;
    if !(periods > 0.0) {
        return Err(CliError::parse(format!(
            "periods must be > 0, got {periods}"
        )));
    }
    let t_end = r.num_opt("scenario", "t_end")?;

    // Drive.
    let needs_drive = matches!(
        model,
        Model::Classical | Model::ClassicalFull | Model::ClassicalAdiabatic | Model::Quantized
    );
    let (drive_i0, drive_omega) = if needs_drive {
        (
            r.num_required("drive", "I0")?,
            r.num_required("drive", "Omega")?,
        )
    } else if model == Model::ScFeasibility {
        (r.num("drive", "I0", 1e-6)?, r.num("drive", "Omega", 1e3)?)
    } else {
        (0.0, 0.0)
    };
    if needs_drive && !(drive_omega > 0.0) {
        return Err(CliError::parse(format!(
            "Omega must be > 0, got {drive_omega}"
        )));
    }

    // Membrane parameters with per-area defaults scaled by the area key.
    // Only the membrane-circuit models consume these; for the rest the
    // registry has already rejected the keys and the standards stand in.
    let hh = if needs_drive {
        let area = r.num("params", "area", 1.0)?;
        if !(area > 0.0) {
            return Err(CliError::parse(format!("area must be > 0 cm2, got {area}")));
        }
        let std = HHParams::standard(area);
        HHScenario {
            params: HHParams {
                cg: r.num("params", "Cg", std.cg)?,
                g_k_max: r.num("params", "gK_max", std.g_k_max)?,
                g_na_max: r.num("params", "gNa_max", std.g_na_max)?,
                g_l: r.num("params", "gL", std.g_l)?,
                v_k: r.num("params", "VK", std.v_k)?,
                v_na: r.num("params", "VNa", std.v_na)?,
                v_l: r.num("params", "VL", std.v_l)?,
            },
            v_init: r.num("params", "V_init", 0.0)?,
            n_init: r.num_opt("params", "n_init")?,
            m_init: r.num_opt("params", "m_init")?,
            h_init: r.num_opt("params", "h_init")?,
        }
    } else {
        HHScenario {
            params: HHParams::standard(1.0),
            v_init: 0.0,
            n_init: None,
            m_init: None,
            h_init: None,
        }
    };

    let quantized = if model == Model::Quantized {
        let z_min = r.num("params", "Zmin", 1.0 / hh.params.g_k_max)?;
        let z_init = r.num_opt("params", "Z_init")?;
        let n_init = match (hh.n_init, z_init) {
            (Some(_), Some(_)) => {
                return Err(CliError::parse("give either n_init or Z_init, not both"))
            }
            (Some(n), None) => n,
            (None, Some(z)) => {
                hhq_core::tline::ImpedanceState::from_impedance(z_min, z)
                    .map_err(|e| CliError::parse(e.to_string()))?
                    .n
            }
            (None, None) => RateFunctions::hh1952().n_inf(0.0),
        };
        Some(QuantizedScenario {
            cc: r.num("params", "Cc", hh.params.cg)?,
            z_min,
            n_init,
            refresh_stride: r.positive_int("params", "refresh_stride", 1)?,
        })
    } else {
        None
    };
    if model == Model::Quantized {
        // V0 is accepted (a DC offset on the resting line) and dropped from
        // dynamical traces.
        r.num("params", "V0", 0.0)?;
    }

    let sme = if model == Model::QmemSme {
        Some(SmeScenario {
            c: r.num("params", "C", 1.0)?,
            l: r.num("params", "L", 1.0)?,
            tau: r.num("params", "tau", 2.5e-3)?,
            q0: r.num("params", "q0", 0.5)?,
            lambda: r.num("params", "lambda", 2.0)?,
            gamma0: r.num("params", "gamma0", 0.15)?,
            dim: r.positive_int("params", "dim", 20)?,
            alpha_re: r.num("params", "alpha_re", 2.0)?,
            alpha_im: r.num("params", "alpha_im", 0.0)?,
            mu0: r.num("params", "mu0", 0.5)?,
            rate0: r.num("params", "rate0", 0.4)?,
            natural_units: r.choice("params", "units", "natural")? == "natural",
            monitor_stride: r.positive_int("params", "monitor_stride", 50)?,
            wiener_noise: r.choice("params", "noise", "classical")? == "wiener",
        })
    } else {
        None
    };

    let two_tl = if model == Model::TwoTl {
        let spec_center = r.num_required("params", "spec_center")?;
        if !(spec_center > 0.0) {
            return Err(CliError::parse("spec_center must be > 0"));
        }
        Some(TwoTlScenario {
            z0: r.num("params", "Z0", 50.0)?,
            z1: r.num("params", "Z1", 50.0)?,
            cg: r.num("params", "Cg", 1e-6)?,
            cc: r.num("params", "Cc", 1e-6)?,
            spec_center,
            spec_width: r.num("params", "spec_width", spec_center / 50.0)?,
            spec_amp: r.num("params", "spec_amp", 1.0)?,
            omega_max: r.num("params", "omega_max", 100.0 * spec_center)?,
            grid_points: r.positive_int("params", "grid_points", 2001)?,
            samples: r.positive_int("params", "samples", 400)?,
        })
    } else {
        None
    };

    let sc = if model == Model::ScFeasibility {
        let mut p = hhq_core::squid::SCParams::table_defaults();
        let h = hhq_core::constants::H_PLANCK;
        let hbar = hhq_core::constants::HBAR;
        p.e_c = h * r.num("params", "EC_over_h", 1e9)?;
        p.e_l = h * r.num("params", "EL_over_h", 1e12)?;
        p.omega10 = (2.0 * p.e_c * p.e_l).sqrt() / hbar;
        p.delta_gap = match r.num_opt("params", "Delta_over_h")? {
            Some(f) => h * f,
            None => p.e_l,
        };
        p.delta_e = match r.num_opt("params", "deltaE_over_h")? {
            Some(f) => h * f,
            None => hbar * p.omega10 / 20.0,
        };
        p.alpha_rs = r.num("params", "alpha_rs", 0.15)?;
        p.c_d = r.num("params", "C_d", 5e-13)?;
        p.t10 = r.num("params", "T10", 1e-6)?;
        p.t_spike = r.num("params", "T_spike", 5e-3)?;
        p.cc = r.num("params", "Cc", 1e-13)?;
        p.g0 = r.num("params", "G0", hhq_core::squid::G0_CANONICAL)?;
        p.omega_mod = r.num("params", "omega_mod", 2.0 * PI / p.t10)?;
        p.modulation = r.choice("params", "modulation", "on")? == "on";
        p.i0 = drive_i0;
        p.omega = drive_omega;
        Some(ScScenario {
            params: p,
            lshift_threshold: r.num("params", "lshift_threshold", 0.1)?,
        })
    } else {
        None
    };

    let dt = r.num_opt("integrator", "dt")?;
    if let Some(d) = dt {
        if !(d > 0.0) {
            return Err(CliError::parse(format!("dt must be > 0, got {d}")));
        }
    }
    let dt_per_period = r.num("integrator", "dt_per_period", 1e-3)?;
    let tolerance = r.num("integrator", "tolerance", 1e-9)?;
    r.choice("integrator", "scheme", "rk4")?;

    let outputs = Outputs {
        csv: r.text("outputs", "csv", "trace.csv"),
        json: r.text("outputs", "json", "metrics.json"),
        channels: r.take("outputs", "channels").map(|e| {
            e.value
                .split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect()
        }),
    };

    // Everything in the registry has been consumed; anything left is a key
    // that passed the registry check but was not used by this model. That
    // would be a resolver bug, so surface it loudly.
    if let Some(((section, key), entry)) = r.entries.iter().next() {
        return Err(CliError::parse_at(
            entry.line,
            format!(
                "key '{key}' in [{section}] is not consumed by model {}",
                model.name()
            ),
        ));
    }

    Ok(ScenarioConfig {
        model,
        seed,
        drive_i0,
        drive_omega,
        periods,
        t_end,
        dt,
        dt_per_period,
        tolerance,
        hh,
        quantized,
        sme,
        two_tl,
        sc,
        outputs,
        raw_text: text.to_string(),
    })
}
