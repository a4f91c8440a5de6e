//! `hhq` — scenario runner for the classical and quantized single-channel
//! Hodgkin-Huxley simulators.

// Parameter guards are written `!(x > 0.0)` so NaN fails validation too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use clap::{Parser, Subcommand};
use hhq::error::CliError;
use hhq::metrics::{analyze_loops, MetricsReport, Provenance};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "hhq",
    version,
    about = "Classical and quantized single-ion-channel Hodgkin-Huxley simulations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file: writes a CSV trace and a JSON metrics report.
    Run {
        /// Scenario file in the documented [section] / key = value format.
        scenario: PathBuf,
        /// Output directory (default: $HHQ_OUT_DIR, then the working directory).
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Override the scenario's RNG seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Hysteresis metrics for a CSV trace.
    Metrics {
        /// CSV file with a time column followed by named channels.
        csv: PathBuf,
        /// Drive period used to segment cycles (seconds).
        #[arg(long)]
        period: f64,
        /// Voltage column name.
        #[arg(long, default_value = "V")]
        v_col: String,
        /// Current column name.
        #[arg(long, default_value = "I")]
        i_col: String,
    },
    /// Evaluate the superconducting-regime inequalities of a scenario.
    CheckRegime {
        /// Scenario file with model = sc-feasibility.
        scenario: PathBuf,
    },
}

fn read_scenario(path: &Path) -> Result<hhq::ScenarioConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    hhq::parse_scenario(&text).map_err(|e| with_context(e, path))
}

/// Prefixes an error message with the scenario file it came from.
fn with_context(e: CliError, path: &Path) -> CliError {
    let name = path.display();
    match e {
        CliError::Parse { line, msg } => CliError::Parse {
            line,
            msg: format!("{name}: {msg}"),
        },
        CliError::Integration(msg) => CliError::Integration(format!("{name}: {msg}")),
        CliError::Resolution(msg) => CliError::Resolution(format!("{name}: {msg}")),
        CliError::Io(msg) => CliError::Io(format!("{name}: {msg}")),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run {
            scenario,
            out_dir,
            seed,
        } => {
            let mut cfg = read_scenario(&scenario)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let out_dir = out_dir
                .or_else(|| std::env::var_os("HHQ_OUT_DIR").map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("."));
            let out = hhq::run_scenario(&cfg, &out_dir).map_err(|e| with_context(e, &scenario))?;
            println!(
                "wrote {} and {}",
                out.csv_path.display(),
                out.json_path.display()
            );
            Ok(())
        }
        Command::Metrics {
            csv,
            period,
            v_col,
            i_col,
        } => {
            if !(period > 0.0) {
                return Err(CliError::parse(format!(
                    "--period must be > 0, got {period}"
                )));
            }
            let bytes =
                std::fs::read(&csv).map_err(|e| CliError::Io(format!("{}: {e}", csv.display())))?;
            let ts = hhq::csvio::read_csv(&csv)?;
            let v = ts.values(&v_col)?;
            let i = ts.values(&i_col)?;
            let (loops, limit) = analyze_loops(&ts.time, v, i, period)?;
            let report = MetricsReport {
                provenance: Provenance {
                    config_sha256: hhq::metrics::config_hash(&String::from_utf8_lossy(&bytes)),
                    seed: 0,
                    code_version: env!("CARGO_PKG_VERSION").to_string(),
                },
                model: "csv".to_string(),
                loop_metrics: Some(loops),
                limit_cycle: Some(limit),
                regime: None,
                sme_run: None,
                uv_cutoff: None,
            };
            println!(
                "{}",
                serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))?
            );
            Ok(())
        }
        Command::CheckRegime { scenario } => {
            let cfg = read_scenario(&scenario)?;
            let regime = hhq::check_regime(&cfg)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&regime).map_err(|e| CliError::Io(e.to_string()))?
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hhq: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
