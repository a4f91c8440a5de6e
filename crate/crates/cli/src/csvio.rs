//! CSV trace files: header row with units, round-trip-exact numbers.

use crate::error::CliError;
use hhq_core::timeseries::{Channel, TimeSeries};
use std::io::Write;
use std::path::Path;

/// Writes `t` plus the selected channels. Numbers use shortest
/// round-trip-exact scientific notation, so reading the file back
/// reproduces the samples bit for bit.
pub fn write_csv(
    path: &Path,
    ts: &TimeSeries,
    channels: Option<&[String]>,
) -> Result<(), CliError> {
    let selected: Vec<&Channel> = match channels {
        None => ts.channels.iter().collect(),
        Some(names) => names
            .iter()
            .map(|n| {
                ts.channels
                    .iter()
                    .find(|c| &c.name == n)
                    .ok_or_else(|| CliError::parse(format!("no channel named '{n}' in this model")))
            })
            .collect::<Result<_, _>>()?,
    };
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    let header: Vec<String> = std::iter::once("t (s)".to_string())
        .chain(selected.iter().map(|c| format!("{} ({})", c.name, c.unit)))
        .collect();
    writeln!(out, "{}", header.join(","))?;
    for k in 0..ts.len() {
        write!(out, "{:e}", ts.time[k])?;
        for c in &selected {
            write!(out, ",{:e}", c.data[k])?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a CSV trace written by [`write_csv`] (or any numeric CSV whose
/// first column is time). Units are taken from `name (unit)` headers when
/// present.
pub fn read_csv(path: &Path) -> Result<TimeSeries, CliError> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| CliError::parse("empty CSV file"))?;
    let mut names = Vec::new();
    for col in header.split(',').skip(1) {
        let col = col.trim();
        let (name, unit) = match col.split_once('(') {
            Some((n, u)) => (
                n.trim().to_string(),
                u.trim_end_matches(')').trim().to_string(),
            ),
            None => (col.to_string(), String::new()),
        };
        names.push((name, unit));
    }
    let mut ts = TimeSeries {
        time: Vec::new(),
        channels: names
            .into_iter()
            .map(|(name, unit)| Channel {
                name,
                unit,
                data: Vec::new(),
            })
            .collect(),
    };
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let t: f64 = fields
            .next()
            .unwrap()
            .trim()
            .parse()
            .map_err(|_| CliError::parse_at(idx + 1, "bad time value"))?;
        let values: Vec<f64> = fields
            .map(|f| f.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| CliError::parse_at(idx + 1, "bad numeric value"))?;
        if values.len() != ts.channels.len() {
            return Err(CliError::parse_at(
                idx + 1,
                format!(
                    "expected {} columns, found {}",
                    ts.channels.len() + 1,
                    values.len() + 1
                ),
            ));
        }
        ts.push(t, &values);
    }
    Ok(ts)
}
