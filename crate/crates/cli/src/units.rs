//! Unit-suffix parsing for scenario values.
//!
//! A value is a number with an optional unit ("10 uA", "0.3 mS", "5 ms").
//! Every key declares an expected dimension; a bare number inherits the
//! dimension's SI base unit, and a suffix of the wrong dimension is an error.

use std::fmt;

/// Physical dimension a scenario key expects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dim {
    Current,
    Voltage,
    Conductance,
    Capacitance,
    Inductance,
    Resistance,
    Time,
    FrequencyHz,
    AngularFrequency,
    Area,
    Dimensionless,
}

impl Dim {
    /// Base symbol used in error messages.
    pub fn base_symbol(self) -> &'static str {
        match self {
            Dim::Current => "A",
            Dim::Voltage => "V",
            Dim::Conductance => "S",
            Dim::Capacitance => "F",
            Dim::Inductance => "H",
            Dim::Resistance => "Ohm",
            Dim::Time => "s",
            Dim::FrequencyHz => "Hz",
            Dim::AngularFrequency => "rad/s",
            Dim::Area => "cm2",
            Dim::Dimensionless => "1",
        }
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.base_symbol())
    }
}

fn prefix_exponent(p: &str) -> Option<i32> {
    Some(match p {
        "" => 0,
        "G" => 9,
        "M" => 6,
        "k" => 3,
        "m" => -3,
        "u" => -6,
        "n" => -9,
        "p" => -12,
        "f" => -15,
        _ => return None,
    })
}

/// Applies a decimal prefix with correct rounding: negative powers divide by
/// the exactly representable positive power, so "10 uA" stores the same
/// double as parsing "1e-5".
fn apply_prefix(value: f64, exponent: i32) -> f64 {
    if exponent >= 0 {
        value * 10f64.powi(exponent)
    } else {
        value / 10f64.powi(-exponent)
    }
}

/// Splits a unit token into (decimal exponent, dimension). Case-sensitive:
/// "mS" is milli-siemens, "ms" is milli-seconds.
fn classify_unit(unit: &str) -> Option<(i32, Dim)> {
    // Fixed symbols without prefixes first.
    match unit {
        "rad/s" => return Some((0, Dim::AngularFrequency)),
        "cm2" => return Some((0, Dim::Area)),
        "1" => return Some((0, Dim::Dimensionless)),
        _ => {}
    }
    for (base, dim) in [
        ("Ohm", Dim::Resistance),
        ("Hz", Dim::FrequencyHz),
        ("A", Dim::Current),
        ("V", Dim::Voltage),
        ("S", Dim::Conductance),
        ("F", Dim::Capacitance),
        ("H", Dim::Inductance),
        ("s", Dim::Time),
    ] {
        if let Some(prefix) = unit.strip_suffix(base) {
            if let Some(exponent) = prefix_exponent(prefix) {
                return Some((exponent, dim));
            }
        }
    }
    None
}

/// Parses "number [unit]" into an SI value of the expected dimension.
pub fn parse_quantity(raw: &str, expected: Dim) -> Result<f64, String> {
    let raw = raw.trim();
    let (num_str, unit_str) = match raw.find(|c: char| c.is_ascii_whitespace()) {
        Some(pos) => (&raw[..pos], raw[pos..].trim()),
        None => {
            // Allow forms like "10uA" by splitting at the first letter that
            // cannot continue a number.
            let split = raw
                .char_indices()
                .find(|(i, c)| {
                    c.is_ascii_alphabetic()
                        && !((*c == 'e' || *c == 'E')
                            && raw[i + 1..]
                                .chars()
                                .next()
                                .is_some_and(|n| n.is_ascii_digit() || n == '-' || n == '+'))
                })
                .map(|(i, _)| i);
            match split {
                Some(i) => (&raw[..i], raw[i..].trim()),
                None => (raw, ""),
            }
        }
    };
    let value: f64 = num_str
        .parse()
        .map_err(|_| format!("'{num_str}' is not a number"))?;
    if !value.is_finite() {
        return Err(format!("value '{raw}' is not finite"));
    }
    if unit_str.is_empty() {
        // Bare numbers inherit the SI base unit of the expected dimension.
        return Ok(value);
    }
    match classify_unit(unit_str) {
        Some((exponent, dim)) if dim == expected => Ok(apply_prefix(value, exponent)),
        Some((_, dim)) => Err(format!(
            "unit '{unit_str}' has dimension {dim}, expected {expected}"
        )),
        None => Err(format!("unknown unit '{unit_str}'")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suffix_table() {
        assert_eq!(parse_quantity("10 uA", Dim::Current).unwrap(), 1e-5);
        assert_eq!(parse_quantity("36 mS", Dim::Conductance).unwrap(), 36e-3);
        assert_eq!(parse_quantity("1 uF", Dim::Capacitance).unwrap(), 1e-6);
        assert_eq!(parse_quantity("5 ms", Dim::Time).unwrap(), 5e-3);
        assert_eq!(parse_quantity("0.5 pF", Dim::Capacitance).unwrap(), 0.5e-12);
        assert_eq!(parse_quantity("1 GHz", Dim::FrequencyHz).unwrap(), 1e9);
        assert_eq!(parse_quantity("50 Ohm", Dim::Resistance).unwrap(), 50.0);
        assert_eq!(
            parse_quantity("1e3 rad/s", Dim::AngularFrequency).unwrap(),
            1e3
        );
        assert_eq!(parse_quantity("1 cm2", Dim::Area).unwrap(), 1.0);
    }

    #[test]
    fn attached_suffix_and_scientific() {
        assert_eq!(parse_quantity("10uA", Dim::Current).unwrap(), 1e-5);
        assert_eq!(parse_quantity("1e-6", Dim::Capacitance).unwrap(), 1e-6);
        assert_eq!(
            parse_quantity("2.5e-3Hz", Dim::FrequencyHz).unwrap(),
            2.5e-3
        );
        assert_eq!(parse_quantity("3E4 V", Dim::Voltage).unwrap(), 3e4);
    }

    #[test]
    fn bare_number_inherits_base_unit() {
        assert_eq!(parse_quantity("0.05", Dim::Voltage).unwrap(), 0.05);
        assert_eq!(parse_quantity("42", Dim::Dimensionless).unwrap(), 42.0);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let err = parse_quantity("10 mV", Dim::Current).unwrap_err();
        assert!(err.contains("expected A"), "{err}");
        assert!(parse_quantity("10 bogons", Dim::Current).is_err());
        assert!(parse_quantity("NaN", Dim::Current).is_err());
        assert!(parse_quantity("inf s", Dim::Time).is_err());
    }

    #[test]
    fn case_sensitivity_separates_time_from_siemens() {
        assert_eq!(parse_quantity("1 ms", Dim::Time).unwrap(), 1e-3);
        assert_eq!(parse_quantity("1 mS", Dim::Conductance).unwrap(), 1e-3);
        assert!(parse_quantity("1 mS", Dim::Time).is_err());
    }
}
