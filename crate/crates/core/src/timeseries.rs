//! Named, unit-tagged time traces produced by every simulator.

use crate::error::{Result, SimError};

/// One named channel of samples with a unit label.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub name: String,
    /// Unit label for headers ("V", "A", "S", "1" for dimensionless).
    pub unit: String,
    pub data: Vec<f64>,
}

/// A uniformly or adaptively sampled trace of named channels sharing one time axis.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimeSeries {
    /// Sample times (s).
    pub time: Vec<f64>,
    pub channels: Vec<Channel>,
}

impl TimeSeries {
    /// Empty trace with the given `(name, unit)` channels.
    pub fn new(channels: &[(&str, &str)]) -> Self {
        TimeSeries {
            time: Vec::new(),
            channels: channels
                .iter()
                .map(|(n, u)| Channel {
                    name: n.to_string(),
                    unit: u.to_string(),
                    data: Vec::new(),
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }

    /// Append one sample row; `values` must match the channel count.
    pub fn push(&mut self, t: f64, values: &[f64]) {
        assert_eq!(
            values.len(),
            self.channels.len(),
            "row width must match channel count"
        );
        self.time.push(t);
        for (ch, v) in self.channels.iter_mut().zip(values) {
            ch.data.push(*v);
        }
    }

    pub fn channel(&self, name: &str) -> Result<&Channel> {
        self.channels
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| SimError::Parameter(format!("no channel named '{name}'")))
    }

    /// Samples of a named channel.
    pub fn values(&self, name: &str) -> Result<&[f64]> {
        Ok(&self.channel(name)?.data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_and_lookup() {
        let mut ts = TimeSeries::new(&[("V", "V"), ("I", "A")]);
        ts.push(0.0, &[1.0, 2.0]);
        ts.push(0.1, &[3.0, 4.0]);
        assert_eq!(ts.len(), 2);
        assert_eq!(ts.values("I").unwrap(), &[2.0, 4.0]);
        assert_eq!(ts.channel("V").unwrap().unit, "V");
        assert!(ts.values("missing").is_err());
    }
}
