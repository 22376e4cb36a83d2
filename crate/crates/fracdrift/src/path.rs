//! Sampled process trajectories, immutable after construction.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathLabel {
    Fbm,
    Diffusion,
    Martingale,
    Observable,
}

/// A time grid plus the process values observed on it. Times are strictly
/// increasing and start at 0; `values[k]` is the process at `times[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath {
    times: Vec<f64>,
    values: Vec<f64>,
    label: PathLabel,
}

impl SampledPath {
    pub fn new(times: Vec<f64>, values: Vec<f64>, label: PathLabel) -> Self {
        assert_eq!(times.len(), values.len(), "times/values length mismatch");
        assert!(!times.is_empty(), "empty path");
        assert_eq!(times[0], 0.0, "paths start at time 0");
        assert!(
            times.windows(2).all(|w| w[1] > w[0]),
            "times must be strictly increasing"
        );
        Self { times, values, label }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> PathLabel {
        self.label
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Mesh of a uniform grid (time step between the first two points).
    pub fn mesh(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    pub fn terminal(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Write the path as CSV with header `t,value` and 17-significant-digit
    /// decimals.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,value")?;
        for (t, v) in self.times.iter().zip(&self.values) {
            writeln!(out, "{:.16e},{:.16e}", t, v)?;
        }
        Ok(())
    }

    /// Parse a `t,value` CSV produced by [`SampledPath::write_csv`]; `#`
    /// comment lines and the header are skipped.
    pub fn read_csv(text: &str, label: PathLabel) -> Result<Self> {
        let mut times = Vec::new();
        let mut values = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with('t') {
                continue;
            }
            let mut parts = line.split(',');
            let t: f64 = parts
                .next()
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| crate::error::Error::Config(format!("bad CSV line: {line}")))?;
            let v: f64 = parts
                .next()
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| crate::error::Error::Config(format!("bad CSV line: {line}")))?;
            times.push(t);
            values.push(v);
        }
        Ok(Self::new(times, values, label))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_roundtrip_preserves_bits() {
        let p = SampledPath::new(
            vec![0.0, 0.1, 0.2],
            vec![0.0, -1.234567890123456e-3, 7.0 / 3.0],
            PathLabel::Fbm,
        );
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let q = SampledPath::read_csv(std::str::from_utf8(&buf).unwrap(), PathLabel::Fbm).unwrap();
        assert_eq!(p.values(), q.values());
        assert_eq!(p.times(), q.times());
    }

    #[test]
    #[should_panic]
    fn rejects_nonincreasing_times() {
        SampledPath::new(vec![0.0, 0.2, 0.2], vec![0.0, 1.0, 2.0], PathLabel::Fbm);
    }
}
