//! Equally spaced observation grids with the sample-count/horizon coupling
//! `n ≈ t_n^gamma`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid `t_k = k * epsilon` for `k = 0..=n`, with `epsilon = t_n / n`
/// and `n = round(t_n^gamma)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservationGrid {
    pub n: usize,
    pub t_n: f64,
    pub epsilon: f64,
    pub gamma: f64,
}

impl ObservationGrid {
    /// Build a grid from the horizon and the coupling exponent `gamma > 1`.
    pub fn from_horizon(t_n: f64, gamma: f64) -> Result<Self> {
        if !(t_n > 0.0) {
            return Err(Error::InvalidGrid(format!("horizon must be positive, got {t_n}")));
        }
        if !(gamma > 1.0) {
            return Err(Error::InvalidGrid(format!("gamma must exceed 1, got {gamma}")));
        }
        let n = t_n.powf(gamma).round() as usize;
        if n < 2 {
            return Err(Error::InvalidGrid(format!(
                "t_n^gamma = {:.3} yields fewer than 2 points",
                t_n.powf(gamma)
            )));
        }
        Ok(Self { n, t_n, epsilon: t_n / n as f64, gamma })
    }

    /// Build a grid with an explicit point count; `gamma` is recovered as
    /// `ln n / ln t_n` (or 1 when the horizon makes that meaningless).
    pub fn with_points(t_n: f64, n: usize) -> Result<Self> {
        if !(t_n > 0.0) {
            return Err(Error::InvalidGrid(format!("horizon must be positive, got {t_n}")));
        }
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {n}")));
        }
        let gamma = if t_n > 1.0 { (n as f64).ln() / t_n.ln() } else { 1.0 };
        Ok(Self { n, t_n, epsilon: t_n / n as f64, gamma })
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.epsilon
    }

    /// All n+1 grid times including both endpoints.
    pub fn times(&self) -> Vec<f64> {
        (0..=self.n).map(|k| self.time(k)).collect()
    }

    /// Index of a grid point equal to `t` (within one part in 1e-9 of the
    /// mesh), or an error.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let k = (t / self.epsilon).round();
        if k < 0.0 || k > self.n as f64 || (t - k * self.epsilon).abs() > 1e-9 * self.epsilon.max(1.0) {
            return Err(Error::NotOnGrid { t, mesh: self.epsilon });
        }
        Ok(k as usize)
    }
}
