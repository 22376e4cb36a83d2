//! Exact simulation of fractional Brownian motion on a uniform grid.
//!
//! Two generators produce the same law:
//!
//! - [`CholeskyFbm`] factors the exact increment covariance and serves as the
//!   exactness oracle (O(n^2) memory, n capped at 5000);
//! - [`CirculantFbm`] embeds the increment covariance in a circulant matrix
//!   and samples through an FFT, which is what the long-horizon ergodic
//!   experiments use (n up to ~10^6).

use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::ObservationGrid;
use crate::path::{PathLabel, SampledPath};
use crate::rng::RngSeed;

/// Analytic fBm covariance `E[B_t B_s] = (t^{2H} + s^{2H} - |t-s|^{2H}) / 2`.
pub fn fbm_covariance(h: f64, t: f64, s: f64) -> f64 {
    0.5 * (t.abs().powf(2.0 * h) + s.abs().powf(2.0 * h) - (t - s).abs().powf(2.0 * h))
}

/// Covariance of unit-lag-indexed increments on a mesh `eps`:
/// `eps^{2H} (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H}) / 2`.
pub fn fgn_covariance(h: f64, eps: f64, lag: usize) -> f64 {
    let k = lag as f64;
    0.5 * eps.powf(2.0 * h)
        * ((k + 1.0).powf(2.0 * h) - 2.0 * k.powf(2.0 * h) + (k - 1.0).abs().powf(2.0 * h))
}

fn validate_h(h: f64) -> Result<f64> {
    if !(0.0 < h && h < 1.0) || !h.is_finite() {
        return Err(Error::HurstOutOfRange(h));
    }
    Ok(h)
}

fn path_from_increments(grid: &ObservationGrid, incr: &[f64]) -> SampledPath {
    let mut values = Vec::with_capacity(grid.n + 1);
    values.push(0.0);
    let mut acc = 0.0;
    for &dx in incr {
        acc += dx;
        values.push(acc);
    }
    SampledPath::new(grid.times(), values, PathLabel::Fbm)
}

/// Exact sampler from the Cholesky factor of the increment covariance.
pub struct CholeskyFbm {
    grid: ObservationGrid,
    /// Lower-triangular factor, packed row-major: `L[i][j] = chol[i(i+1)/2 + j]`.
    chol: Vec<f64>,
}

impl CholeskyFbm {
    pub const MAX_POINTS: usize = 5000;

    pub fn new(h: f64, grid: &ObservationGrid) -> Result<Self> {
        validate_h(h)?;
        let n = grid.n;
        if n > Self::MAX_POINTS {
            return Err(Error::InvalidGrid(format!(
                "Cholesky generator is capped at n = {} (O(n^2) memory), got {n}",
                Self::MAX_POINTS
            )));
        }
        let cov: Vec<f64> = (0..n).map(|lag| fgn_covariance(h, grid.epsilon, lag)).collect();
        let mut chol = vec![0.0f64; n * (n + 1) / 2];
        for i in 0..n {
            for j in 0..=i {
                let mut s = cov[i - j];
                for k in 0..j {
                    s -= chol[i * (i + 1) / 2 + k] * chol[j * (j + 1) / 2 + k];
                }
                if i == j {
                    if s <= 0.0 {
                        return Err(Error::CholeskyNotPd { minor: i + 1 });
                    }
                    chol[i * (i + 1) / 2 + j] = s.sqrt();
                } else {
                    chol[i * (i + 1) / 2 + j] = s / chol[j * (j + 1) / 2 + j];
                }
            }
        }
        Ok(Self { grid: *grid, chol })
    }

    pub fn sample(&self, seed: RngSeed) -> SampledPath {
        let n = self.grid.n;
        let mut rng = seed.rng();
        let z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let mut incr = vec![0.0f64; n];
        for i in 0..n {
            let row = &self.chol[i * (i + 1) / 2..i * (i + 1) / 2 + i + 1];
            incr[i] = row.iter().zip(&z).map(|(l, zz)| l * zz).sum();
        }
        path_from_increments(&self.grid, &incr)
    }
}

/// One-shot Cholesky sample.
pub fn fbm_cholesky(h: f64, grid: &ObservationGrid, seed: RngSeed) -> Result<SampledPath> {
    Ok(CholeskyFbm::new(h, grid)?.sample(seed))
}

/// Exact sampler via circulant embedding of the increment covariance
/// (Davies-Harte). A negative embedding eigenvalue triggers a doubling of the
/// embedding size, at most three times.
pub struct CirculantFbm {
    grid: ObservationGrid,
    /// Half embedding size (>= n); the circulant has size 2 * m.
    m: usize,
    /// sqrt(lambda_k / (2M)) for interior k, sqrt(lambda_k / M) at k in {0, m}.
    weights: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl CirculantFbm {
    pub const MAX_DOUBLINGS: usize = 3;

    pub fn new(h: f64, grid: &ObservationGrid) -> Result<Self> {
        validate_h(h)?;
        let n = grid.n;
        let mut planner = FftPlanner::new();
        // pad the half-embedding to a power of two: the first n entries keep
        // the exact fGn covariance and the transforms stay fast
        let mut m = n.next_power_of_two().max(2);
        let mut last_min = f64::NAN;
        for doubling in 0..=Self::MAX_DOUBLINGS {
            let big = 2 * m;
            let mut row: Vec<Complex<f64>> = Vec::with_capacity(big);
            for lag in 0..=m {
                row.push(Complex::new(fgn_covariance(h, grid.epsilon, lag), 0.0));
            }
            for lag in (1..m).rev() {
                row.push(Complex::new(fgn_covariance(h, grid.epsilon, lag), 0.0));
            }
            let fft = planner.plan_fft_forward(big);
            fft.process(&mut row);
            let eigs: Vec<f64> = row.iter().map(|c| c.re).collect();
            let max = eigs.iter().cloned().fold(f64::MIN, f64::max);
            let min = eigs.iter().cloned().fold(f64::MAX, f64::min);
            if min >= -1e-8 * max {
                let big_f = big as f64;
                let weights: Vec<f64> = eigs
                    .iter()
                    .enumerate()
                    .take(m + 1)
                    .map(|(k, &lam)| {
                        let lam = lam.max(0.0);
                        if k == 0 || k == m {
                            (lam / big_f).sqrt()
                        } else {
                            (lam / (2.0 * big_f)).sqrt()
                        }
                    })
                    .collect();
                return Ok(Self { grid: *grid, m, weights, fft });
            }
            last_min = min;
            if doubling == Self::MAX_DOUBLINGS {
                break;
            }
            m *= 2;
        }
        Err(Error::CirculantEmbeddingFailed {
            doublings: Self::MAX_DOUBLINGS,
            min_eigenvalue: last_min,
        })
    }

    pub fn sample(&self, seed: RngSeed) -> SampledPath {
        let m = self.m;
        let big = 2 * m;
        let mut rng = seed.rng();
        let mut buf = vec![Complex::new(0.0, 0.0); big];
        buf[0] = Complex::new(self.weights[0] * rng.sample::<f64, _>(StandardNormal), 0.0);
        buf[m] = Complex::new(self.weights[m] * rng.sample::<f64, _>(StandardNormal), 0.0);
        for j in 1..m {
            let g: f64 = rng.sample(StandardNormal);
            let gp: f64 = rng.sample(StandardNormal);
            let w = self.weights[j];
            buf[j] = Complex::new(w * g, w * gp);
            buf[big - j] = buf[j].conj();
        }
        self.fft.process(&mut buf);
        let incr: Vec<f64> = buf[..self.grid.n].iter().map(|c| c.re).collect();
        path_from_increments(&self.grid, &incr)
    }
}

/// One-shot circulant sample.
pub fn fbm_circulant(h: f64, grid: &ObservationGrid, seed: RngSeed) -> Result<SampledPath> {
    Ok(CirculantFbm::new(h, grid)?.sample(seed))
}
