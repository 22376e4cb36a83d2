//! Empirical verification of the time-average limits and of the
//! event-probability convergence that underpins both consistency results.

use std::sync::Arc;

use rayon::prelude::*;

use crate::bounds::gamma_condition;
use crate::error::{Error, Result};
use crate::estimator::{estimate, EstimatorConfig, EstimatorKind};
use crate::fbm::CirculantFbm;
use crate::grid::ObservationGrid;
use crate::rng::RngSeed;
use crate::sde::{euler_solve, stationary_sample, DiffusionPath, DriftSpec};
use crate::stats;

/// Discrete time average `(1/t_n) sum_k phi(X_{t_k}) eps` over `k = 0..n-1`.
pub fn time_average_discrete(path: &DiffusionPath, phi: impl Fn(f64) -> f64) -> f64 {
    let t = path.times();
    let x = path.values();
    let n = t.len() - 1;
    let t_n = path.path.horizon();
    let mut acc = 0.0;
    for k in 0..n {
        acc += phi(x[k]) * (t[k + 1] - t[k]);
    }
    acc / t_n
}

/// A test function with its declared growth data `|phi| + |phi'| <= c (1+|y|^p)`.
#[derive(Clone)]
pub struct PhiSpec {
    pub name: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub growth_constant: f64,
    pub growth_order: u32,
}

impl PhiSpec {
    pub fn eval(&self, y: f64) -> f64 {
        (self.f)(y)
    }

    pub fn identity() -> Self {
        Self { name: "identity".into(), f: Arc::new(|y| y), growth_constant: 1.0, growth_order: 1 }
    }

    pub fn square() -> Self {
        Self { name: "square".into(), f: Arc::new(|y| y * y), growth_constant: 2.0, growth_order: 2 }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "identity" => Ok(Self::identity()),
            "square" => Ok(Self::square()),
            other => Err(Error::Config(format!("unknown phi '{other}'"))),
        }
    }
}

/// One horizon row of an ergodic convergence study.
#[derive(Debug, Clone)]
pub struct ErgodicRow {
    pub horizon: f64,
    pub n: usize,
    pub replicates: usize,
    pub mean: f64,
    pub sd: f64,
    pub mad: f64,
    pub reference: f64,
    /// set when the (gamma, m, p, H) condition fails for this run
    pub gamma_flagged: bool,
}

#[derive(Debug, Clone)]
pub struct ErgodicStudy {
    pub rows: Vec<ErgodicRow>,
    /// long-horizon stationary estimate of `E[phi(X_bar)]`
    pub reference: f64,
}

/// Mean and spread of discrete time averages across replicates per horizon,
/// with a stationary-sample estimate of the limit as reference. Runs whose
/// gamma violates the ergodic condition are still produced, flagged.
pub fn ergodic_convergence_study(
    drift: &DriftSpec,
    phi: &PhiSpec,
    h: f64,
    horizons: &[f64],
    gamma: f64,
    replicates: usize,
    seed: RngSeed,
) -> Result<ErgodicStudy> {
    let flagged = !gamma_condition(gamma, drift.growth_order, phi.growth_order, h);

    // stationary reference from burn-in terminal draws, on its own streams
    let burn_in = (10.0 / drift.dissipativity).max(10.0);
    let ref_grid = ObservationGrid::with_points(burn_in, (burn_in / 0.01).round() as usize)?;
    let ref_seeds: Vec<RngSeed> = (0..2000).map(|r| seed.offset((1 << 32) + r)).collect();
    let stat = stationary_sample(drift, h, &ref_grid, &ref_seeds)?;
    let reference = stats::mean(&stat.iter().map(|&y| phi.eval(y)).collect::<Vec<_>>());

    let mut rows = Vec::with_capacity(horizons.len());
    for (hz_idx, &horizon) in horizons.iter().enumerate() {
        let grid = ObservationGrid::from_horizon(horizon, gamma)?;
        let gen = CirculantFbm::new(h, &grid)?;
        let averages: Vec<f64> = (0..replicates)
            .into_par_iter()
            .map(|r| {
                let s = seed.offset((hz_idx as u64) * replicates as u64 + r as u64);
                let noise = gen.sample(s);
                let path = euler_solve(drift, 0.0, &noise)?;
                Ok(time_average_discrete(&path, |y| phi.eval(y)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(ErgodicRow {
            horizon,
            n: grid.n,
            replicates,
            mean: stats::mean(&averages),
            sd: stats::std_dev(&averages),
            mad: stats::mad(&averages),
            reference,
            gamma_flagged: flagged,
        });
    }
    Ok(ErgodicStudy { rows, reference })
}

/// One horizon row of an event-probability study.
#[derive(Debug, Clone)]
pub struct EventRow {
    pub horizon: f64,
    pub n: usize,
    pub replicates: usize,
    pub frequency: f64,
}

/// Empirical frequency of conditioning-event membership per horizon.
///
/// The exponent window is validated up front: the NW mechanism needs
/// `beta < 1 - H`, the discrete LL one `1 - gamma H < beta < 1 - H`.
pub fn event_probability_study(
    drift: &DriftSpec,
    cfg: &EstimatorConfig,
    which: EstimatorKind,
    horizons: &[f64],
    gamma: f64,
    replicates: usize,
    seed: RngSeed,
) -> Result<Vec<EventRow>> {
    let h = cfg.hurst.h;
    let hi = 1.0 - h;
    let lo = match which {
        EstimatorKind::Nw => 0.0,
        EstimatorKind::Ll => (1.0 - gamma * h).max(0.0),
    };
    if !(lo < cfg.beta && cfg.beta < hi) {
        return Err(Error::InvalidRegime(format!(
            "beta = {} outside the admissible window ({lo:.4}, {hi:.4}) for {which}",
            cfg.beta
        )));
    }
    let mut rows = Vec::with_capacity(horizons.len());
    for (hz_idx, &horizon) in horizons.iter().enumerate() {
        let grid = ObservationGrid::from_horizon(horizon, gamma)?;
        let gen = CirculantFbm::new(h, &grid)?;
        let hits: Vec<bool> = (0..replicates)
            .into_par_iter()
            .map(|r| {
                let s = seed.offset((hz_idx as u64) * replicates as u64 + r as u64);
                let noise = gen.sample(s);
                let path = euler_solve(drift, 0.0, &noise)?;
                Ok(estimate(&path, cfg, which).event_member)
            })
            .collect::<Result<Vec<bool>>>()?;
        let frequency = hits.iter().filter(|&&b| b).count() as f64 / replicates as f64;
        rows.push(EventRow { horizon, n: grid.n, replicates, frequency });
    }
    Ok(rows)
}
