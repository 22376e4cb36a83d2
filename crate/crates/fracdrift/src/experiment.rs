//! Experiment runners: seeded orchestration over replicates, cells and
//! horizons, producing report tables. Every cell is reproducible from
//! (config, master seed); replicate `r` of cell `c` always draws from stream
//! `c * replicates + r`, so execution order and worker count do not matter.

use std::path::Path;

use rayon::prelude::*;

use crate::bounds::{ll_bound_discrete, nw_bound_discrete, BoundConstants};
use crate::config::{
    ConsistencyConfig, DeviationConfig, ErgodicConfig, EstimateConfig, SimulateConfig,
};
use crate::ergodic::{ergodic_convergence_study, event_probability_study, ErgodicRow, EventRow, PhiSpec};
use crate::error::{Error, Result};
use crate::estimator::{
    bandwidth_schedule, estimate, BandwidthMode, EstimatorConfig, EstimatorKind, ScheduleParams,
};
use crate::fbm::{CholeskyFbm, CirculantFbm};
use crate::grid::ObservationGrid;
use crate::hurst::HurstConstants;
use crate::martingale::fundamental_martingale_path;
use crate::path::{PathLabel, SampledPath};
use crate::report::Table;
use crate::rng::RngSeed;
use crate::sde::{euler_solve, DiffusionPath, DriftSpec};
use crate::stats;

/// Worst deviation of the drift from its tangent line over the window,
/// probed on a dense grid (2001 points).
pub fn delta_xh(drift: &DriftSpec, x: f64, h: f64) -> f64 {
    let b_x = drift.eval(x);
    let bp_x = drift.eval_prime(x);
    let mut worst: f64 = 0.0;
    for i in 0..=2000 {
        let z = x - h + 2.0 * h * i as f64 / 2000.0;
        worst = worst.max((drift.eval(z) - b_x - bp_x * (z - x)).abs());
    }
    worst
}

fn simulate_cell(
    gen: &CirculantFbm,
    drift: &DriftSpec,
    x0: f64,
    seed: RngSeed,
    cell: u64,
    replicates: usize,
) -> Result<Vec<DiffusionPath>> {
    (0..replicates)
        .into_par_iter()
        .map(|r| {
            let noise = gen.sample(seed.offset(cell * replicates as u64 + r as u64));
            euler_solve(drift, x0, &noise)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// consistency
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ConsistencyCell {
    pub hurst: f64,
    pub estimator: EstimatorKind,
    pub horizon: f64,
    pub n: usize,
    pub bandwidth: f64,
    pub median_abs_error: f64,
    pub q25_abs_error: f64,
    pub q75_abs_error: f64,
    pub mean_error: f64,
}

#[derive(Debug, Clone)]
pub struct ArmVerdict {
    pub hurst: f64,
    pub estimator: EstimatorKind,
    pub first_median: f64,
    pub last_median: f64,
    pub required_factor: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct ConsistencyReport {
    pub cells: Vec<ConsistencyCell>,
    pub verdicts: Vec<ArmVerdict>,
}

impl ConsistencyReport {
    pub fn pass(&self) -> bool {
        !self.verdicts.is_empty() && self.verdicts.iter().all(|v| v.pass)
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(vec![
            "hurst", "estimator", "horizon", "n", "bandwidth", "median_abs_error",
            "q25_abs_error", "q75_abs_error", "mean_error",
        ]);
        for c in &self.cells {
            t.push(vec![
                c.hurst.into(),
                c.estimator.to_string().into(),
                c.horizon.into(),
                c.n.into(),
                c.bandwidth.into(),
                c.median_abs_error.into(),
                c.q25_abs_error.into(),
                c.q75_abs_error.into(),
                c.mean_error.into(),
            ]);
        }
        t
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        for v in &self.verdicts {
            s.push_str(&format!(
                "consistency {} H={}: median |error| {:.4} -> {:.4} (need factor {:.2}): {}\n",
                v.estimator,
                v.hurst,
                v.first_median,
                v.last_median,
                v.required_factor,
                if v.pass { "PASS" } else { "FAIL" }
            ));
        }
        s
    }
}

pub fn run_consistency(cfg: &ConsistencyConfig) -> Result<ConsistencyReport> {
    let drift = cfg.drift.build()?;
    let b_x = drift.eval(cfg.x);
    let seed = RngSeed::new(cfg.seed, 0);
    let mut cells = Vec::new();
    let mut verdicts = Vec::new();
    let mut cell_idx: u64 = 0;

    let arms: Vec<(EstimatorKind, &crate::config::ConsistencyArm)> = [
        cfg.nw.as_ref().map(|a| (EstimatorKind::Nw, a)),
        cfg.ll.as_ref().map(|a| (EstimatorKind::Ll, a)),
    ]
    .into_iter()
    .flatten()
    .collect();

    for &(kind, arm) in &arms {
        for &h in &arm.hursts {
            let hurst = HurstConstants::derive(h)?;
            let mut medians = Vec::new();
            for &horizon in &arm.horizons {
                let (mode, lipschitz) = match kind {
                    EstimatorKind::Nw => (BandwidthMode::NwDiscrete, drift.dissipativity),
                    EstimatorKind::Ll => (BandwidthMode::Ll, drift.local_lipschitz),
                };
                let bandwidth = bandwidth_schedule(
                    mode,
                    &ScheduleParams {
                        lipschitz,
                        local_order: drift.local_order,
                        beta: arm.beta,
                        hurst_h: h,
                        t: horizon,
                    },
                )?;
                let grid = ObservationGrid::from_horizon(horizon, arm.gamma)?;
                let gen = CirculantFbm::new(h, &grid)?;
                let paths = simulate_cell(&gen, &drift, cfg.x, seed, cell_idx, cfg.replicates)?;
                cell_idx += 1;
                let est_cfg = EstimatorConfig::new(cfg.x, bandwidth, 1.0, arm.beta, hurst);
                let errors: Vec<f64> = paths
                    .par_iter()
                    .map(|p| estimate(p, &est_cfg, kind).value - b_x)
                    .collect();
                let abs: Vec<f64> = errors.iter().map(|e| e.abs()).collect();
                let med = stats::median(&abs);
                medians.push(med);
                cells.push(ConsistencyCell {
                    hurst: h,
                    estimator: kind,
                    horizon,
                    n: grid.n,
                    bandwidth,
                    median_abs_error: med,
                    q25_abs_error: stats::quantile(&abs, 0.25),
                    q75_abs_error: stats::quantile(&abs, 0.75),
                    mean_error: stats::mean(&errors),
                });
            }
            let first = medians[0];
            let last = *medians.last().unwrap();
            verdicts.push(ArmVerdict {
                hurst: h,
                estimator: kind,
                first_median: first,
                last_median: last,
                required_factor: arm.pass_factor,
                pass: last * arm.pass_factor <= first,
            });
        }
    }
    Ok(ConsistencyReport { cells, verdicts })
}

// ---------------------------------------------------------------------------
// deviation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct DeviationCell {
    pub hurst: f64,
    pub horizon: f64,
    pub n: usize,
    pub estimator: EstimatorKind,
    pub threshold: f64,
    pub raw_bound: f64,
    pub clipped_bound: f64,
    pub vacuous: bool,
    /// horizon below the validity floor (tau0 for NW; the theorem gives no
    /// explicit floor for discrete LL)
    pub below_validity_floor: bool,
    pub tau0: f64,
    pub empirical: f64,
    pub se: f64,
    pub replicates: usize,
    pub event_frequency: f64,
    /// None when the cell is excluded from the verdict (vacuous or
    /// sub-threshold)
    pub pass: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct DeviationReport {
    pub cells: Vec<DeviationCell>,
}

impl DeviationReport {
    pub fn pass(&self) -> bool {
        let judged: Vec<&DeviationCell> = self.cells.iter().filter(|c| c.pass.is_some()).collect();
        !judged.is_empty() && judged.iter().all(|c| c.pass == Some(true))
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(vec![
            "hurst", "horizon", "n", "estimator", "threshold", "raw_bound", "clipped_bound",
            "vacuous", "below_validity_floor", "tau0", "empirical", "se", "replicates",
            "event_frequency", "pass",
        ]);
        for c in &self.cells {
            t.push(vec![
                c.hurst.into(),
                c.horizon.into(),
                c.n.into(),
                c.estimator.to_string().into(),
                c.threshold.into(),
                c.raw_bound.into(),
                c.clipped_bound.into(),
                c.vacuous.into(),
                c.below_validity_floor.into(),
                c.tau0.into(),
                c.empirical.into(),
                c.se.into(),
                c.replicates.into(),
                c.event_frequency.into(),
                match c.pass {
                    Some(true) => "pass",
                    Some(false) => "fail",
                    None => "excluded",
                }
                .into(),
            ]);
        }
        t
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        for c in &self.cells {
            s.push_str(&format!(
                "deviation {} H={} t={}: empirical {:.4} vs bound {:.4} ({}): {}\n",
                c.estimator,
                c.hurst,
                c.horizon,
                c.empirical,
                c.clipped_bound,
                if c.vacuous { "vacuous" } else { "binding" },
                match c.pass {
                    Some(true) => "PASS",
                    Some(false) => "FAIL",
                    None => "excluded",
                }
            ));
        }
        s
    }
}

pub fn run_deviation(cfg: &DeviationConfig) -> Result<DeviationReport> {
    let drift = cfg.drift.build()?;
    let b_x = drift.eval(cfg.x);
    let dxh = delta_xh(&drift, cfg.x, cfg.bandwidth);
    let seed = RngSeed::new(cfg.seed, 0);
    let kinds = cfg.estimator.kinds();
    let mut cells = Vec::new();
    let mut cell_idx: u64 = 0;

    for &h in &cfg.hursts {
        let hurst = HurstConstants::derive(h)?;
        let mut constants = Vec::new();
        for &kind in &kinds {
            let zeta = match kind {
                EstimatorKind::Nw => cfg.zeta_nw,
                EstimatorKind::Ll => cfg.zeta_ll,
            };
            constants.push((
                kind,
                BoundConstants::derive(
                    &hurst,
                    cfg.rho,
                    cfg.beta,
                    zeta,
                    drift.dissipativity,
                    drift.local_lipschitz,
                    drift.growth_constant,
                    drift.growth_order,
                    cfg.gamma,
                    cfg.x,
                    cfg.bandwidth,
                )?,
            ));
        }
        for &horizon in &cfg.horizons {
            let grid = ObservationGrid::from_horizon(horizon, cfg.gamma)?;
            let gen = CirculantFbm::new(h, &grid)?;
            let paths = simulate_cell(&gen, &drift, cfg.x, seed, cell_idx, cfg.replicates)?;
            cell_idx += 1;
            for (kind, bc) in &constants {
                let est_cfg = EstimatorConfig::new(cfg.x, cfg.bandwidth, cfg.rho, cfg.beta, hurst);
                let outcomes: Vec<crate::estimator::EstimateOutcome> =
                    paths.par_iter().map(|p| estimate(p, &est_cfg, *kind)).collect();

                let (threshold, raw_bound, below_floor) = match kind {
                    EstimatorKind::Nw => {
                        let threshold = drift.dissipativity * cfg.bandwidth
                            + bc.c_xhl * grid.epsilon
                            + bc.zeta;
                        match nw_bound_discrete(bc, &hurst, horizon) {
                            Ok(b) => (threshold, b, false),
                            Err(Error::BelowTau0 { .. }) => (threshold, f64::NAN, true),
                            Err(e) => return Err(e),
                        }
                    }
                    EstimatorKind::Ll => {
                        let out = ll_bound_discrete(
                            bc,
                            &hurst,
                            horizon,
                            dxh,
                            grid.epsilon,
                            cfg.ll_hoelder_exp,
                        )?;
                        (out.threshold, out.bound, false)
                    }
                };
                let joint_hits = outcomes
                    .iter()
                    .filter(|o| o.event_member && (o.value - b_x).abs() >= threshold)
                    .count();
                let empirical = joint_hits as f64 / cfg.replicates as f64;
                let se = stats::binomial_se(empirical, cfg.replicates);
                let event_frequency = outcomes.iter().filter(|o| o.event_member).count() as f64
                    / cfg.replicates as f64;
                let vacuous = raw_bound.is_nan() || raw_bound > 1.0;
                let clipped = if raw_bound.is_nan() { f64::NAN } else { raw_bound.min(1.0) };
                let pass = if below_floor || vacuous {
                    None
                } else {
                    Some(empirical <= clipped + 3.0 * se)
                };
                cells.push(DeviationCell {
                    hurst: h,
                    horizon,
                    n: grid.n,
                    estimator: *kind,
                    threshold,
                    raw_bound,
                    clipped_bound: clipped,
                    vacuous,
                    below_validity_floor: below_floor,
                    tau0: bc.tau0,
                    empirical,
                    se,
                    replicates: cfg.replicates,
                    event_frequency,
                    pass,
                });
            }
        }
    }
    Ok(DeviationReport { cells })
}

// ---------------------------------------------------------------------------
// ergodic
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ErgodicReport {
    pub rows: Vec<ErgodicRow>,
    pub reference: f64,
    pub event_rows: Vec<EventRow>,
    pub event_target: Option<f64>,
    pub mean_ok: bool,
    pub spread_ok: bool,
    pub event_ok: bool,
}

/// Nonincreasing up to `allowed` inversions.
fn monotone_with_slack(xs: &[f64], allowed: usize, decreasing: bool) -> bool {
    let mut inversions = 0;
    for w in xs.windows(2) {
        let bad = if decreasing { w[1] > w[0] } else { w[1] < w[0] };
        if bad {
            inversions += 1;
        }
    }
    inversions <= allowed
}

impl ErgodicReport {
    pub fn pass(&self) -> bool {
        self.mean_ok && self.spread_ok && self.event_ok
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(vec![
            "horizon", "n", "replicates", "mean", "sd", "mad", "reference", "flag",
        ]);
        for r in &self.rows {
            t.push(vec![
                r.horizon.into(),
                r.n.into(),
                r.replicates.into(),
                r.mean.into(),
                r.sd.into(),
                r.mad.into(),
                r.reference.into(),
                if r.gamma_flagged { "gamma_violated" } else { "" }.into(),
            ]);
        }
        t
    }

    pub fn event_table(&self) -> Table {
        let mut t = Table::new(vec!["horizon", "n", "replicates", "frequency"]);
        for r in &self.event_rows {
            t.push(vec![r.horizon.into(), r.n.into(), r.replicates.into(), r.frequency.into()]);
        }
        t
    }

    pub fn summary(&self) -> String {
        let last = self.rows.last();
        let mut s = format!(
            "ergodic: reference {:.4}, largest-horizon mean {:.4} (mean {}), spread {}\n",
            self.reference,
            last.map(|r| r.mean).unwrap_or(f64::NAN),
            if self.mean_ok { "PASS" } else { "FAIL" },
            if self.spread_ok { "PASS" } else { "FAIL" }
        );
        if let Some(target) = self.event_target {
            s.push_str(&format!(
                "event frequency: final {:.3} vs target {:.2}: {}\n",
                self.event_rows.last().map(|r| r.frequency).unwrap_or(f64::NAN),
                target,
                if self.event_ok { "PASS" } else { "FAIL" }
            ));
        }
        s
    }
}

pub fn run_ergodic(cfg: &ErgodicConfig) -> Result<ErgodicReport> {
    let drift = cfg.drift.build()?;
    let phi = PhiSpec::by_name(&cfg.phi)?;
    let seed = RngSeed::new(cfg.seed, 0);
    let study = ergodic_convergence_study(
        &drift,
        &phi,
        cfg.hurst,
        &cfg.horizons,
        cfg.gamma,
        cfg.replicates,
        seed,
    )?;
    let last = study.rows.last().ok_or_else(|| Error::Config("no horizons".into()))?;
    let batch_se = last.sd / (last.replicates as f64).sqrt();
    let mean_ok = (last.mean - study.reference).abs() <= 3.0 * batch_se;
    let mads: Vec<f64> = study.rows.iter().map(|r| r.mad).collect();
    let spread_ok = monotone_with_slack(&mads, 1, true);

    let (event_rows, event_target, event_ok) = match &cfg.event {
        Some(arm) => {
            let hurst = HurstConstants::derive(cfg.hurst)?;
            let est_cfg = EstimatorConfig::new(arm.x, arm.bandwidth, arm.rho, arm.beta, hurst);
            let kind = match arm.estimator {
                crate::config::EstimatorChoice::Ll => EstimatorKind::Ll,
                _ => EstimatorKind::Nw,
            };
            let rows = event_probability_study(
                &drift,
                &est_cfg,
                kind,
                &arm.horizons,
                arm.gamma,
                arm.replicates,
                seed.offset(1 << 40),
            )?;
            let freqs: Vec<f64> = rows.iter().map(|r| r.frequency).collect();
            let ok = monotone_with_slack(&freqs, 1, false)
                && freqs.last().is_some_and(|&f| f >= arm.target_frequency);
            (rows, Some(arm.target_frequency), ok)
        }
        None => (Vec::new(), None, true),
    };

    Ok(ErgodicReport {
        rows: study.rows,
        reference: study.reference,
        event_rows,
        event_target,
        mean_ok,
        spread_ok,
        event_ok,
    })
}

// ---------------------------------------------------------------------------
// simulate / estimate
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct SimulateReport {
    pub files: Vec<String>,
}

/// Generate replicate fBm + diffusion paths (optionally the martingale
/// transform) as CSV files named `fbm_r<k>.csv`, `diffusion_r<k>.csv`,
/// `martingale_r<k>.csv` under `out_dir`.
pub fn run_simulate(cfg: &SimulateConfig, out_dir: &Path) -> Result<SimulateReport> {
    let drift = cfg.drift.build()?;
    let grid = ObservationGrid::from_horizon(cfg.horizon, cfg.gamma)?;
    let hurst = HurstConstants::derive(cfg.hurst)?;
    std::fs::create_dir_all(out_dir)?;
    let mut files = Vec::new();

    enum Gen {
        Chol(CholeskyFbm),
        Circ(CirculantFbm),
    }
    let gen = match cfg.generator {
        crate::config::GeneratorChoice::Cholesky => Gen::Chol(CholeskyFbm::new(cfg.hurst, &grid)?),
        crate::config::GeneratorChoice::Circulant => Gen::Circ(CirculantFbm::new(cfg.hurst, &grid)?),
    };

    for r in 0..cfg.replicates {
        let seed = RngSeed::new(cfg.seed, r as u64);
        let noise = match &gen {
            Gen::Chol(g) => g.sample(seed),
            Gen::Circ(g) => g.sample(seed),
        };
        let x = euler_solve(&drift, cfg.x0, &noise)?;
        let fbm_file = out_dir.join(format!("fbm_r{r}.csv"));
        write_path_csv(&fbm_file, &noise)?;
        files.push(fbm_file.display().to_string());
        let diff_file = out_dir.join(format!("diffusion_r{r}.csv"));
        write_path_csv(&diff_file, &x.path)?;
        files.push(diff_file.display().to_string());
        if cfg.export_martingale {
            let m = fundamental_martingale_path(&noise, &hurst)?;
            let m_file = out_dir.join(format!("martingale_r{r}.csv"));
            write_path_csv(&m_file, &m)?;
            files.push(m_file.display().to_string());
        }
    }
    Ok(SimulateReport { files })
}

fn write_path_csv(path: &Path, p: &SampledPath) -> Result<()> {
    let mut buf = Vec::new();
    p.write_csv(&mut buf)?;
    std::fs::write(path, buf)?;
    Ok(())
}

/// Batch estimation over CSV paths: one row per (input, estimator).
pub fn run_estimate(cfg: &EstimateConfig) -> Result<Table> {
    let hurst = HurstConstants::derive(cfg.hurst)?;
    let est_cfg = EstimatorConfig::new(cfg.x, cfg.bandwidth, cfg.rho, cfg.beta, hurst);
    let mut t = Table::new(vec![
        "seed", "t_n", "n", "h", "estimator", "value", "event", "v0", "v1", "v2", "delta",
        "lambda_min",
    ]);
    for input in &cfg.inputs {
        let text = std::fs::read_to_string(input)?;
        let path = SampledPath::read_csv(&text, PathLabel::Diffusion)?;
        let x0 = path.values()[0];
        let dp = DiffusionPath { path, x0, drift_name: "external".into() };
        let replicate = replicate_id_from_name(input);
        for kind in cfg.estimator.kinds() {
            let o = estimate(&dp, &est_cfg, kind);
            t.push(vec![
                replicate.clone().into(),
                dp.path.horizon().into(),
                (dp.path.len() - 1).into(),
                cfg.bandwidth.into(),
                kind.to_string().into(),
                o.value.into(),
                o.event_member.into(),
                o.v0.into(),
                o.v1.into(),
                o.v2.into(),
                o.delta.into(),
                o.lambda_min.into(),
            ]);
        }
    }
    Ok(t)
}

/// Replicate id encoded in simulate output names (`..._r<k>.csv`), empty for
/// external files.
fn replicate_id_from_name(name: &str) -> String {
    let stem = name.rsplit('/').next().unwrap_or(name);
    stem.rsplit("_r")
        .next()
        .and_then(|tail| tail.strip_suffix(".csv"))
        .filter(|id| !id.is_empty() && id.chars().all(|c| c.is_ascii_digit()))
        .map(|id| id.to_string())
        .unwrap_or_default()
}
