//! The two drift estimators at a point, in discrete-observation form, with
//! their conditioning events and error decompositions. The continuous-time
//! definitions arise as the fine-grid limit of these sums, so there is no
//! separate quadrature code path.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hurst::HurstConstants;
use crate::kernel::Kernel;
use crate::sde::{DiffusionPath, DriftSpec};

/// Which estimator to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Nw,
    Ll,
}

impl std::fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EstimatorKind::Nw => write!(f, "nw"),
            EstimatorKind::Ll => write!(f, "ll"),
        }
    }
}

/// Target point, bandwidth, event constants and kernel for one estimation.
#[derive(Debug, Clone)]
pub struct EstimatorConfig {
    pub x: f64,
    pub bandwidth: f64,
    pub rho: f64,
    pub beta: f64,
    pub kernel: Kernel,
    pub hurst: HurstConstants,
}

impl EstimatorConfig {
    pub fn new(x: f64, bandwidth: f64, rho: f64, beta: f64, hurst: HurstConstants) -> Self {
        assert!(bandwidth > 0.0 && rho > 0.0 && beta > 0.0);
        Self { x, bandwidth, rho, beta, kernel: Kernel::Biweight, hurst }
    }
}

/// A point estimate together with the conditioning-event membership and the
/// internal statistics behind it.
///
/// `numerator / denominator = value` for both estimators: for NW these are
/// the kernel-weighted increment and occupation sums, for LL the weighted
/// normal-equation solution over its determinant `delta`. `v0, v1, v2` are
/// the design sums of Definition-4.3 form, `delta = v0 v2 - v1^2`, and
/// `lambda_min/lambda_max` are the eigenvalues of the 2x2 design matrix.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EstimateOutcome {
    pub value: f64,
    pub event_member: bool,
    pub numerator: f64,
    pub denominator: f64,
    pub v0: f64,
    pub v1: f64,
    pub v2: f64,
    pub delta: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
}

/// Event threshold `rho * t^{1-H+beta}` shared by both conditioning events.
pub fn nw_event_threshold(cfg: &EstimatorConfig, t_n: f64) -> f64 {
    cfg.rho * t_n.powf(1.0 - cfg.hurst.h + cfg.beta)
}

/// Eigenvalues of the symmetric design matrix [[v0, v1], [v1, v2]] via the
/// closed form `(v0 + v2 -+ sqrt((v0 + v2)^2 - 4 delta)) / 2`.
pub fn design_eigenvalues(v0: f64, v1: f64, v2: f64) -> (f64, f64) {
    let delta = v0 * v2 - v1 * v1;
    let trace = v0 + v2;
    // the discriminant equals (v0 - v2)^2 + 4 v1^2 >= 0; clamp fp cancellation
    let disc = (trace * trace - 4.0 * delta).max(0.0).sqrt();
    (0.5 * (trace - disc), 0.5 * (trace + disc))
}

struct DesignSums {
    v0: f64,
    v1: f64,
    v2: f64,
}

fn path_geometry(path: &DiffusionPath) -> (usize, f64, f64) {
    let n = path.path.len() - 1;
    assert!(n >= 2, "estimator needs a grid with n >= 2");
    (n, path.path.horizon(), path.path.mesh())
}

/// Design sums `v_j = sum_{k=1}^{n-1} alpha_H^2 (t_n - t_k)^{1-2H} u_k^j N(u_k) eps`
/// with `u_k = (X_k - x)/h`.
fn design_sums(path: &DiffusionPath, cfg: &EstimatorConfig) -> DesignSums {
    let (n, t_n, eps) = path_geometry(path);
    let x = path.values();
    let t = path.times();
    let e = 1.0 - 2.0 * cfg.hurst.h;
    let a2 = cfg.hurst.alpha_h * cfg.hurst.alpha_h;
    let (mut v0, mut v1, mut v2) = (0.0, 0.0, 0.0);
    for k in 1..n {
        let u = (x[k] - cfg.x) / cfg.bandwidth;
        let nk = cfg.kernel.evaluate(u);
        if nk == 0.0 {
            continue;
        }
        let c = a2 * (t_n - t[k]).powf(e) * nk * eps;
        v0 += c;
        v1 += c * u;
        v2 += c * u * u;
    }
    DesignSums { v0, v1, v2 }
}

/// Nadaraya-Watson estimate
/// `sum_k (t_n-t_k)^{1-2H} N(u_k) dX_k / sum_k (t_n-t_k)^{1-2H} N(u_k) eps`
/// over `k = 0..n-1`, with the convention `a/0 := 0`. The conditioning event
/// is `alpha_H * denominator >= rho t_n^{1-H+beta}` (closed inequality).
pub fn nw_estimate(path: &DiffusionPath, cfg: &EstimatorConfig) -> EstimateOutcome {
    let (n, t_n, eps) = path_geometry(path);
    let x = path.values();
    let t = path.times();
    let e = 1.0 - 2.0 * cfg.hurst.h;
    let (mut num, mut den) = (0.0, 0.0);
    for k in 0..n {
        let u = (x[k] - cfg.x) / cfg.bandwidth;
        let nk = cfg.kernel.evaluate(u);
        if nk == 0.0 {
            continue;
        }
        let w = (t_n - t[k]).powf(e) * nk;
        num += w * (x[k + 1] - x[k]);
        den += w * eps;
    }
    let value = if den > 0.0 { num / den } else { 0.0 };
    let event_member = cfg.hurst.alpha_h * den >= nw_event_threshold(cfg, t_n);
    let s = design_sums(path, cfg);
    let delta = (s.v0 * s.v2 - s.v1 * s.v1).max(0.0);
    let (lambda_min, lambda_max) = design_eigenvalues(s.v0, s.v1, s.v2);
    EstimateOutcome {
        value,
        event_member,
        numerator: num,
        denominator: den,
        v0: s.v0,
        v1: s.v1,
        v2: s.v2,
        delta,
        lambda_min,
        lambda_max,
    }
}

/// Discretized locally linear estimate over `k = 1..n-1`:
/// `sum_k [v2/delta - (v1/delta) u_k] alpha_H^2 (t_n-t_k)^{1-2H} N(u_k) dX_k`,
/// with value 0 and event false when `delta = 0`. The conditioning event is
/// `lambda_min >= rho t_n^{1-H+beta}`.
pub fn ll_estimate(path: &DiffusionPath, cfg: &EstimatorConfig) -> EstimateOutcome {
    let (n, t_n, _) = path_geometry(path);
    let x = path.values();
    let t = path.times();
    let e = 1.0 - 2.0 * cfg.hurst.h;
    let a2 = cfg.hurst.alpha_h * cfg.hurst.alpha_h;
    let s = design_sums(path, cfg);
    let delta = s.v0 * s.v2 - s.v1 * s.v1;
    let (lambda_min, lambda_max) = design_eigenvalues(s.v0, s.v1, s.v2);
    let mut out = EstimateOutcome {
        value: 0.0,
        event_member: false,
        numerator: 0.0,
        denominator: delta.max(0.0),
        v0: s.v0,
        v1: s.v1,
        v2: s.v2,
        delta: delta.max(0.0),
        lambda_min,
        lambda_max,
    };
    if delta <= 0.0 {
        return out;
    }
    let mut num = 0.0;
    for k in 1..n {
        let u = (x[k] - cfg.x) / cfg.bandwidth;
        let nk = cfg.kernel.evaluate(u);
        if nk == 0.0 {
            continue;
        }
        num += (s.v2 - s.v1 * u) * a2 * (t_n - t[k]).powf(e) * nk * (x[k + 1] - x[k]);
    }
    out.numerator = num;
    out.value = num / delta;
    out.event_member = lambda_min >= nw_event_threshold(cfg, t_n);
    out
}

pub fn estimate(path: &DiffusionPath, cfg: &EstimatorConfig, which: EstimatorKind) -> EstimateOutcome {
    match which {
        EstimatorKind::Nw => nw_estimate(path, cfg),
        EstimatorKind::Ll => ll_estimate(path, cfg),
    }
}

/// Evaluate many (path, config) pairs concurrently.
pub fn estimate_batch(
    jobs: &[(&DiffusionPath, EstimatorConfig, EstimatorKind)],
) -> Vec<EstimateOutcome> {
    jobs.par_iter()
        .map(|(path, cfg, which)| estimate(path, cfg, *which))
        .collect()
}

/// Split of the realized estimation error into the stochastic term, the
/// local-approximation term and the discretization term. When the path was
/// not generated with a refinement, the trajectory term cannot be separated
/// and stays merged in `xi` (`traj_merged` is set).
#[derive(Debug, Clone, Copy)]
pub struct ErrorDecomposition {
    pub xi: f64,
    pub r_loc: f64,
    pub r_traj: f64,
    pub traj_merged: bool,
}

impl ErrorDecomposition {
    pub fn total(&self) -> f64 {
        self.xi + self.r_loc + self.r_traj
    }
}

/// Exact decomposition of `estimate - b(x)` for a known true drift.
///
/// `refinement` carries the finer trajectory the observed path was subsampled
/// from, together with the subsampling factor; it supplies the within-step
/// drift integrals that separate the trajectory term from the noise term.
pub fn decompose_error(
    path: &DiffusionPath,
    cfg: &EstimatorConfig,
    true_drift: &DriftSpec,
    which: EstimatorKind,
    refinement: Option<(&DiffusionPath, usize)>,
) -> Result<ErrorDecomposition> {
    let (n, t_n, eps) = path_geometry(path);
    let x = path.values();
    let t = path.times();
    let e = 1.0 - 2.0 * cfg.hurst.h;
    let a2 = cfg.hurst.alpha_h * cfg.hurst.alpha_h;

    // per-step drift integrals int_{t_k}^{t_{k+1}} b(X_s) ds on the fine grid
    let drift_integrals: Option<Vec<f64>> = match refinement {
        Some((fine, factor)) => {
            if fine.path.len() != n * factor + 1 {
                return Err(Error::Config(format!(
                    "refinement has {} points, expected {}",
                    fine.path.len(),
                    n * factor + 1
                )));
            }
            let xf = fine.values();
            let eps_f = fine.path.mesh();
            let mut out = Vec::with_capacity(n);
            for k in 0..n {
                let mut acc = 0.0;
                for j in k * factor..(k + 1) * factor {
                    acc += true_drift.eval(xf[j]) * eps_f;
                }
                out.push(acc);
            }
            Some(out)
        }
        None => None,
    };

    // per-interval weights tau_k such that estimate = sum_k tau_k dX_k;
    // both estimators normalize so that sum_k tau_k eps = 1, which is what
    // makes the split below exact
    let weights: Vec<f64> = match which {
        EstimatorKind::Nw => {
            let mut den = 0.0;
            let mut w = vec![0.0; n];
            for k in 0..n {
                let u = (x[k] - cfg.x) / cfg.bandwidth;
                let wk = (t_n - t[k]).powf(e) * cfg.kernel.evaluate(u);
                w[k] = wk;
                den += wk * eps;
            }
            if den <= 0.0 {
                return Err(Error::InvalidRegime(
                    "degenerate NW denominator; decomposition undefined under the a/0 := 0 convention".into(),
                ));
            }
            w.iter().map(|wk| wk / den).collect()
        }
        EstimatorKind::Ll => {
            let s = design_sums(path, cfg);
            let delta = s.v0 * s.v2 - s.v1 * s.v1;
            if delta <= 0.0 {
                return Err(Error::InvalidRegime(
                    "degenerate LL design matrix; decomposition undefined under the zero convention".into(),
                ));
            }
            let mut w = vec![0.0; n];
            for k in 1..n {
                let u = (x[k] - cfg.x) / cfg.bandwidth;
                w[k] = (s.v2 / delta - s.v1 / delta * u)
                    * a2
                    * (t_n - t[k]).powf(e)
                    * cfg.kernel.evaluate(u);
            }
            w
        }
    };

    let b_x = true_drift.eval(cfg.x);
    let bp_x = true_drift.eval_prime(cfg.x);
    let mut r_loc = 0.0;
    let mut r_traj = 0.0;
    let mut xi = 0.0;
    for k in 0..n {
        if weights[k] == 0.0 {
            continue;
        }
        let local = match which {
            // b(X_k) - b(x)
            EstimatorKind::Nw => true_drift.eval(x[k]) - b_x,
            // delta_{x,h}(X_k) = b(X_k) - b(x) - b'(x)(X_k - x); the linear
            // part contributes nothing because sum tau_k (X_k - x) eps = 0
            EstimatorKind::Ll => true_drift.eval(x[k]) - b_x - bp_x * (x[k] - cfg.x),
        };
        r_loc += weights[k] * local * eps;
        let step_drift = true_drift.eval(x[k]) * eps;
        let integral = drift_integrals.as_ref().map(|v| v[k]).unwrap_or(step_drift);
        r_traj += weights[k] * (integral - step_drift);
        let noise = (x[k + 1] - x[k]) - integral;
        xi += weights[k] * noise;
    }
    Ok(ErrorDecomposition {
        xi,
        r_loc,
        r_traj,
        traj_merged: drift_integrals.is_none(),
    })
}

/// Which bandwidth schedule to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandwidthMode {
    /// `h^b = L_x^{-1} t^{-beta/2}` (continuous-observation rate)
    NwContinuous,
    /// `h = L^{-1} t^{-beta/2}` (discrete-observation rate)
    NwDiscrete,
    /// `h^2 = L_x^{-1} t^{H-1+beta/2}`, needs `beta < 2(1-H)`
    Ll,
}

#[derive(Debug, Clone, Copy)]
pub struct ScheduleParams {
    /// L or L_x depending on the mode
    pub lipschitz: f64,
    /// local Hölder order of the drift at the target (the NW-continuous
    /// exponent)
    pub local_order: f64,
    pub beta: f64,
    pub hurst_h: f64,
    pub t: f64,
}

/// Bandwidth at time `t` under the cited rate schedule.
pub fn bandwidth_schedule(mode: BandwidthMode, p: &ScheduleParams) -> Result<f64> {
    if !(p.lipschitz > 0.0 && p.beta > 0.0 && p.t > 0.0) {
        return Err(Error::Config("schedule parameters must be positive".into()));
    }
    match mode {
        BandwidthMode::NwContinuous => {
            Ok((p.t.powf(-p.beta / 2.0) / p.lipschitz).powf(1.0 / p.local_order))
        }
        BandwidthMode::NwDiscrete => Ok(p.t.powf(-p.beta / 2.0) / p.lipschitz),
        BandwidthMode::Ll => {
            if p.beta >= 2.0 * (1.0 - p.hurst_h) {
                return Err(Error::InvalidRegime(format!(
                    "ll schedule needs beta < 2(1-H) = {}, got beta = {}",
                    2.0 * (1.0 - p.hurst_h),
                    p.beta
                )));
            }
            Ok((p.t.powf(p.hurst_h - 1.0 + p.beta / 2.0) / p.lipschitz).sqrt())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::ObservationGrid;
    use crate::path::{PathLabel, SampledPath};
    use crate::rng::RngSeed;
    use crate::sde::euler_solve;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn zero_noise(t_n: f64, n: usize) -> SampledPath {
        let times: Vec<f64> = (0..=n).map(|k| k as f64 * t_n / n as f64).collect();
        SampledPath::new(times, vec![0.0; n + 1], PathLabel::Fbm)
    }

    fn cfg(h: f64, x: f64, bw: f64) -> EstimatorConfig {
        EstimatorConfig::new(x, bw, 1.0, 0.25, HurstConstants::derive(h).unwrap())
    }

    #[test]
    fn nw_constant_drift_zero_noise_is_exact() {
        let d = DriftSpec::constant(2.0);
        // start at the target so the path never leaves the window
        let path = euler_solve(&d, 0.0, &zero_noise(0.04, 100)).unwrap();
        let c = cfg(0.7, 0.04, 1.0);
        let out = nw_estimate(&path, &c);
        assert_relative_eq!(out.value, 2.0, max_relative = 1e-13);
    }

    #[test]
    fn nw_empty_window_uses_zero_convention() {
        let d = DriftSpec::constant(0.0);
        let path = euler_solve(&d, 0.0, &zero_noise(1.0, 50)).unwrap();
        let c = cfg(0.5, 50.0, 0.1);
        let out = nw_estimate(&path, &c);
        assert_eq!(out.value, 0.0);
        assert!(!out.event_member);
        assert_eq!(out.denominator, 0.0);
    }

    #[test]
    fn event_threshold_values() {
        let c = EstimatorConfig::new(0.0, 1.0, 2.0, 0.25, HurstConstants::derive(0.5).unwrap());
        assert_relative_eq!(nw_event_threshold(&c, 16.0), 16.0, max_relative = 1e-14);
        let c1 = EstimatorConfig::new(0.0, 1.0, 1.0, 0.5, HurstConstants::derive(0.5).unwrap());
        assert_relative_eq!(nw_event_threshold(&c1, 7.0), 7.0, max_relative = 1e-14);
        // monotone in t
        let mut prev = 0.0;
        for i in 1..50 {
            let th = nw_event_threshold(&c, i as f64);
            assert!(th > prev);
            prev = th;
        }
    }

    #[test]
    fn ll_linear_drift_zero_noise_recovers_intercept() {
        // b(z) = theta0 + theta1 (z - x)/h with the path inside the window
        let (x, h) = (0.0, 1.0);
        let (theta0, theta1) = (0.5, -0.8);
        let d = DriftSpec::custom("local_linear", move |z| theta0 + theta1 * (z - x) / h)
            .with_derivative(move |_| theta1 / h)
            .with_local(theta1.abs(), 1.0);
        let path = euler_solve(&d, 0.1, &zero_noise(0.5, 400)).unwrap();
        let c = cfg(0.3, x, h);
        let out = ll_estimate(&path, &c);
        assert_relative_eq!(out.value, theta0, max_relative = 1e-12);
    }

    #[test]
    fn design_eigenvalue_frozen_case() {
        // V = [[2,1],[1,2]]: eigenvalues 1 and 3, delta 3
        let (lo, hi) = design_eigenvalues(2.0, 1.0, 2.0);
        assert_relative_eq!(lo, 1.0, max_relative = 1e-14);
        assert_relative_eq!(hi, 3.0, max_relative = 1e-14);
        // diagonal case: v1 = 0, v0 = v2 = a
        let (lo, hi) = design_eigenvalues(0.7, 0.0, 0.7);
        assert_relative_eq!(lo, 0.7, max_relative = 1e-14);
        assert_relative_eq!(hi, 0.7, max_relative = 1e-14);
    }

    #[test]
    fn nw_and_ll_agree_on_constant_drift_zero_noise() {
        let d = DriftSpec::constant(1.5);
        let path = euler_solve(&d, 0.0, &zero_noise(0.06, 120)).unwrap();
        let c = cfg(0.5, 0.05, 1.0);
        let nw = nw_estimate(&path, &c);
        let ll = ll_estimate(&path, &c);
        assert_relative_eq!(nw.value, 1.5, max_relative = 1e-12);
        assert_relative_eq!(ll.value, 1.5, max_relative = 1e-12);
    }

    #[test]
    fn decomposition_constant_drift_has_no_bias_terms() {
        let d = DriftSpec::constant(2.0);
        let path = euler_solve(&d, 0.0, &zero_noise(0.04, 80)).unwrap();
        let c = cfg(0.7, 0.0, 1.0);
        let dec = decompose_error(&path, &c, &d, EstimatorKind::Nw, None).unwrap();
        assert_eq!(dec.r_loc, 0.0);
        assert_eq!(dec.r_traj, 0.0);
        let err = nw_estimate(&path, &c).value - 2.0;
        assert_relative_eq!(dec.total(), err, epsilon = 1e-12);
    }

    #[test]
    fn decomposition_sums_to_realized_error_with_refinement() {
        let d = DriftSpec::cubic();
        let factor = 8;
        let n_coarse = 256;
        let grid = ObservationGrid::with_points(4.0, n_coarse * factor).unwrap();
        let noise = crate::fbm::fbm_circulant(0.7, &grid, RngSeed::new(40, 4)).unwrap();
        let fine = euler_solve(&d, 0.2, &noise).unwrap();
        let coarse_times: Vec<f64> = (0..=n_coarse).map(|k| fine.times()[k * factor]).collect();
        let coarse_values: Vec<f64> = (0..=n_coarse).map(|k| fine.values()[k * factor]).collect();
        let coarse = DiffusionPath {
            path: SampledPath::new(coarse_times, coarse_values, PathLabel::Diffusion),
            x0: 0.2,
            drift_name: d.name.clone(),
        };
        let c = cfg(0.7, 0.0, 0.8);
        for which in [EstimatorKind::Nw, EstimatorKind::Ll] {
            let dec = decompose_error(&coarse, &c, &d, which, Some((&fine, factor))).unwrap();
            assert!(!dec.traj_merged);
            let err = estimate(&coarse, &c, which).value - d.eval(0.0);
            assert_relative_eq!(dec.total(), err, epsilon = 1e-10);
        }
    }

    #[test]
    fn decomposition_ll_linear_drift_has_zero_local_term() {
        let d = DriftSpec::linear(1.0);
        let grid = ObservationGrid::with_points(8.0, 2048).unwrap();
        let noise = crate::fbm::fbm_circulant(0.5, &grid, RngSeed::new(41, 0)).unwrap();
        let path = euler_solve(&d, 0.0, &noise).unwrap();
        let c = cfg(0.5, 0.0, 0.6);
        let dec = decompose_error(&path, &c, &d, EstimatorKind::Ll, None).unwrap();
        assert_relative_eq!(dec.r_loc, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn decomposition_nw_local_term_bounded_by_lipschitz_bandwidth() {
        let d = DriftSpec::linear(1.0);
        let grid = ObservationGrid::with_points(20.0, 4000).unwrap();
        for r in 0..20 {
            let noise = crate::fbm::fbm_circulant(0.5, &grid, RngSeed::new(42, r)).unwrap();
            let path = euler_solve(&d, 0.0, &noise).unwrap();
            let c = cfg(0.5, 0.0, 0.5);
            let dec = decompose_error(&path, &c, &d, EstimatorKind::Nw, None).unwrap();
            assert!(dec.r_loc.abs() <= d.dissipativity * c.bandwidth + 1e-12);
        }
    }

    #[test]
    fn bandwidth_schedule_examples() {
        let h = bandwidth_schedule(
            BandwidthMode::NwContinuous,
            &ScheduleParams { lipschitz: 1.0, local_order: 1.0, beta: 0.5, hurst_h: 0.5, t: 16.0 },
        )
        .unwrap();
        assert_relative_eq!(h, 0.5, max_relative = 1e-14);

        let h = bandwidth_schedule(
            BandwidthMode::Ll,
            &ScheduleParams { lipschitz: 1.0, local_order: 1.0, beta: 0.5, hurst_h: 0.5, t: 2.0 },
        )
        .unwrap();
        assert_relative_eq!(h, 2.0f64.powf(-0.125), max_relative = 1e-14);

        assert!(matches!(
            bandwidth_schedule(
                BandwidthMode::Ll,
                &ScheduleParams { lipschitz: 1.0, local_order: 1.0, beta: 1.2, hurst_h: 0.5, t: 2.0 },
            ),
            Err(Error::InvalidRegime(_))
        ));
    }

    #[test]
    fn bandwidth_decreasing_in_t() {
        for mode in [BandwidthMode::NwContinuous, BandwidthMode::NwDiscrete, BandwidthMode::Ll] {
            let mut prev = f64::INFINITY;
            for i in 1..30 {
                let t = 2.0 + 3.0 * i as f64;
                let h = bandwidth_schedule(
                    mode,
                    &ScheduleParams { lipschitz: 1.0, local_order: 1.0, beta: 0.4, hurst_h: 0.6, t },
                )
                .unwrap();
                assert!(h < prev, "{mode:?} at t={t}");
                prev = h;
            }
        }
    }

    #[test]
    fn kernel_scaling_leaves_values_unchanged() {
        let d = DriftSpec::linear(1.0);
        let grid = ObservationGrid::with_points(10.0, 1000).unwrap();
        let noise = crate::fbm::fbm_circulant(0.7, &grid, RngSeed::new(43, 0)).unwrap();
        let path = euler_solve(&d, 0.0, &noise).unwrap();
        let mut c = cfg(0.7, 0.0, 0.5);
        let base_nw = nw_estimate(&path, &c).value;
        let base_ll = ll_estimate(&path, &c).value;
        c.kernel = Kernel::ScaledBiweight { factor: 0.35 };
        assert_relative_eq!(nw_estimate(&path, &c).value, base_nw, max_relative = 1e-12);
        assert_relative_eq!(ll_estimate(&path, &c).value, base_ll, max_relative = 1e-12);
    }

    #[test]
    fn shift_equivariance() {
        let d = DriftSpec::linear(1.0);
        let grid = ObservationGrid::with_points(10.0, 1000).unwrap();
        let noise = crate::fbm::fbm_circulant(0.3, &grid, RngSeed::new(44, 0)).unwrap();
        let path = euler_solve(&d, 0.0, &noise).unwrap();
        let a = 0.75;
        let shifted = DiffusionPath {
            path: SampledPath::new(
                path.times().to_vec(),
                path.values().iter().map(|v| v + a).collect(),
                PathLabel::Diffusion,
            ),
            x0: path.x0 + a,
            drift_name: path.drift_name.clone(),
        };
        let c = cfg(0.3, 0.1, 0.5);
        let c_shift = cfg(0.3, 0.1 + a, 0.5);
        // estimating b at x on X equals estimating b(.-a) at x+a on X+a,
        // up to fp rounding in the shifted differences
        assert_relative_eq!(
            nw_estimate(&path, &c).value,
            nw_estimate(&shifted, &c_shift).value,
            max_relative = 1e-10,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            ll_estimate(&path, &c).value,
            ll_estimate(&shifted, &c_shift).value,
            max_relative = 1e-10,
            epsilon = 1e-12
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn cauchy_schwarz_on_random_paths(seed in 0u64..500, h in 0.15f64..0.85) {
            let grid = ObservationGrid::with_points(4.0, 256).unwrap();
            let noise = crate::fbm::fbm_circulant(h, &grid, RngSeed::new(99, seed)).unwrap();
            let d = DriftSpec::linear(1.0);
            let path = euler_solve(&d, 0.0, &noise).unwrap();
            let c = cfg(h, 0.0, 0.6);
            let out = ll_estimate(&path, &c);
            prop_assert!(out.delta >= 0.0);
            prop_assert!(out.lambda_min <= out.v0.min(out.v2) + 1e-12);
            let sum_err = (out.lambda_min + out.lambda_max) - (out.v0 + out.v2);
            prop_assert!(sum_err.abs() <= 1e-9 * (out.v0 + out.v2).abs().max(1e-30));
        }
    }
}
