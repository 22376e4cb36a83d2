//! Diagnostic construction of the fundamental martingale
//! `M^H_t = int_0^t w_H(t,s) dB^H_s` and the observable process
//! `Y_t = x_0 + int_0^t w_H(t,s) dX_s`.
//!
//! Quadrature evaluates the weight at subinterval midpoints, which dodges the
//! endpoint singularities of `w_H` (both exponents are negative for
//! `H > 1/2`). The estimators never integrate `w_H` directly — they use the
//! closed-form reduction to `(t-s)^{1-2H}` weights — so this module is
//! diagnostic-only and its quadrature bias vanishes with the mesh.

use crate::error::Result;
use crate::hurst::HurstConstants;
use crate::path::{PathLabel, SampledPath};
use crate::sde::{DiffusionPath, DriftSpec};

fn grid_index(path: &SampledPath, t_eval: f64) -> Result<usize> {
    let mesh = path.mesh();
    let k = (t_eval / mesh).round();
    let n = path.len() - 1;
    if t_eval <= 0.0 || k < 1.0 || k > n as f64 || (t_eval - k * mesh).abs() > 1e-9 * mesh.max(1.0) {
        return Err(crate::error::Error::NotOnGrid { t: t_eval, mesh });
    }
    Ok(k as usize)
}

/// Midpoint quadrature of `int_0^t w_H(t,s) dB^H_s` over the fBm grid.
/// `t_eval` must be a positive grid point.
pub fn fundamental_martingale(
    fbm: &SampledPath,
    hurst: &HurstConstants,
    t_eval: f64,
) -> Result<f64> {
    let m = grid_index(fbm, t_eval)?;
    let t = fbm.times();
    let b = fbm.values();
    let mut acc = 0.0;
    for k in 0..m {
        let s_mid = 0.5 * (t[k] + t[k + 1]);
        acc += hurst.weight_w(t_eval, s_mid)? * (b[k + 1] - b[k]);
    }
    Ok(acc)
}

/// The whole martingale trajectory on the fBm grid (O(n^2); diagnostics and
/// CSV export only).
pub fn fundamental_martingale_path(
    fbm: &SampledPath,
    hurst: &HurstConstants,
) -> Result<SampledPath> {
    let mut values = Vec::with_capacity(fbm.len());
    values.push(0.0);
    for k in 1..fbm.len() {
        values.push(fundamental_martingale(fbm, hurst, fbm.times()[k])?);
    }
    Ok(SampledPath::new(fbm.times().to_vec(), values, PathLabel::Martingale))
}

/// Observable process at a grid time:
/// `Y_t = x_0 + sum_k w_H(t, s_mid) b(X_k) eps + M^H_t`, with the noise
/// increments recovered from the Euler relation `dB = dX - b(X) eps`.
pub fn observable_y(
    x_path: &DiffusionPath,
    drift: &DriftSpec,
    hurst: &HurstConstants,
    t_eval: f64,
) -> Result<f64> {
    let m = grid_index(&x_path.path, t_eval)?;
    let t = x_path.times();
    let x = x_path.values();
    let mut acc = x_path.x0;
    for k in 0..m {
        let eps = t[k + 1] - t[k];
        let s_mid = 0.5 * (t[k] + t[k + 1]);
        let w = hurst.weight_w(t_eval, s_mid)?;
        let drift_part = drift.eval(x[k]) * eps;
        let noise_part = (x[k + 1] - x[k]) - drift_part;
        acc += w * (drift_part + noise_part);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fbm::fbm_circulant;
    use crate::grid::ObservationGrid;
    use crate::rng::RngSeed;
    use crate::sde::euler_solve;
    use approx::assert_relative_eq;

    #[test]
    fn brownian_case_recovers_path_by_telescoping() {
        let grid = ObservationGrid::with_points(2.0, 256).unwrap();
        let fbm = fbm_circulant(0.5, &grid, RngSeed::new(17, 0)).unwrap();
        let h = HurstConstants::derive(0.5).unwrap();
        for k in [32usize, 128, 256] {
            let t = grid.time(k);
            assert_relative_eq!(
                fundamental_martingale(&fbm, &h, t).unwrap(),
                fbm.values()[k],
                max_relative = 1e-12,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn zero_path_maps_to_zero() {
        let times: Vec<f64> = (0..=64).map(|k| k as f64 / 64.0).collect();
        let fbm = SampledPath::new(times, vec![0.0; 65], PathLabel::Fbm);
        let h = HurstConstants::derive(0.7).unwrap();
        assert_eq!(fundamental_martingale(&fbm, &h, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn off_grid_time_is_rejected() {
        let grid = ObservationGrid::with_points(1.0, 64).unwrap();
        let fbm = fbm_circulant(0.7, &grid, RngSeed::new(17, 1)).unwrap();
        let h = HurstConstants::derive(0.7).unwrap();
        assert!(fundamental_martingale(&fbm, &h, 0.013).is_err());
        assert!(fundamental_martingale(&fbm, &h, 0.0).is_err());
    }

    #[test]
    fn zero_drift_observable_is_x0_plus_martingale() {
        let grid = ObservationGrid::with_points(1.0, 128).unwrap();
        let fbm = fbm_circulant(0.7, &grid, RngSeed::new(19, 0)).unwrap();
        let d = DriftSpec::constant(0.0);
        let x = euler_solve(&d, 2.0, &fbm).unwrap();
        let h = HurstConstants::derive(0.7).unwrap();
        let y = observable_y(&x, &d, &h, 1.0).unwrap();
        let m = fundamental_martingale(&fbm, &h, 1.0).unwrap();
        assert_relative_eq!(y, 2.0 + m, max_relative = 1e-12, epsilon = 1e-12);
    }

    #[test]
    fn brownian_observable_tracks_diffusion() {
        // at H = 1/2 all weights are 1 and Y_t telescopes to X_t
        let grid = ObservationGrid::with_points(1.0, 256).unwrap();
        let fbm = fbm_circulant(0.5, &grid, RngSeed::new(19, 2)).unwrap();
        let d = DriftSpec::linear(1.0);
        let x = euler_solve(&d, 0.5, &fbm).unwrap();
        let h = HurstConstants::derive(0.5).unwrap();
        for k in [64usize, 256] {
            let t = grid.time(k);
            let y = observable_y(&x, &d, &h, t).unwrap();
            assert_relative_eq!(y, x.values()[k], max_relative = 1e-10, epsilon = 1e-10);
        }
    }

    #[test]
    fn martingale_path_starts_at_zero() {
        let grid = ObservationGrid::with_points(1.0, 32).unwrap();
        let fbm = fbm_circulant(0.3, &grid, RngSeed::new(23, 0)).unwrap();
        let h = HurstConstants::derive(0.3).unwrap();
        let m = fundamental_martingale_path(&fbm, &h).unwrap();
        assert_eq!(m.values()[0], 0.0);
        assert_eq!(m.label(), PathLabel::Martingale);
        assert_eq!(m.len(), fbm.len());
    }
}
