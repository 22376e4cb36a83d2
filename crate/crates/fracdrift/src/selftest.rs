//! Built-in self test: fast end-to-end checks of the constants, the
//! generator exactness, the martingale variance law, the eigenvalue identity
//! and the zero-noise estimator oracles. A fault-injection hook corrupts the
//! Hurst constants so the negative control can verify the suite actually
//! fails.

use rand::Rng;

use crate::config::SelftestConfig;
use crate::error::{Error, Result};
use crate::estimator::{design_eigenvalues, estimate, EstimatorConfig, EstimatorKind};
use crate::fbm::{fbm_covariance, CholeskyFbm, CirculantFbm};
use crate::grid::ObservationGrid;
use crate::hurst::HurstConstants;
use crate::martingale::fundamental_martingale;
use crate::path::{PathLabel, SampledPath};
use crate::rng::RngSeed;
use crate::sde::{euler_solve, DriftSpec};
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    None,
    CorruptConstants,
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct SelftestReport {
    pub checks: Vec<CheckResult>,
}

impl SelftestReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            s.push_str(&format!(
                "selftest {}: {} ({})\n",
                c.name,
                if c.pass { "PASS" } else { "FAIL" },
                c.detail
            ));
        }
        s
    }
}

pub fn run_selftest(cfg: &SelftestConfig) -> Result<SelftestReport> {
    let fault = match cfg.inject_fault.as_deref() {
        None => Fault::None,
        Some("constants") => Fault::CorruptConstants,
        Some(other) => return Err(Error::Config(format!("unknown fault '{other}'"))),
    };
    let checks = vec![
        check_constants(fault),
        check_weight_identity(),
        check_fbm_covariance(),
        check_generator_agreement(),
        check_martingale_variance(),
        check_eigenvalue_identity(),
        check_zero_noise_oracles(),
    ];
    Ok(SelftestReport { checks })
}

fn check_constants(fault: Fault) -> CheckResult {
    let mut c = HurstConstants::derive(0.5).expect("H=1/2 in range");
    if fault == Fault::CorruptConstants {
        c.c_h *= 1.0 + 1e-3;
    }
    let d_half = (c.c_h - 1.0).abs().max((c.lambda_h - 1.0).abs()).max((c.alpha_h - 1.0).abs());
    let c7 = HurstConstants::derive(0.7).unwrap();
    let d_ref = (c7.c_h - 0.668_206_631_277_599_31f64).abs();
    let pass = d_half < 1e-14 && d_ref < 1e-13;
    CheckResult {
        name: "constants_degeneracy",
        pass,
        detail: format!("H=1/2 deviation {d_half:.2e}, H=0.7 deviation {d_ref:.2e}"),
    }
}

fn check_weight_identity() -> CheckResult {
    let mut rng = RngSeed::new(0x5e1f, 0).rng();
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let h = 0.05 + 0.9 * rng.gen::<f64>();
        let c = HurstConstants::derive(h).unwrap();
        let t = 0.1 + 20.0 * rng.gen::<f64>();
        let s = t * (1e-3 + 0.997 * rng.gen::<f64>());
        let lhs = c.weight_w(t, s).unwrap() * c.weight_w_tilde(t, s).unwrap();
        let rhs = c.alpha_h * c.alpha_h * (t - s).powf(1.0 - 2.0 * h);
        worst = worst.max((lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE));
    }
    CheckResult {
        name: "weight_product_identity",
        pass: worst < 1e-12,
        detail: format!("worst relative error {worst:.2e} over 1e4 pairs"),
    }
}

fn check_fbm_covariance() -> CheckResult {
    // n = 64 path covariance against the analytic form, 4 MC standard errors
    let n = 64;
    let reps = 4000;
    let grid = ObservationGrid::with_points(1.0, n).unwrap();
    let gen = CholeskyFbm::new(0.7, &grid).unwrap();
    let mut acc = vec![0.0f64; n * n];
    for r in 0..reps {
        let p = gen.sample(RngSeed::new(0xc0c0, r as u64));
        let v = &p.values()[1..];
        for i in 0..n {
            for j in 0..=i {
                acc[i * n + j] += v[i] * v[j];
            }
        }
    }
    let mut worst_z: f64 = 0.0;
    for i in 0..n {
        let ti = grid.time(i + 1);
        for j in 0..=i {
            let tj = grid.time(j + 1);
            let want = fbm_covariance(0.7, ti, tj);
            let got = acc[i * n + j] / reps as f64;
            let var_ii = fbm_covariance(0.7, ti, ti);
            let var_jj = fbm_covariance(0.7, tj, tj);
            let se = ((var_ii * var_jj + want * want) / reps as f64).sqrt();
            worst_z = worst_z.max((got - want).abs() / se);
        }
    }
    CheckResult {
        name: "fbm_covariance_exactness",
        pass: worst_z < 4.0,
        detail: format!("worst |z| = {worst_z:.2} over {} entries", n * (n + 1) / 2),
    }
}

fn check_generator_agreement() -> CheckResult {
    let grid = ObservationGrid::with_points(1.0, 64).unwrap();
    let chol = CholeskyFbm::new(0.3, &grid).unwrap();
    let circ = CirculantFbm::new(0.3, &grid).unwrap();
    let reps = 3000;
    let a: Vec<f64> = (0..reps).map(|r| chol.sample(RngSeed::new(0xa11e, r)).terminal()).collect();
    let b: Vec<f64> =
        (0..reps).map(|r| circ.sample(RngSeed::new(0xb22e, r)).terminal()).collect();
    let p = stats::ks_p_value(&a, &b);
    CheckResult {
        name: "generator_agreement",
        pass: p > 1e-3,
        detail: format!("two-sample KS p = {p:.4} on B_T"),
    }
}

fn check_martingale_variance() -> CheckResult {
    let h = HurstConstants::derive(0.7).unwrap();
    let grid = ObservationGrid::with_points(1.0, 512).unwrap();
    let gen = CirculantFbm::new(0.7, &grid).unwrap();
    let reps = 10_000;
    let ms: Vec<f64> = (0..reps)
        .map(|r| fundamental_martingale(&gen.sample(RngSeed::new(0x3a57, r)), &h, 1.0).unwrap())
        .collect();
    let ratio = stats::variance(&ms) / h.lambda_h;
    CheckResult {
        name: "martingale_variance_law",
        pass: (0.95..=1.05).contains(&ratio),
        detail: format!("Var(M_1)/lambda_H = {ratio:.4}"),
    }
}

fn check_eigenvalue_identity() -> CheckResult {
    // closed form against the characteristic polynomial residual
    let mut rng = RngSeed::new(0xe1e1, 0).rng();
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let v0 = 1e-3 + 10.0 * rng.gen::<f64>();
        let v2 = 1e-3 + 10.0 * rng.gen::<f64>();
        let v1 = (v0 * v2).sqrt() * (2.0 * rng.gen::<f64>() - 1.0);
        let (lo, hi) = design_eigenvalues(v0, v1, v2);
        let scale = (v0 + v2).max(1.0);
        for lam in [lo, hi] {
            let residual = ((v0 - lam) * (v2 - lam) - v1 * v1).abs();
            worst = worst.max(residual / (scale * scale));
        }
        worst = worst.max(((lo + hi) - (v0 + v2)).abs() / scale);
        worst = worst.max((lo * hi - (v0 * v2 - v1 * v1)).abs() / (scale * scale));
    }
    CheckResult {
        name: "eigenvalue_identity",
        pass: worst < 1e-12,
        detail: format!("worst scaled residual {worst:.2e} over 1e4 triples"),
    }
}

fn check_zero_noise_oracles() -> CheckResult {
    let n = 100;
    let times: Vec<f64> = (0..=n).map(|k| k as f64 * 0.04 / n as f64).collect();
    let zero = SampledPath::new(times, vec![0.0; n + 1], PathLabel::Fbm);

    let d = DriftSpec::constant(2.0);
    let p = euler_solve(&d, 0.0, &zero).unwrap();
    let cfg = EstimatorConfig::new(0.02, 1.0, 1.0, 0.25, HurstConstants::derive(0.7).unwrap());
    let nw_err = (estimate(&p, &cfg, EstimatorKind::Nw).value - 2.0).abs();
    let ll_err = (estimate(&p, &cfg, EstimatorKind::Ll).value - 2.0).abs();

    let lin = DriftSpec::linear(1.0);
    let times: Vec<f64> = (0..=10).map(|k| k as f64 * 0.1).collect();
    let zero1 = SampledPath::new(times, vec![0.0; 11], PathLabel::Fbm);
    let euler_err =
        (euler_solve(&lin, 1.0, &zero1).unwrap().path.terminal() - 0.9f64.powi(10)).abs();

    let pass = nw_err < 1e-12 && ll_err < 1e-10 && euler_err < 1e-14;
    CheckResult {
        name: "zero_noise_oracles",
        pass,
        detail: format!("nw err {nw_err:.1e}, ll err {ll_err:.1e}, euler err {euler_err:.1e}"),
    }
}
