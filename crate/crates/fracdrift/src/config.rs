//! Experiment configuration: a single JSON document per run, validated at
//! load time, hashable for the report header.

use serde::{Deserialize, Serialize};

use crate::bounds::{gamma_condition, ll_hoelder_interval, BoundConstants};
use crate::error::{Error, Result};
use crate::estimator::EstimatorKind;
use crate::hurst::HurstConstants;
use crate::sde::DriftSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftConfig {
    pub name: String,
    #[serde(default)]
    pub params: Vec<f64>,
}

impl DriftConfig {
    pub fn build(&self) -> Result<DriftSpec> {
        DriftSpec::by_name(&self.name, &self.params)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorChoice {
    Nw,
    Ll,
    Both,
}

impl EstimatorChoice {
    pub fn kinds(self) -> Vec<EstimatorKind> {
        match self {
            EstimatorChoice::Nw => vec![EstimatorKind::Nw],
            EstimatorChoice::Ll => vec![EstimatorKind::Ll],
            EstimatorChoice::Both => vec![EstimatorKind::Nw, EstimatorKind::Ll],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorChoice {
    Cholesky,
    Circulant,
}

/// Path-generation runs: one fBm + diffusion pair per replicate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateConfig {
    pub drift: DriftConfig,
    pub hurst: f64,
    pub x0: f64,
    pub horizon: f64,
    pub gamma: f64,
    pub replicates: usize,
    pub seed: u64,
    #[serde(default = "default_generator")]
    pub generator: GeneratorChoice,
    /// also export the fundamental-martingale transform of each fBm path
    #[serde(default)]
    pub export_martingale: bool,
}

fn default_generator() -> GeneratorChoice {
    GeneratorChoice::Circulant
}

/// Batch estimation over externally supplied diffusion CSV paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateConfig {
    /// CSV files with header `t,value`
    pub inputs: Vec<String>,
    pub hurst: f64,
    pub x: f64,
    pub bandwidth: f64,
    pub rho: f64,
    pub beta: f64,
    pub estimator: EstimatorChoice,
}

/// One estimator arm of a consistency experiment. Arms carry their own
/// Hurst list and rate exponent: the gamma-condition and the resolvable
/// error trends differ between the two estimators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyArm {
    pub hursts: Vec<f64>,
    pub beta: f64,
    pub horizons: Vec<f64>,
    pub gamma: f64,
    /// pre-registered pilot factor: median |error| at the largest horizon
    /// must be below that at the smallest divided by this factor
    pub pass_factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyConfig {
    pub drift: DriftConfig,
    pub x: f64,
    pub replicates: usize,
    pub seed: u64,
    #[serde(default)]
    pub nw: Option<ConsistencyArm>,
    #[serde(default)]
    pub ll: Option<ConsistencyArm>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationConfig {
    pub drift: DriftConfig,
    pub x: f64,
    pub bandwidth: f64,
    pub hursts: Vec<f64>,
    pub horizons: Vec<f64>,
    pub gamma: f64,
    pub rho: f64,
    pub beta: f64,
    /// deviation offsets zeta, one per estimator (the theorems allow any
    /// zeta > 0 and their validity floors scale differently)
    pub zeta_nw: f64,
    pub zeta_ll: f64,
    /// Hölder exponent for the discrete LL bound; interval midpoint when
    /// absent
    #[serde(default)]
    pub ll_hoelder_exp: Option<f64>,
    pub estimator: EstimatorChoice,
    pub replicates: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventArm {
    pub x: f64,
    pub bandwidth: f64,
    pub rho: f64,
    pub beta: f64,
    pub estimator: EstimatorChoice,
    pub horizons: Vec<f64>,
    pub gamma: f64,
    pub replicates: usize,
    /// event frequency the largest horizon must reach
    pub target_frequency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErgodicConfig {
    pub drift: DriftConfig,
    pub hurst: f64,
    pub phi: String,
    pub horizons: Vec<f64>,
    pub gamma: f64,
    pub replicates: usize,
    pub seed: u64,
    /// optional conditioning-event frequency study run alongside
    #[serde(default)]
    pub event: Option<EventArm>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SelftestConfig {
    /// negative-control hook: "constants" corrupts the Hurst constants so
    /// the degeneracy check must fail
    #[serde(default)]
    pub inject_fault: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "snake_case")]
pub enum ExperimentConfig {
    Simulate(SimulateConfig),
    Estimate(EstimateConfig),
    Consistency(ConsistencyConfig),
    Deviation(DeviationConfig),
    Ergodic(ErgodicConfig),
    Selftest(SelftestConfig),
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// FNV-1a hash of the canonical JSON form, recorded in report headers.
    pub fn hash(&self) -> u64 {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(0x1000_0000_01b3);
        }
        h
    }

    /// Override the master seed (CLI `--seed`).
    pub fn set_seed(&mut self, seed: u64) {
        match self {
            ExperimentConfig::Simulate(c) => c.seed = seed,
            ExperimentConfig::Consistency(c) => c.seed = seed,
            ExperimentConfig::Deviation(c) => c.seed = seed,
            ExperimentConfig::Ergodic(c) => c.seed = seed,
            ExperimentConfig::Estimate(_) | ExperimentConfig::Selftest(_) => {}
        }
    }

    /// Check every referenced validity window before any simulation runs.
    pub fn validate(&self) -> Result<()> {
        match self {
            ExperimentConfig::Simulate(c) => {
                check_hurst(c.hurst)?;
                check_positive("horizon", c.horizon)?;
                check_gamma(c.gamma)?;
                check_replicates(c.replicates)?;
                c.drift.build()?;
                Ok(())
            }
            ExperimentConfig::Estimate(c) => {
                check_hurst(c.hurst)?;
                check_positive("bandwidth", c.bandwidth)?;
                check_positive("rho", c.rho)?;
                check_positive("beta", c.beta)?;
                if c.inputs.is_empty() {
                    return Err(Error::Config("estimate needs at least one input path".into()));
                }
                Ok(())
            }
            ExperimentConfig::Consistency(c) => {
                let drift = c.drift.build()?;
                check_replicates(c.replicates)?;
                if c.nw.is_none() && c.ll.is_none() {
                    return Err(Error::Config("consistency needs at least one estimator arm".into()));
                }
                if let Some(arm) = &c.nw {
                    check_arm(arm)?;
                    for &h in &arm.hursts {
                        check_hurst(h)?;
                        if !gamma_condition(arm.gamma, drift.growth_order, 0, h) {
                            return Err(Error::Config(format!(
                                "nw arm gamma {} violates the ergodic condition at H={h} (m={}, p=0)",
                                arm.gamma, drift.growth_order
                            )));
                        }
                    }
                }
                if let Some(arm) = &c.ll {
                    check_arm(arm)?;
                    for &h in &arm.hursts {
                        check_hurst(h)?;
                        if !gamma_condition(arm.gamma, drift.growth_order, 2, h) {
                            return Err(Error::Config(format!(
                                "ll arm gamma {} violates the ergodic condition at H={h} (m={}, p=2)",
                                arm.gamma, drift.growth_order
                            )));
                        }
                        if arm.beta >= 2.0 * (1.0 - h) {
                            return Err(Error::Config(format!(
                                "ll bandwidth schedule needs beta < 2(1-H) = {} at H={h}",
                                2.0 * (1.0 - h)
                            )));
                        }
                    }
                }
                Ok(())
            }
            ExperimentConfig::Deviation(c) => {
                let drift = c.drift.build()?;
                check_replicates(c.replicates)?;
                check_positive("bandwidth", c.bandwidth)?;
                check_gamma(c.gamma)?;
                for &h in &c.hursts {
                    check_hurst(h)?;
                    let hurst = HurstConstants::derive(h)?;
                    for kind in c.estimator.kinds() {
                        let zeta = match kind {
                            EstimatorKind::Nw => c.zeta_nw,
                            EstimatorKind::Ll => c.zeta_ll,
                        };
                        check_positive("zeta", zeta)?;
                        let bc = BoundConstants::derive(
                            &hurst,
                            c.rho,
                            c.beta,
                            zeta,
                            drift.dissipativity,
                            drift.local_lipschitz,
                            drift.growth_constant,
                            drift.growth_order,
                            c.gamma,
                            c.x,
                            c.bandwidth,
                        )?;
                        if kind == EstimatorKind::Ll {
                            let (lo, hi) = ll_hoelder_interval(&bc, &hurst);
                            if lo >= hi {
                                return Err(Error::Config(format!(
                                    "ll Hölder interval empty at H={h}: ({lo:.4}, {hi:.4})"
                                )));
                            }
                        }
                    }
                }
                Ok(())
            }
            ExperimentConfig::Ergodic(c) => {
                check_hurst(c.hurst)?;
                check_gamma(c.gamma)?;
                check_replicates(c.replicates)?;
                c.drift.build()?;
                crate::ergodic::PhiSpec::by_name(&c.phi)?;
                if let Some(ev) = &c.event {
                    check_positive("event bandwidth", ev.bandwidth)?;
                    check_positive("event rho", ev.rho)?;
                    // the beta window itself is validated by the study
                }
                Ok(())
            }
            ExperimentConfig::Selftest(_) => Ok(()),
        }
    }
}

fn check_hurst(h: f64) -> Result<()> {
    if !(0.0 < h && h < 1.0) {
        return Err(Error::Config(format!("Hurst parameter {h} outside (0,1)")));
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) {
        return Err(Error::Config(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

fn check_gamma(g: f64) -> Result<()> {
    if !(g > 1.0) {
        return Err(Error::Config(format!("gamma must exceed 1, got {g}")));
    }
    Ok(())
}

fn check_replicates(r: usize) -> Result<()> {
    if r == 0 {
        return Err(Error::Config("replicates must be positive".into()));
    }
    Ok(())
}

fn check_arm(arm: &ConsistencyArm) -> Result<()> {
    if arm.horizons.len() < 2 {
        return Err(Error::Config("consistency arm needs at least 2 horizons".into()));
    }
    if !arm.horizons.windows(2).all(|w| w[1] > w[0]) {
        return Err(Error::Config("consistency horizons must be increasing".into()));
    }
    if !(arm.pass_factor >= 1.0) {
        return Err(Error::Config("pass factor must be at least 1".into()));
    }
    if arm.hursts.is_empty() {
        return Err(Error::Config("consistency arm needs at least one Hurst value".into()));
    }
    check_positive("beta", arm.beta)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_deviation() -> ExperimentConfig {
        ExperimentConfig::Deviation(DeviationConfig {
            drift: DriftConfig { name: "linear".into(), params: vec![1.0] },
            x: 0.0,
            bandwidth: 0.4,
            hursts: vec![0.3, 0.7],
            horizons: vec![60.0, 120.0],
            gamma: 2.8,
            rho: 1.0,
            beta: 0.25,
            zeta_nw: 4608.0,
            zeta_ll: 15.0,
            ll_hoelder_exp: None,
            estimator: EstimatorChoice::Both,
            replicates: 100,
            seed: 1,
        })
    }

    #[test]
    fn json_roundtrip_is_lossless() {
        let cfg = sample_deviation();
        let text = cfg.to_json();
        let back = ExperimentConfig::from_json(&text).unwrap();
        assert_eq!(cfg, back);
        assert_eq!(cfg.hash(), back.hash());
    }

    #[test]
    fn validation_rejects_bad_windows() {
        let mut cfg = sample_deviation();
        if let ExperimentConfig::Deviation(c) = &mut cfg {
            c.hursts = vec![1.3];
        }
        assert!(cfg.validate().is_err());

        let cfg = ExperimentConfig::Consistency(ConsistencyConfig {
            drift: DriftConfig { name: "linear".into(), params: vec![1.0] },
            x: 0.0,
            replicates: 10,
            seed: 0,
            // gamma 1.5 < 1 + H = 1.7 violates the nw ergodic condition
            nw: Some(ConsistencyArm {
                hursts: vec![0.7],
                beta: 0.5,
                horizons: vec![50.0, 100.0],
                gamma: 1.5,
                pass_factor: 1.1,
            }),
            ll: None,
        });
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn unknown_drift_is_a_config_error() {
        let text = r#"{"experiment":"simulate","drift":{"name":"quartic"},"hurst":0.5,
            "x0":0.0,"horizon":10.0,"gamma":1.5,"replicates":1,"seed":0}"#;
        assert!(ExperimentConfig::from_json(text).is_err());
    }
}
