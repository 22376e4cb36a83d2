//! Simulation and nonparametric drift inference for scalar diffusions driven
//! by fractional Brownian motion.
//!
//! The library covers the full pipeline at desk scale:
//!
//! - exact fractional Brownian motion generators (Cholesky and circulant
//!   embedding) with Hölder-norm diagnostics ([`fbm`], [`holder`]),
//! - a drift catalog with hypothesis validators and Euler integration of
//!   `dX = b(X) dt + dB^H` ([`sde`]),
//! - the fundamental-martingale and observable-process transforms used to
//!   motivate the estimators ([`martingale`]),
//! - Nadaraya-Watson and locally linear drift estimators at a point, with
//!   conditioning events and error decompositions ([`estimator`]),
//! - closed-form deviation-bound evaluators and their validity thresholds
//!   ([`bounds`]),
//! - ergodic time-average and event-probability studies ([`ergodic`]),
//! - a reproducible, seeded experiment harness ([`experiment`], [`config`],
//!   [`report`]).
//!
//! Everything is deterministic given a seed: replicate `r` of any experiment
//! uses an independent RNG stream derived from the master seed, so results do
//! not depend on execution order or worker count.

pub mod bounds;
pub mod config;
pub mod ergodic;
pub mod error;
pub mod estimator;
pub mod experiment;
pub mod fbm;
pub mod grid;
pub mod holder;
pub mod hurst;
pub mod kernel;
pub mod martingale;
pub mod path;
pub mod report;
pub mod rng;
pub mod sde;
pub mod selftest;
pub mod special;
pub mod stats;

pub use bounds::BoundConstants;
pub use config::ExperimentConfig;
pub use error::{Error, Result};
pub use estimator::{EstimateOutcome, EstimatorConfig};
pub use grid::ObservationGrid;
pub use hurst::HurstConstants;
pub use kernel::Kernel;
pub use path::{PathLabel, SampledPath};
pub use rng::RngSeed;
pub use sde::{DiffusionPath, DriftSpec};
