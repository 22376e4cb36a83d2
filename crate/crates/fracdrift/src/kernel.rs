//! Kernel functions for the local windows. Admissible kernels are C^1,
//! nonnegative, supported in [-1,1] and bounded by 1, which also gives
//! `z^2 N(z) <= N(z) <= 1` everywhere.

use serde::{Deserialize, Serialize};

/// A kernel with support radius 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Kernel {
    /// The biweight kernel `N(z) = (1-z^2)^2` on [-1,1]. Smooth at the
    /// boundary (N and N' both vanish at ±1), bounded by 1, cheap.
    Biweight,
    /// Biweight scaled by a factor in (0,1]; the scaling leaves ratio
    /// estimators unchanged and exists to exercise that equivariance.
    ScaledBiweight { factor: f64 },
}

impl Default for Kernel {
    fn default() -> Self {
        Kernel::Biweight
    }
}

impl Kernel {
    pub fn evaluate(&self, z: f64) -> f64 {
        if z.abs() > 1.0 {
            return 0.0;
        }
        let base = {
            let u = 1.0 - z * z;
            u * u
        };
        match self {
            Kernel::Biweight => base,
            Kernel::ScaledBiweight { factor } => factor * base,
        }
    }
}

/// The default kernel.
pub fn kernel_default() -> Kernel {
    Kernel::Biweight
}
