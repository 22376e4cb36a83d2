//! Hurst-dependent constants and the singular weight kernels that transform
//! fractional Brownian motion into a Gaussian martingale.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::gamma;

/// The Hurst parameter together with the three derived constants used by the
/// martingale transform and the estimators:
///
/// - `c_h    = (2H Γ(3/2-H) Γ(H+1/2))^{-1}`,
/// - `lambda_h = Γ(3/2-H) / (2H Γ(3-2H) Γ(H+1/2))` (variance scale of the
///   fundamental martingale, `Var M_t = lambda_h t^{2-2H}`),
/// - `alpha_h  = c_h / sqrt(lambda_h (2-2H))`.
///
/// All three equal 1 at `H = 1/2`, where everything degenerates to standard
/// Brownian motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HurstConstants {
    pub h: f64,
    pub c_h: f64,
    pub lambda_h: f64,
    pub alpha_h: f64,
}

impl HurstConstants {
    /// Derive the constants from `H in (0,1)`.
    pub fn derive(h: f64) -> Result<Self> {
        if !(0.0 < h && h < 1.0) || !h.is_finite() {
            return Err(Error::HurstOutOfRange(h));
        }
        let g_a = gamma(1.5 - h);
        let g_b = gamma(h + 0.5);
        let c_h = 1.0 / (2.0 * h * g_a * g_b);
        let lambda_h = g_a / (2.0 * h * gamma(3.0 - 2.0 * h) * g_b);
        let alpha_h = c_h / (lambda_h * (2.0 - 2.0 * h)).sqrt();
        Ok(Self { h, c_h, lambda_h, alpha_h })
    }

    /// The weight `w_H(t,s) = c_H s^{1/2-H} (t-s)^{1/2-H}` on `0 < s < t`,
    /// and 0 for `s` outside `(0,t)`.
    ///
    /// For `H > 1/2` both exponents are negative, so the exact endpoints
    /// `s = 0` and `s = t` are singular and rejected; quadrature callers must
    /// use interior nodes.
    pub fn weight_w(&self, t: f64, s: f64) -> Result<f64> {
        if s <= 0.0 || s >= t {
            if (s == 0.0 || s == t) && self.h > 0.5 {
                return Err(Error::WeightSingularity { s, t });
            }
            return Ok(0.0);
        }
        let e = 0.5 - self.h;
        Ok(self.c_h * s.powf(e) * (t - s).powf(e))
    }

    /// The companion weight
    /// `w~_H(t,s) = c_H / ((2-2H) lambda_H) (t-s)^{1/2-H} s^{H-1/2}`
    /// satisfying `w_H(t,s) w~_H(t,s) = alpha_H^2 (t-s)^{1-2H}` on `0 < s < t`.
    pub fn weight_w_tilde(&self, t: f64, s: f64) -> Result<f64> {
        if s <= 0.0 || s >= t {
            if (s == 0.0 || s == t) && self.h != 0.5 {
                return Err(Error::WeightSingularity { s, t });
            }
            return Ok(0.0);
        }
        let c = self.c_h / ((2.0 - 2.0 * self.h) * self.lambda_h);
        Ok(c * (t - s).powf(0.5 - self.h) * s.powf(self.h - 0.5))
    }
}

/// Convenience wrapper matching the operation name used by callers.
pub fn derive_constants(h: f64) -> Result<HurstConstants> {
    HurstConstants::derive(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn half_is_brownian_degenerate() {
        let c = HurstConstants::derive(0.5).unwrap();
        assert_relative_eq!(c.c_h, 1.0, max_relative = 1e-14);
        assert_relative_eq!(c.lambda_h, 1.0, max_relative = 1e-14);
        assert_relative_eq!(c.alpha_h, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn constants_match_reference_values() {
        // Frozen from an independent arbitrary-precision evaluation of the
        // closed forms.
        let c = HurstConstants::derive(0.7).unwrap();
        assert_relative_eq!(c.c_h, 0.668_206_631_277_599_31, max_relative = 1e-13);
        assert_relative_eq!(c.lambda_h, 1.013_645_559_763_167_1, max_relative = 1e-13);
        assert_relative_eq!(c.alpha_h, 0.856_824_931_507_287_08, max_relative = 1e-13);

        let c = HurstConstants::derive(0.3).unwrap();
        assert_relative_eq!(c.c_h, 1.559_148_806_314_398_4, max_relative = 1e-13);
        assert_relative_eq!(c.lambda_h, 1.058_161_039_302_343_5, max_relative = 1e-13);
        assert_relative_eq!(c.alpha_h, 1.280_995_680_074_673_7, max_relative = 1e-13);
    }

    #[test]
    fn alpha_identity_at_0_3() {
        let c = HurstConstants::derive(0.3).unwrap();
        assert_relative_eq!(
            c.alpha_h,
            c.c_h / (c.lambda_h * 1.4).sqrt(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(HurstConstants::derive(0.0).is_err());
        assert!(HurstConstants::derive(1.0).is_err());
        assert!(HurstConstants::derive(-0.2).is_err());
        assert!(HurstConstants::derive(f64::NAN).is_err());
    }

    #[test]
    fn constants_positive_and_continuous_on_grid() {
        // c_H ~ 1/(2H ...) steepens below H = 0.3, so the absolute step band
        // applies from there on; the low end gets a relative band instead
        let hs: Vec<f64> = (2..=18).map(|i| 0.05 * i as f64).collect();
        let mut prev: Option<HurstConstants> = None;
        for &h in &hs {
            let c = HurstConstants::derive(h).unwrap();
            assert!(c.c_h > 0.0 && c.lambda_h > 0.0 && c.alpha_h > 0.0, "H={h}");
            if let Some(p) = prev {
                for (a, b) in [(c.c_h, p.c_h), (c.lambda_h, p.lambda_h), (c.alpha_h, p.alpha_h)] {
                    if h > 0.32 {
                        assert!((a - b).abs() < 0.2, "jump at H={h}: {b} -> {a}");
                    }
                    assert!((a - b).abs() / b < 0.3, "relative jump at H={h}: {b} -> {a}");
                }
            }
            prev = Some(c);
        }
    }

    #[test]
    fn weight_examples() {
        let c = HurstConstants::derive(0.75).unwrap();
        assert_relative_eq!(c.weight_w(2.0, 1.0).unwrap(), c.c_h, max_relative = 1e-14);

        // plain power-function oracle at H=0.3, t=1, s=0.5
        let c = HurstConstants::derive(0.3).unwrap();
        let want = c.c_h * 0.5f64.powf(0.2) * 0.5f64.powf(0.2);
        assert_relative_eq!(c.weight_w(1.0, 0.5).unwrap(), want, max_relative = 1e-14);
        assert_relative_eq!(want, 1.181_613_837_692_822_8, max_relative = 1e-13);
    }

    #[test]
    fn weight_outside_support_is_zero() {
        let c = HurstConstants::derive(0.3).unwrap();
        assert_eq!(c.weight_w(1.0, 1.5).unwrap(), 0.0);
        assert_eq!(c.weight_w_tilde(1.0, 2.0).unwrap(), 0.0);
        assert_eq!(c.weight_w(1.0, -0.5).unwrap(), 0.0);
    }

    #[test]
    fn weight_singular_endpoints_rejected_above_half() {
        let c = HurstConstants::derive(0.75).unwrap();
        assert!(matches!(
            c.weight_w(1.0, 0.0),
            Err(Error::WeightSingularity { .. })
        ));
        assert!(matches!(
            c.weight_w(1.0, 1.0),
            Err(Error::WeightSingularity { .. })
        ));
    }

    #[test]
    fn product_identity_frozen_case() {
        // alpha_H^2 2^{-0.4} at H=0.7, independently evaluated.
        let c = HurstConstants::derive(0.7).unwrap();
        let lhs = c.weight_w(3.0, 1.0).unwrap() * c.weight_w_tilde(3.0, 1.0).unwrap();
        assert_relative_eq!(lhs, 0.556_380_872_944_098_99, max_relative = 1e-13);
        assert_relative_eq!(
            lhs,
            c.alpha_h * c.alpha_h * 2.0f64.powf(-0.4),
            max_relative = 1e-13
        );
    }

    proptest! {
        #[test]
        fn weight_is_one_at_half(s in 1e-6f64..0.999, t in 1.0f64..100.0) {
            let c = HurstConstants::derive(0.5).unwrap();
            let s = s * t;
            prop_assert!((c.weight_w(t, s).unwrap() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn product_identity_random_pairs(
            h in 0.05f64..0.95,
            frac in 1e-3f64..0.999,
            t in 0.1f64..50.0,
        ) {
            let c = HurstConstants::derive(h).unwrap();
            let s = frac * t;
            let lhs = c.weight_w(t, s).unwrap() * c.weight_w_tilde(t, s).unwrap();
            let rhs = c.alpha_h * c.alpha_h * (t - s).powf(1.0 - 2.0 * h);
            let scale = lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
            prop_assert!((lhs - rhs).abs() / scale < 1e-12);
        }
    }
}
