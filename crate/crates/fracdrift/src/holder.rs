//! Hölder-norm diagnostics for sampled paths: the discrete Hölder norm and
//! closed-form bounds on its exponential moment and raw moments.

use crate::error::{Error, Result};
use crate::path::SampledPath;
use crate::special::double_factorial;

/// Discrete Hölder norm `max_{i<j} |v_j - v_i| / (t_j - t_i)^{h_exp}`.
///
/// This is the sup over grid pairs only, so it approximates the continuous
/// norm from below; all bound checks built on it are one-sided. Cost is
/// O(n^2) after an O(n) adjacent-pair pass that seeds the running maximum.
pub fn holder_norm(path: &SampledPath, h_exp: f64) -> f64 {
    assert!(path.len() >= 2, "need at least 2 points");
    assert!(0.0 < h_exp && h_exp < 1.0, "exponent must be in (0,1)");
    let t = path.times();
    let v = path.values();
    let n = v.len();
    let mut best: f64 = 0.0;
    for i in 0..n - 1 {
        let r = (v[i + 1] - v[i]).abs() / (t[i + 1] - t[i]).powf(h_exp);
        best = best.max(r);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let num = (v[j] - v[i]).abs();
            if num == 0.0 {
                continue;
            }
            let r = num / (t[j] - t[i]).powf(h_exp);
            best = best.max(r);
        }
    }
    best
}

/// Validity floor `T0 = (h_exp / (8H))^{1/(H - h_exp)}` of the exponential
/// moment bound.
pub fn fernique_t0(h: f64, h_exp: f64) -> f64 {
    (h_exp / (8.0 * h)).powf(1.0 / (h - h_exp))
}

/// Constant `c_{H,h} = floor(2/(H-h)) + 16H/h` of the exponential moment
/// bound.
pub fn fernique_constant(h: f64, h_exp: f64) -> f64 {
    (2.0 / (h - h_exp)).floor() + 16.0 * h / h_exp
}

/// Closed-form bound on `E[exp(||B^H||_{0,T,h})]`:
/// `c_{H,h} (1 + T^{H-h}) exp(128 H^2 / h^2 * T^{2(H-h)})`, valid for
/// `T > T0`.
pub fn fernique_bound(h: f64, h_exp: f64, t: f64) -> Result<f64> {
    if !(0.0 < h_exp && h_exp < h && h < 1.0) {
        return Err(Error::InvalidRegime(format!(
            "need 0 < h_exp < H < 1, got h_exp={h_exp}, H={h}"
        )));
    }
    let t0 = fernique_t0(h, h_exp);
    if t <= t0 {
        return Err(Error::FerniqueOutOfValidity { t, t0 });
    }
    let c = fernique_constant(h, h_exp);
    let d = h - h_exp;
    Ok(c * (1.0 + t.powf(d)) * (128.0 * h * h / (h_exp * h_exp) * t.powf(2.0 * d)).exp())
}

/// Moment bound `E[||B^H||^p] <= (16H/h)^p T^{p(H-h)} (p-1)!!` for
/// `p > p0 = floor(2/(H-h))`.
///
/// Below that order the same expression holds with `p0!!` in place of
/// `(p-1)!!`; that small-order value is carried in the error.
pub fn moment_bound(h: f64, h_exp: f64, t: f64, p: u32) -> Result<f64> {
    if !(0.0 < h_exp && h_exp < h && h < 1.0) {
        return Err(Error::InvalidRegime(format!(
            "need 0 < h_exp < H < 1, got h_exp={h_exp}, H={h}"
        )));
    }
    let p0 = (2.0 / (h - h_exp)).floor() as u32;
    let base = (16.0 * h / h_exp).powi(p as i32) * t.powf(p as f64 * (h - h_exp));
    if p > p0 {
        Ok(base * double_factorial(p as i64 - 1))
    } else {
        Err(Error::MomentOrderTooSmall {
            p,
            p0,
            fallback: base * double_factorial(p0 as i64),
        })
    }
}
