//! Closed-form evaluation of the deviation-bound right-hand sides, their
//! validity thresholds, and the constants ledger they are built from.
//!
//! Raw bound values are honest upper bounds on probabilities only when they
//! are at most 1; the experiment harness clips reported comparisons at 1 and
//! keeps the raw value alongside.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::holder::fernique_constant;
use crate::hurst::HurstConstants;

/// Raw event/threshold constants plus the derived quantities entering the
/// discrete-observation bounds:
///
/// - `c_xhl   = L (L h + c_b (1 + |x|^m))`,
/// - `c_rho_h = sqrt(2) c_H^2 / (rho lambda_H)`,
/// - `tau0    = max((4608 L / zeta)^{2/(H(gamma-1))}, 1)`,
/// - `c_h_gamma = 2 c_{H,h0}` at the proof-internal Hölder exponent
///   `h0 = H(gamma+3)/(2(gamma+1))`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BoundConstants {
    pub rho: f64,
    pub beta: f64,
    pub zeta: f64,
    /// one-sided dissipativity constant L
    pub dissipativity: f64,
    /// local Lipschitz constant L_x at the target
    pub local_lipschitz: f64,
    /// growth constants (c_b, m)
    pub growth_constant: f64,
    pub growth_order: u32,
    pub gamma: f64,
    /// target point and bandwidth the ledger was derived at
    pub x: f64,
    pub bandwidth: f64,
    pub c_xhl: f64,
    pub c_rho_h: f64,
    pub tau0: f64,
    pub c_h_gamma: f64,
}

#[allow(clippy::too_many_arguments)]
impl BoundConstants {
    pub fn derive(
        hurst: &HurstConstants,
        rho: f64,
        beta: f64,
        zeta: f64,
        dissipativity: f64,
        local_lipschitz: f64,
        growth_constant: f64,
        growth_order: u32,
        gamma: f64,
        x: f64,
        bandwidth: f64,
    ) -> Result<Self> {
        if !(rho > 0.0 && beta > 0.0 && zeta > 0.0 && gamma > 1.0) {
            return Err(Error::Config(
                "bound constants need rho, beta, zeta > 0 and gamma > 1".into(),
            ));
        }
        let l = dissipativity;
        let c_xhl = l * (l * bandwidth + growth_constant * (1.0 + x.abs().powi(growth_order as i32)));
        let c_rho_h = std::f64::consts::SQRT_2 * hurst.c_h * hurst.c_h / (rho * hurst.lambda_h);
        let tau0 = (4608.0 * l / zeta)
            .powf(2.0 / (hurst.h * (gamma - 1.0)))
            .max(1.0);
        let h0 = hurst.h * (gamma + 3.0) / (2.0 * (gamma + 1.0));
        let c_h_gamma = 2.0 * fernique_constant(hurst.h, h0);
        Ok(Self {
            rho,
            beta,
            zeta,
            dissipativity,
            local_lipschitz,
            growth_constant,
            growth_order,
            gamma,
            x,
            bandwidth,
            c_xhl,
            c_rho_h,
            tau0,
            c_h_gamma,
        })
    }
}

/// Continuous-observation NW bound `2 exp(-rho^2 (1-H) zeta^2 t^{2 beta})`.
pub fn nw_bound_continuous(c: &BoundConstants, hurst: &HurstConstants, t: f64) -> f64 {
    2.0 * (-c.rho * c.rho * (1.0 - hurst.h) * c.zeta * c.zeta * t.powf(2.0 * c.beta)).exp()
}

/// Discrete-observation NW bound, valid for `t_n >= tau0`:
/// `2 exp(-rho^2 (1-H) zeta^2 t^{2beta} / (16 alpha_H^2))
///  + c_{H,gamma} t^{H(gamma-1)/(gamma+1)} exp(-(zeta/4L) t^{2H(gamma-1)/(gamma+1)})`.
pub fn nw_bound_discrete(c: &BoundConstants, hurst: &HurstConstants, t_n: f64) -> Result<f64> {
    if t_n < c.tau0 {
        return Err(Error::BelowTau0 { t: t_n, tau0: c.tau0 });
    }
    let a2 = hurst.alpha_h * hurst.alpha_h;
    let term1 = 2.0
        * (-c.rho * c.rho * (1.0 - hurst.h) * c.zeta * c.zeta * t_n.powf(2.0 * c.beta)
            / (16.0 * a2))
            .exp();
    let u = hurst.h * (c.gamma - 1.0) / (c.gamma + 1.0);
    let term2 = c.c_h_gamma
        * t_n.powf(u)
        * (-(c.zeta / (4.0 * c.dissipativity)) * t_n.powf(2.0 * u)).exp();
    Ok(term1 + term2)
}

/// Continuous-observation LL bound: threshold
/// `c_{rho,H} Delta_{x,h} t^{1-H-beta} + zeta` and bound
/// `4 exp(-(1-H) rho^2 zeta^2 t^{2beta} / (2 alpha_H^2))`.
pub fn ll_bound_continuous(
    c: &BoundConstants,
    hurst: &HurstConstants,
    t: f64,
    delta_xh: f64,
) -> (f64, f64) {
    let threshold = c.c_rho_h * delta_xh * t.powf(1.0 - hurst.h - c.beta) + c.zeta;
    let a2 = hurst.alpha_h * hurst.alpha_h;
    let bound = 4.0
        * (-(1.0 - hurst.h) * c.rho * c.rho * c.zeta * c.zeta * t.powf(2.0 * c.beta) / (2.0 * a2))
            .exp();
    (threshold, bound)
}

/// Discrete-observation LL bound evaluation.
#[derive(Debug, Clone, Copy)]
pub struct LlDiscreteBound {
    pub threshold: f64,
    pub bound: f64,
    /// Hölder exponent used by the trajectory term
    pub hoelder_exp: f64,
    /// whether `beta > 1 - gamma H`, the event-exponent condition of the
    /// theorem; evaluation proceeds regardless but the flag is reported
    pub beta_condition_ok: bool,
}

/// Admissible Hölder-exponent interval
/// `(max((1-H-beta)/(gamma-1), (1+H-beta)/(gamma+1)), H)` of the discrete LL
/// bound.
pub fn ll_hoelder_interval(c: &BoundConstants, hurst: &HurstConstants) -> (f64, f64) {
    let lo = ((1.0 - hurst.h - c.beta) / (c.gamma - 1.0))
        .max((1.0 + hurst.h - c.beta) / (c.gamma + 1.0));
    (lo, hurst.h)
}

/// Discrete-observation LL bound: threshold
/// `c_{rho,H} Delta t^{1-H-beta} + c_1 eps_n t^{1-H-beta} + zeta` with
/// `c_1 = c_{rho,H} c_{x,h,L}`, and bound
/// `4 exp(-rho^2 (1-H) zeta^2 t^{2beta}/(16 alpha_H^2))
///  + 2 c_{H,h} t^{H-h} exp(-(zeta/(4 c_2)) t^{h(gamma-1)+H-1+beta})` with
/// `c_2 = c_{rho,H} L` and `h` from the admissible interval (midpoint when
/// not supplied).
pub fn ll_bound_discrete(
    c: &BoundConstants,
    hurst: &HurstConstants,
    t_n: f64,
    delta_xh: f64,
    epsilon_n: f64,
    hoelder_exp: Option<f64>,
) -> Result<LlDiscreteBound> {
    let (lo, hi) = ll_hoelder_interval(c, hurst);
    if lo >= hi {
        return Err(Error::InvalidRegime(format!(
            "no admissible Hölder exponent: interval ({lo:.4}, {hi:.4}) is empty"
        )));
    }
    let h_exp = hoelder_exp.unwrap_or(0.5 * (lo + hi));
    if !(lo < h_exp && h_exp < hi) {
        return Err(Error::InvalidRegime(format!(
            "Hölder exponent {h_exp} outside admissible interval ({lo:.4}, {hi:.4})"
        )));
    }
    let c1 = c.c_rho_h * c.c_xhl;
    let c2 = c.c_rho_h * c.dissipativity;
    let decay = t_n.powf(1.0 - hurst.h - c.beta);
    let threshold = c.c_rho_h * delta_xh * decay + c1 * epsilon_n * decay + c.zeta;
    let a2 = hurst.alpha_h * hurst.alpha_h;
    let term1 = 4.0
        * (-c.rho * c.rho * (1.0 - hurst.h) * c.zeta * c.zeta * t_n.powf(2.0 * c.beta)
            / (16.0 * a2))
            .exp();
    let u1 = hurst.h - h_exp;
    let u2 = h_exp * (c.gamma - 1.0) + hurst.h - 1.0 + c.beta;
    let term2 = 2.0
        * fernique_constant(hurst.h, h_exp)
        * t_n.powf(u1)
        * (-(c.zeta / (4.0 * c2)) * t_n.powf(u2)).exp();
    Ok(LlDiscreteBound {
        threshold,
        bound: term1 + term2,
        hoelder_exp: h_exp,
        beta_condition_ok: c.beta > 1.0 - c.gamma * hurst.h,
    })
}

/// The ergodic sample-count condition `gamma > 1 + (m^2 + p) H` and
/// `gamma > p + 1` of the discrete time-average limit.
pub fn gamma_condition(gamma: f64, m: u32, p: u32, h: f64) -> bool {
    gamma > 1.0 + ((m * m + p) as f64) * h && gamma > (p + 1) as f64
}
