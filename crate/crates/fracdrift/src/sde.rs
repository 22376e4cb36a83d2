//! Drift catalog with hypothesis validators, and Euler integration of
//! `X_t = x_0 + int_0^t b(X_s) ds + B_t^H` driven by a supplied fBm path.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fbm::CirculantFbm;
use crate::grid::ObservationGrid;
use crate::kernel::Kernel;
use crate::path::{PathLabel, SampledPath};
use crate::rng::RngSeed;

type DriftFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A drift function together with its declared hypothesis constants:
/// `dissipativity` is the one-sided constant L in
/// `(b(y)-b(y'))(y-y') <= -L |y-y'|^2`; `growth_constant`/`growth_order` are
/// (c_b, m) in `|b| + |b'| <= c_b (1 + |x|^m)`; `local_lipschitz`/`local_order`
/// are (L_x, b) describing b near the target point.
///
/// `dissipativity = 0` marks a drift that does not claim the one-sided
/// condition (e.g. a constant drift used in zero-noise smoke tests).
#[derive(Clone)]
pub struct DriftSpec {
    pub name: String,
    b: DriftFn,
    b_prime: Option<DriftFn>,
    pub dissipativity: f64,
    pub growth_constant: f64,
    pub growth_order: u32,
    pub local_lipschitz: f64,
    pub local_order: f64,
}

impl fmt::Debug for DriftSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DriftSpec")
            .field("name", &self.name)
            .field("dissipativity", &self.dissipativity)
            .field("growth_constant", &self.growth_constant)
            .field("growth_order", &self.growth_order)
            .finish()
    }
}

impl DriftSpec {
    pub fn eval(&self, x: f64) -> f64 {
        (self.b)(x)
    }

    /// Analytic derivative when declared, otherwise a central difference.
    pub fn eval_prime(&self, x: f64) -> f64 {
        match &self.b_prime {
            Some(bp) => bp(x),
            None => {
                let e = 1e-6 * (1.0 + x.abs());
                ((self.b)(x + e) - (self.b)(x - e)) / (2.0 * e)
            }
        }
    }

    /// `b(x) = -theta x`, dissipative with L = theta.
    pub fn linear(theta: f64) -> Self {
        assert!(theta > 0.0);
        Self {
            name: format!("linear({theta})"),
            b: Arc::new(move |x| -theta * x),
            b_prime: Some(Arc::new(move |_| -theta)),
            dissipativity: theta,
            growth_constant: theta,
            growth_order: 1,
            local_lipschitz: theta,
            local_order: 1.0,
        }
    }

    /// `b(x) = -x - x^3`; dissipative with L = 1, growth order 3. The local
    /// constant is valid for windows inside [-1, 1].
    pub fn cubic() -> Self {
        Self {
            name: "cubic".into(),
            b: Arc::new(|x| -x - x * x * x),
            b_prime: Some(Arc::new(|x| -1.0 - 3.0 * x * x)),
            dissipativity: 1.0,
            growth_constant: 3.2,
            growth_order: 3,
            local_lipschitz: 4.0,
            local_order: 1.0,
        }
    }

    /// `b(x) = -x - sin(x)/2`; bounded derivative, dissipative with L = 1/2.
    pub fn damped_sine() -> Self {
        Self {
            name: "damped_sine".into(),
            b: Arc::new(|x| -x - x.sin() / 2.0),
            b_prime: Some(Arc::new(|x| -1.0 - x.cos() / 2.0)),
            dissipativity: 0.5,
            growth_constant: 2.0,
            growth_order: 1,
            local_lipschitz: 1.5,
            local_order: 1.0,
        }
    }

    /// `b(x) = theta` constant; not dissipative, used by zero-noise smoke
    /// oracles.
    pub fn constant(theta: f64) -> Self {
        Self {
            name: format!("constant({theta})"),
            b: Arc::new(move |_| theta),
            b_prime: Some(Arc::new(|_| 0.0)),
            dissipativity: 0.0,
            growth_constant: theta.abs().max(1.0),
            growth_order: 0,
            local_lipschitz: 0.0,
            local_order: 1.0,
        }
    }

    /// A drift defined in code. Hypothesis constants default to the weakest
    /// claims (no dissipativity, linear growth); adjust them with the
    /// `with_*` setters to match what the function actually satisfies.
    pub fn custom(
        name: impl Into<String>,
        b: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            b: Arc::new(b),
            b_prime: None,
            dissipativity: 0.0,
            growth_constant: 1.0,
            growth_order: 1,
            local_lipschitz: 1.0,
            local_order: 1.0,
        }
    }

    pub fn with_derivative(mut self, bp: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.b_prime = Some(Arc::new(bp));
        self
    }

    pub fn with_dissipativity(mut self, l: f64) -> Self {
        self.dissipativity = l;
        self
    }

    pub fn with_growth(mut self, c_b: f64, order: u32) -> Self {
        self.growth_constant = c_b;
        self.growth_order = order;
        self
    }

    pub fn with_local(mut self, l_x: f64, order: f64) -> Self {
        self.local_lipschitz = l_x;
        self.local_order = order;
        self
    }

    /// Resolve a catalog drift by name and parameter list (the form used in
    /// experiment configs).
    pub fn by_name(name: &str, params: &[f64]) -> Result<Self> {
        match name {
            "linear" => {
                let theta = params.first().copied().unwrap_or(1.0);
                if !(theta > 0.0) {
                    return Err(Error::Config(format!("linear drift needs theta > 0, got {theta}")));
                }
                Ok(Self::linear(theta))
            }
            "cubic" => Ok(Self::cubic()),
            "damped_sine" => Ok(Self::damped_sine()),
            "constant" => Ok(Self::constant(params.first().copied().unwrap_or(0.0))),
            other => Err(Error::Config(format!("unknown drift '{other}'"))),
        }
    }
}

/// Numeric validation report for the declared drift hypotheses.
#[derive(Debug, Clone, Copy)]
pub struct DriftValidation {
    /// max over probe pairs of `(b(y)-b(y'))(y-y') / (y-y')^2`; the one-sided
    /// condition demands this stays below `-L`.
    pub worst_dissipativity_ratio: f64,
    /// max over probe points of `(|b| + |b'|) / (c_b (1 + |x|^m))`.
    pub worst_growth_ratio: f64,
    pub dissipativity_ok: bool,
    pub growth_ok: bool,
}

impl DriftValidation {
    pub fn pass(&self) -> bool {
        self.dissipativity_ok && self.growth_ok
    }
}

/// Probe the declared constants on an even grid over `range` (all pairs).
pub fn validate_drift(d: &DriftSpec, range: (f64, f64), n_probes: usize) -> DriftValidation {
    assert!(n_probes >= 100, "need at least 100 probes");
    let (lo, hi) = range;
    let xs: Vec<f64> = (0..n_probes)
        .map(|i| lo + (hi - lo) * i as f64 / (n_probes - 1) as f64)
        .collect();
    let bs: Vec<f64> = xs.iter().map(|&x| d.eval(x)).collect();

    let mut worst_diss = f64::NEG_INFINITY;
    for i in 0..n_probes {
        for j in (i + 1)..n_probes {
            let dy = xs[j] - xs[i];
            let ratio = (bs[j] - bs[i]) * dy / (dy * dy);
            worst_diss = worst_diss.max(ratio);
        }
    }
    let mut worst_growth = f64::NEG_INFINITY;
    for &x in &xs {
        let cap = d.growth_constant * (1.0 + x.abs().powi(d.growth_order as i32));
        worst_growth = worst_growth.max((d.eval(x).abs() + d.eval_prime(x).abs()) / cap);
    }
    DriftValidation {
        worst_dissipativity_ratio: worst_diss,
        worst_growth_ratio: worst_growth,
        dissipativity_ok: worst_diss <= -d.dissipativity + 1e-9,
        growth_ok: worst_growth <= 1.0 + 1e-9,
    }
}

/// A diffusion trajectory: the sampled path plus its initial value and the
/// drift that produced it.
#[derive(Debug, Clone)]
pub struct DiffusionPath {
    pub path: SampledPath,
    pub x0: f64,
    pub drift_name: String,
}

impl DiffusionPath {
    pub fn times(&self) -> &[f64] {
        self.path.times()
    }

    pub fn values(&self) -> &[f64] {
        self.path.values()
    }
}

/// Explicit Euler step with exact noise increments:
/// `X_{k+1} = X_k + b(X_k) eps + (B_{k+1} - B_k)`.
pub fn euler_solve(d: &DriftSpec, x0: f64, noise: &SampledPath) -> Result<DiffusionPath> {
    let times = noise.times();
    let b = noise.values();
    let n = times.len();
    let mut values = Vec::with_capacity(n);
    values.push(x0);
    let mut x = x0;
    for k in 0..n - 1 {
        let eps = times[k + 1] - times[k];
        let drift = d.eval(x);
        if !drift.is_finite() {
            return Err(Error::NonFiniteDrift { step: k, state: x });
        }
        x += drift * eps + (b[k + 1] - b[k]);
        values.push(x);
    }
    Ok(DiffusionPath {
        path: SampledPath::new(times.to_vec(), values, PathLabel::Diffusion),
        x0,
        drift_name: d.name.clone(),
    })
}

/// Approximate draws of the stationary law: integrate to the grid horizon
/// (the burn-in) and keep one terminal value per seed. The horizon must cover
/// the dissipative relaxation time, `t_n >= 10 / L`.
pub fn stationary_sample(
    d: &DriftSpec,
    h: f64,
    grid: &ObservationGrid,
    seeds: &[RngSeed],
) -> Result<Vec<f64>> {
    if d.dissipativity <= 0.0 {
        return Err(Error::Config(format!(
            "drift '{}' declares no dissipativity; stationary sampling needs L > 0",
            d.name
        )));
    }
    if grid.t_n < 10.0 / d.dissipativity {
        return Err(Error::Config(format!(
            "burn-in {} is below the 10/L = {} heuristic",
            grid.t_n,
            10.0 / d.dissipativity
        )));
    }
    let gen = CirculantFbm::new(h, grid)?;
    seeds
        .par_iter()
        .map(|&seed| {
            let noise = gen.sample(seed);
            Ok(euler_solve(d, 0.0, &noise)?.path.terminal())
        })
        .collect()
}

/// Occupation mode for the non-degeneracy probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NondegeneracyMode {
    /// mean of `N((s - x)/h)` (Nadaraya-Watson hypothesis)
    Nw,
    /// mean of `((s - x)/h)^2 N((s - x)/h)` (locally linear hypothesis)
    Ll,
}

/// Empirical non-degeneracy functional over approximate stationary draws.
pub fn check_nondegeneracy(
    samples: &[f64],
    x: f64,
    h: f64,
    kernel: &Kernel,
    mode: NondegeneracyMode,
) -> f64 {
    assert!(samples.len() >= 500, "need at least 500 samples");
    let mut acc = 0.0;
    for &s in samples {
        let u = (s - x) / h;
        let n = kernel.evaluate(u);
        acc += match mode {
            NondegeneracyMode::Nw => n,
            NondegeneracyMode::Ll => u * u * n,
        };
    }
    acc / samples.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats;
    use approx::assert_relative_eq;
    use rand::Rng;

    fn zero_noise(t_n: f64, n: usize) -> SampledPath {
        let times: Vec<f64> = (0..=n).map(|k| k as f64 * t_n / n as f64).collect();
        SampledPath::new(times, vec![0.0; n + 1], PathLabel::Fbm)
    }

    #[test]
    fn linear_drift_validates_with_exact_ratio() {
        let d = DriftSpec::linear(1.0);
        let v = validate_drift(&d, (-3.0, 3.0), 150);
        assert!(v.pass());
        assert_relative_eq!(v.worst_dissipativity_ratio, -1.0, max_relative = 1e-12);
    }

    #[test]
    fn cubic_drift_validates() {
        let d = DriftSpec::cubic();
        let v = validate_drift(&d, (-4.0, 4.0), 300);
        assert!(v.pass(), "{v:?}");
    }

    #[test]
    fn damped_sine_validates() {
        let d = DriftSpec::damped_sine();
        let v = validate_drift(&d, (-6.0, 6.0), 300);
        assert!(v.pass(), "{v:?}");
    }

    #[test]
    fn anti_dissipative_drift_fails() {
        let d = DriftSpec::custom("explosive", |x| x)
            .with_derivative(|_| 1.0)
            .with_dissipativity(1.0)
            .with_growth(2.0, 1);
        let v = validate_drift(&d, (-2.0, 2.0), 120);
        assert!(!v.dissipativity_ok);
        assert!(v.worst_dissipativity_ratio > 0.0);
    }

    #[test]
    fn euler_zero_noise_linear_closed_form() {
        let d = DriftSpec::linear(1.0);
        let x = euler_solve(&d, 1.0, &zero_noise(1.0, 10)).unwrap();
        assert_relative_eq!(x.path.terminal(), 0.9f64.powi(10), max_relative = 1e-14);
        assert_relative_eq!(x.path.terminal(), 0.348_678_440_1, max_relative = 1e-9);
    }

    #[test]
    fn euler_error_halves_with_mesh() {
        let d = DriftSpec::linear(1.0);
        let exact = (-1.0f64).exp();
        let errs: Vec<f64> = [10, 20, 40]
            .iter()
            .map(|&n| (euler_solve(&d, 1.0, &zero_noise(1.0, n)).unwrap().path.terminal() - exact).abs())
            .collect();
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((1.6..=2.4).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn euler_zero_drift_is_pure_noise() {
        let grid = ObservationGrid::with_points(2.0, 64).unwrap();
        let noise = crate::fbm::fbm_circulant(0.7, &grid, RngSeed::new(3, 1)).unwrap();
        let d = DriftSpec::constant(0.0);
        let x = euler_solve(&d, 0.4, &noise).unwrap();
        for (xv, bv) in x.values().iter().zip(noise.values()) {
            assert_relative_eq!(*xv, 0.4 + bv, max_relative = 1e-12, epsilon = 1e-12);
        }
    }

    #[test]
    fn euler_constant_drift_zero_noise_is_line() {
        let d = DriftSpec::constant(2.5);
        let x = euler_solve(&d, -1.0, &zero_noise(3.0, 30)).unwrap();
        for (t, v) in x.times().iter().zip(x.values()) {
            assert_relative_eq!(*v, -1.0 + 2.5 * t, max_relative = 1e-13, epsilon = 1e-13);
        }
    }

    #[test]
    fn euler_is_deterministic() {
        let grid = ObservationGrid::with_points(1.0, 128).unwrap();
        let noise = crate::fbm::fbm_circulant(0.3, &grid, RngSeed::new(8, 0)).unwrap();
        let d = DriftSpec::cubic();
        let a = euler_solve(&d, 0.3, &noise).unwrap();
        let b = euler_solve(&d, 0.3, &noise).unwrap();
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn dissipative_paths_stay_inside_growth_envelope() {
        let d = DriftSpec::cubic();
        let grid = ObservationGrid::with_points(5.0, 400).unwrap();
        let gen = CirculantFbm::new(0.7, &grid).unwrap();
        let h_exp = 0.35;
        for r in 0..100 {
            let noise = gen.sample(RngSeed::new(21, r));
            let x = euler_solve(&d, 0.5, &noise).unwrap();
            let sup = x.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let norm = crate::holder::holder_norm(&noise, h_exp);
            let envelope = d.growth_constant
                * (1.0 + 0.5 + norm.powi(d.growth_order as i32) * grid.t_n.powf(d.growth_order as f64 * h_exp));
            assert!(sup <= envelope, "replicate {r}: sup {sup} > envelope {envelope}");
        }
    }

    #[test]
    fn stationary_ou_matches_classical_variance() {
        // At H = 1/2 the stationary OU law is Normal(0, 1/2).
        let d = DriftSpec::linear(1.0);
        let grid = ObservationGrid::with_points(12.0, 1200).unwrap();
        let seeds: Vec<RngSeed> = (0..2000).map(|r| RngSeed::new(31, r)).collect();
        let samples = stationary_sample(&d, 0.5, &grid, &seeds).unwrap();
        let v = stats::variance(&samples);
        let se = 0.5 * (2.0 / samples.len() as f64).sqrt();
        assert!((v - 0.5).abs() < 3.0 * se, "variance {v}");

        // two disjoint seed sets are draws of the same law
        let seeds2: Vec<RngSeed> = (5000..7000).map(|r| RngSeed::new(31, r)).collect();
        let samples2 = stationary_sample(&d, 0.5, &grid, &seeds2).unwrap();
        assert!(stats::ks_p_value(&samples, &samples2) > 1e-3);
    }

    #[test]
    fn stationary_sample_insensitive_to_longer_burn_in() {
        let d = DriftSpec::linear(1.0);
        let seeds: Vec<RngSeed> = (0..800).map(|r| RngSeed::new(33, r)).collect();
        let short = stationary_sample(&d, 0.5, &ObservationGrid::with_points(12.0, 1200).unwrap(), &seeds).unwrap();
        let long = stationary_sample(&d, 0.5, &ObservationGrid::with_points(24.0, 2400).unwrap(), &seeds).unwrap();
        let se = stats::std_dev(&long) / (long.len() as f64).sqrt();
        assert!((stats::mean(&short) - stats::mean(&long)).abs() < 3.0 * se);
    }

    #[test]
    fn stationary_sample_rejects_short_burn_in() {
        let d = DriftSpec::linear(1.0);
        let grid = ObservationGrid::with_points(5.0, 100).unwrap();
        assert!(stationary_sample(&d, 0.5, &grid, &[RngSeed::new(0, 0)]).is_err());
    }

    #[test]
    fn nondegeneracy_point_mass_cases() {
        let k = Kernel::Biweight;
        let samples = vec![2.0; 600];
        assert_eq!(check_nondegeneracy(&samples, 2.0, 0.3, &k, NondegeneracyMode::Nw), 1.0);
        assert_eq!(check_nondegeneracy(&samples, 2.0, 0.3, &k, NondegeneracyMode::Ll), 0.0);
    }

    #[test]
    fn nondegeneracy_uniform_window_closed_form() {
        // uniform on [x-h, x+h]: E N(U) = 8/15
        let mut rng = RngSeed::new(14, 0).rng();
        let (x, h) = (1.0, 0.7);
        let samples: Vec<f64> = (0..20_000)
            .map(|_| x + h * (2.0 * rng.gen::<f64>() - 1.0))
            .collect();
        let m = check_nondegeneracy(&samples, x, h, &Kernel::Biweight, NondegeneracyMode::Nw);
        assert!((m - 8.0 / 15.0).abs() < 0.01, "mean {m}");
    }
}
