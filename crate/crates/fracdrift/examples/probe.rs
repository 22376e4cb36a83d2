// scratch diagnostics for pilot tuning
use fracdrift::estimator::{ll_estimate, nw_estimate, EstimatorConfig};
use fracdrift::fbm::CirculantFbm;
use fracdrift::grid::ObservationGrid;
use fracdrift::hurst::HurstConstants;
use fracdrift::rng::RngSeed;
use fracdrift::sde::{euler_solve, DriftSpec};
use fracdrift::stats;

fn main() {
    let d = DriftSpec::linear(1.0);
    for (h, t, gamma, bw) in [(0.3, 200.0, 2.0, 0.376), (0.3, 70.0, 3.2, 0.385), (0.7, 70.0, 3.2, 0.9)] {
        let hurst = HurstConstants::derive(h).unwrap();
        let grid = ObservationGrid::from_horizon(t, gamma).unwrap();
        let gen = CirculantFbm::new(h, &grid).unwrap();
        let cfg = EstimatorConfig::new(0.0, bw, 1.0, 0.25, hurst);
        let mut nw_vals = vec![];
        let mut ll_vals = vec![];
        let mut dens = vec![];
        let mut lmins = vec![];
        let mut v0s = vec![];
        let mut v2s = vec![];
        for r in 0..60u64 {
            let noise = gen.sample(RngSeed::new(0x99, r));
            let path = euler_solve(&d, 0.0, &noise).unwrap();
            let nw = nw_estimate(&path, &cfg);
            let ll = ll_estimate(&path, &cfg);
            nw_vals.push(nw.value.abs());
            ll_vals.push(ll.value.abs());
            dens.push(nw.denominator);
            lmins.push(ll.lambda_min);
            v0s.push(ll.v0);
            v2s.push(ll.v2);
        }
        println!(
            "H={h} t={t} gamma={gamma} h={bw}: nw med|e|={:.4} ll med|e|={:.4} den med={:.3} (exp~{:.3}) lmin med={:.3} v0 med={:.3} v2 med={:.3}",
            stats::median(&nw_vals),
            stats::median(&ll_vals),
            stats::median(&dens),
            0.22 * t.powf(2.0 - 2.0 * h) / (2.0 - 2.0 * h),
            stats::median(&lmins),
            stats::median(&v0s),
            stats::median(&v2s),
        );
    }
}
