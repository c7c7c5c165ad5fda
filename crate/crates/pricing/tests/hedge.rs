//! Hedge estimates against the analytic Gaussian value and exact scaling.

use riskmin_market::{simulate_index, MarketModel};
use riskmin_pricing::{derivative_hedge, Derivative};

#[test]
fn gaussian_linear_payoff_hedge() {
    // b = 0, sigma = 1, theta = 0.3 constant, beta = 0.2, F(r) = r:
    // D_{t0}R_T = 1, theta_r = 0, so delta = -E[A]/beta = -5.
    let m = MarketModel::gaussian(0.0, 1.0, 0.06, 0.2);
    let b = simulate_index(&m, 0.0, 1.0, 1.0, 64, 50_000, 4001).unwrap();
    let report = derivative_hedge(&m, &Derivative::linear(1.0, 0.0), &b).unwrap();
    assert!(
        (report.delta + 5.0).abs() < 3.0 * report.std_err,
        "delta = {} (se {})",
        report.delta,
        report.std_err
    );
    assert_eq!(report.term2, 0.0);
    assert_eq!(report.delta, report.term1 + report.term2);
}

#[test]
fn hedge_scales_exactly_with_the_payoff() {
    // A model with state-dependent theta so both terms are active.
    let m = MarketModel::builder()
        .index_drift(|_, r| 0.5 * (1.0 - r))
        .index_vol(|_, _| 0.4)
        .asset_drift(|_, r| 0.04 + 0.01 * (r - 1.0))
        .asset_vol(|_, _| 0.2)
        .index_drift_dr(|_, _| -0.5)
        .index_vol_dr(|_, _| 0.0)
        .asset_drift_dr(|_, _| 0.01)
        .asset_vol_dr(|_, _| 0.0)
        .build()
        .unwrap();
    let b = simulate_index(&m, 0.0, 1.0, 1.0, 40, 8_000, 4002).unwrap();
    let base = Derivative::smooth_bump(1.0, 0.6, 1.0);
    let r1 = derivative_hedge(&m, &base, &b).unwrap();
    let r2 = derivative_hedge(&m, &base.scaled(2.0), &b).unwrap();
    assert_eq!(r2.delta, 2.0 * r1.delta);
    assert_eq!(r2.term1, 2.0 * r1.term1);
    assert_eq!(r2.term2, 2.0 * r1.term2);
    assert!(r1.term2 != 0.0, "state-dependent theta should activate term2");
    assert!(r1.diagnostics.h_max > 0.0);
}

#[test]
fn hedge_decomposition_is_exact_by_construction() {
    let m = MarketModel::ornstein_uhlenbeck(1.0, 1.0, 0.3, 0.06, 0.2);
    let b = simulate_index(&m, 0.0, 1.0, 1.0, 32, 4_000, 4003).unwrap();
    let report = derivative_hedge(&m, &Derivative::clipped_linear(1.0, 0.0, 0.0, 2.0), &b).unwrap();
    assert_eq!(report.delta, report.term1 + report.term2);
}
