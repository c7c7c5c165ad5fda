//! Qualitative behavior of the optimal portfolio weight: non-decreasing in
//! the market price of risk, non-increasing in risk aversion, and
//! non-decreasing in wealth under strictly decreasing aversion.

use riskmin_generators::{constant_aversion, wealth_decay_aversion, GeneratorSpec};
use riskmin_market::MarketModel;
use riskmin_strategy::{
    closed_form_case1, closed_form_case2, closed_form_case3, pi_bar, solve_deterministic,
};

fn theta_market(theta: f64) -> MarketModel {
    MarketModel::gaussian(0.0, 1.0, theta * 0.2, 0.2)
}

fn assert_monotone(label: &str, values: &[f64], increasing: bool) {
    for w in values.windows(2) {
        if increasing {
            assert!(w[1] >= w[0] - 1e-12, "{label}: {} then {}", w[0], w[1]);
        } else {
            assert!(w[1] <= w[0] + 1e-12, "{label}: {} then {}", w[0], w[1]);
        }
    }
}

#[test]
fn pi_is_non_decreasing_in_theta() {
    // case1, k = 0.5
    let spec1 = GeneratorSpec::case1(constant_aversion(0.5));
    let pis: Vec<f64> = (1..=9)
        .map(|i| {
            let theta = 0.05 * i as f64;
            let m = theta_market(theta);
            let p = closed_form_case1(&spec1, &m, 0.0, 1.0, 1.0, 0.0).unwrap();
            pi_bar(&m, 0.0, 1.0, p).unwrap()
        })
        .collect();
    assert_monotone("case1 in theta", &pis, true);

    // case2, l = 0.6
    let spec2 = GeneratorSpec::case2(constant_aversion(0.6));
    let pis: Vec<f64> = (1..=11)
        .map(|i| {
            let theta = 0.05 * i as f64;
            let m = theta_market(theta);
            let p = closed_form_case2(&spec2, &m, 0.0, 1.0, 1.0, 0.0).unwrap();
            pi_bar(&m, 0.0, 1.0, p).unwrap()
        })
        .collect();
    assert_monotone("case2 in theta", &pis, true);

    // case3, gamma = 2, theta spans both signs
    let spec3 = GeneratorSpec::case3(constant_aversion(2.0));
    let pis: Vec<f64> = (-9..=9)
        .map(|i| {
            let theta = 0.1 * i as f64;
            let m = theta_market(theta);
            let p = closed_form_case3(&spec3, &m, 0.0, 1.0, 1.0, 0.0).unwrap();
            pi_bar(&m, 0.0, 1.0, p).unwrap()
        })
        .collect();
    assert_monotone("case3 in theta", &pis, true);
}

#[test]
fn pi_is_non_increasing_in_risk_aversion() {
    let m1 = theta_market(0.3);
    let pis: Vec<f64> = [0.35, 0.4, 0.5, 0.7, 1.0, 1.5]
        .iter()
        .map(|&k| {
            let spec = GeneratorSpec::case1(constant_aversion(k));
            let p = closed_form_case1(&spec, &m1, 0.0, 1.0, 1.0, 0.0).unwrap();
            pi_bar(&m1, 0.0, 1.0, p).unwrap()
        })
        .collect();
    assert_monotone("case1 in k", &pis, false);

    let m2 = theta_market(0.4);
    let pis: Vec<f64> = [0.45, 0.5, 0.6, 0.8, 1.2]
        .iter()
        .map(|&l| {
            let spec = GeneratorSpec::case2(constant_aversion(l));
            let p = closed_form_case2(&spec, &m2, 0.0, 1.0, 1.0, 0.0).unwrap();
            pi_bar(&m2, 0.0, 1.0, p).unwrap()
        })
        .collect();
    assert_monotone("case2 in l", &pis, false);

    let m3 = theta_market(0.5);
    let pis: Vec<f64> = [0.5, 1.0, 2.0, 4.0]
        .iter()
        .map(|&gamma| {
            let spec = GeneratorSpec::case3(constant_aversion(gamma));
            let p = closed_form_case3(&spec, &m3, 0.0, 1.0, 1.0, 0.0).unwrap();
            pi_bar(&m3, 0.0, 1.0, p).unwrap()
        })
        .collect();
    assert_monotone("case3 in gamma", &pis, false);
}

#[test]
fn pi_is_non_decreasing_in_wealth_under_decreasing_aversion() {
    // Aversion decays in wealth; theta > 0 fixed. Parameters keep every
    // wealth level feasible.
    let xs: Vec<f64> = (0..=8).map(|i| 0.25 * i as f64).collect();

    let m = theta_market(0.25);
    let spec = GeneratorSpec::case1(wealth_decay_aversion(0.6, 0.5));
    let pis: Vec<f64> = xs
        .iter()
        .map(|&x| {
            let p = closed_form_case1(&spec, &m, 0.0, 1.0, x, 0.0).unwrap();
            pi_bar(&m, 0.0, 1.0, p).unwrap()
        })
        .collect();
    assert_monotone("case1 in wealth", &pis, true);

    let m = theta_market(0.2);
    let spec = GeneratorSpec::case2(wealth_decay_aversion(0.8, 0.4));
    let pis: Vec<f64> = xs
        .iter()
        .map(|&x| {
            let p = closed_form_case2(&spec, &m, 0.0, 1.0, x, 0.0).unwrap();
            pi_bar(&m, 0.0, 1.0, p).unwrap()
        })
        .collect();
    assert_monotone("case2 in wealth", &pis, true);

    let m = theta_market(0.5);
    let spec = GeneratorSpec::case3(wealth_decay_aversion(2.0, 0.5));
    let pis: Vec<f64> = xs
        .iter()
        .map(|&x| {
            let p = closed_form_case3(&spec, &m, 0.0, 1.0, x, 0.0).unwrap();
            pi_bar(&m, 0.0, 1.0, p).unwrap()
        })
        .collect();
    assert_monotone("case3 in wealth", &pis, true);
}

#[test]
fn minimal_risk_never_exceeds_the_riskless_value() {
    for theta in [0.05, 0.2, 0.4] {
        let m = theta_market(theta);
        let specs = [
            GeneratorSpec::case1(constant_aversion(0.5)),
            GeneratorSpec::case2(constant_aversion(0.6)),
            GeneratorSpec::case3(constant_aversion(2.0)),
            GeneratorSpec::entropic(constant_aversion(1.5)),
        ];
        for spec in &specs {
            let sol = solve_deterministic(spec, &m, 0.0, 1.0, 1.0, 64, None).unwrap();
            assert!(
                sol.y_bar_t() <= -1.0 + 1e-12,
                "{:?} at theta {theta}: {}",
                spec.family(),
                sol.y_bar_t()
            );
        }
    }
}
