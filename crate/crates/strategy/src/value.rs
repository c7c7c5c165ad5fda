use riskmin_convex::ConstraintSet;
use riskmin_generators::{GeneratorFamily, GeneratorSpec};
use riskmin_market::MarketModel;

use crate::closed_form::{pi_bar, pointwise_optimal_p};
use crate::error::StrategyError;
use crate::feasibility::{classify_point, FeasibilityRegime};

/// Minimal-risk value curve `Ybar(r)` on a time grid.
#[derive(Debug, Clone)]
pub struct YBarCurve {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl YBarCurve {
    /// `Ybar(t)` at the start of the horizon.
    pub fn at_start(&self) -> f64 {
        self.values[0]
    }
}

/// Probe that `theta` and the aversion do not depend on the index level, so
/// the auxiliary integrand vanishes and the risk value is a time quadrature.
fn check_deterministic(
    spec: &GeneratorSpec,
    model: &MarketModel,
    t: f64,
    horizon: f64,
    x: f64,
) -> Result<(), StrategyError> {
    let probes = [-1.0, 0.0, 1.0];
    for &s in &[t, 0.5 * (t + horizon), horizon] {
        let theta0 = model
            .market_price_of_risk(s, probes[0])
            .map_err(|e| StrategyError::NotDeterministic {
                what: "market price of risk",
                detail: e.to_string(),
            })?;
        let aversion0 = spec.aversion(s, probes[0], x)?;
        for &r in &probes[1..] {
            let theta =
                model
                    .market_price_of_risk(s, r)
                    .map_err(|e| StrategyError::NotDeterministic {
                        what: "market price of risk",
                        detail: e.to_string(),
                    })?;
            if (theta - theta0).abs() > 1e-10 * (1.0 + theta0.abs()) {
                return Err(StrategyError::NotDeterministic {
                    what: "market price of risk",
                    detail: format!("theta({s}, {r}) = {theta} differs from {theta0}"),
                });
            }
            let aversion = spec.aversion(s, r, x)?;
            if (aversion - aversion0).abs() > 1e-10 * (1.0 + aversion0.abs()) {
                return Err(StrategyError::NotDeterministic {
                    what: "risk aversion",
                    detail: format!("aversion({s}, {r}, {x}) = {aversion} differs from {aversion0}"),
                });
            }
        }
    }
    Ok(())
}

/// Integrand of the minimal-risk quadrature at one time point. Each branch
/// is the pointwise minimum of the effective generator at `z = 0`:
///
/// ```text
/// case1:    sqrt(k^2 - theta^2) - k
/// case2:    l ln( l / (2 (l - theta)) ) - theta ln( theta / (l - theta) )
/// case3:    -theta^2 / (2 gamma)
/// entropic: -theta^2 / (2 gamma)
/// avar:     0 on the feasible band
/// ```
fn integrand(
    family: GeneratorFamily,
    s: f64,
    theta: f64,
    aversion: f64,
) -> Result<f64, StrategyError> {
    let (regime, margin, bound) = classify_point(family, theta, aversion);
    if !regime.is_feasible() {
        return Err(StrategyError::Infeasible {
            s,
            r: f64::NAN,
            theta,
            bound,
            margin,
            regime,
        });
    }
    Ok(match family {
        GeneratorFamily::Case1Sqrt => {
            let k = aversion;
            ((k - theta) * (k + theta)).sqrt() - k
        }
        GeneratorFamily::Case2Logistic => {
            let l = aversion;
            l * (l / (2.0 * (l - theta))).ln() - theta * (theta / (l - theta)).ln()
        }
        GeneratorFamily::Case3Huber | GeneratorFamily::EntropicQuadratic => {
            -theta * theta / (2.0 * aversion)
        }
        GeneratorFamily::Avar => 0.0,
    })
}

/// Minimal-risk value curve in deterministic-coefficient mode:
/// `Ybar(r) = -x + int_r^T f(s) ds` by composite Simpson quadrature on the
/// same grid as the path bundles (with one midpoint evaluation per cell).
pub fn minimal_risk_value(
    spec: &GeneratorSpec,
    model: &MarketModel,
    t: f64,
    horizon: f64,
    x: f64,
    n_steps: usize,
) -> Result<YBarCurve, StrategyError> {
    if !(horizon > t) || n_steps == 0 {
        return Err(StrategyError::UnsupportedFamily(format!(
            "invalid quadrature grid [{t}, {horizon}] with {n_steps} steps"
        )));
    }
    check_deterministic(spec, model, t, horizon, x)?;

    let family = spec.family();
    let dt = (horizon - t) / n_steps as f64;
    let grid: Vec<f64> = (0..=n_steps)
        .map(|j| if j == n_steps { horizon } else { t + dt * j as f64 })
        .collect();

    let eval = |s: f64| -> Result<f64, StrategyError> {
        let theta = model.market_price_of_risk(s, 0.0)?;
        let aversion = spec.aversion(s, 0.0, x)?;
        integrand(family, s, theta, aversion)
    };

    // Tail integrals accumulated from the right with Simpson per cell.
    let mut values = vec![0.0; n_steps + 1];
    let mut tail = 0.0;
    let mut f_right = eval(grid[n_steps])?;
    for j in (0..n_steps).rev() {
        let f_left = eval(grid[j])?;
        let f_mid = eval(0.5 * (grid[j] + grid[j + 1]))?;
        tail += (grid[j + 1] - grid[j]) / 6.0 * (f_left + 4.0 * f_mid + f_right);
        values[j] = tail;
        f_right = f_left;
    }
    for v in values.iter_mut() {
        *v = -x + *v;
    }
    values[n_steps] = -x;

    Ok(YBarCurve { grid, values })
}

/// Deterministic-mode strategy solution: closed-form `p` and `pi`
/// evaluators (the auxiliary integrand is identically zero) plus the
/// minimal-risk value curve.
#[derive(Debug, Clone)]
pub struct StrategyResult {
    spec: GeneratorSpec,
    model: MarketModel,
    constraint: ConstraintSet,
    pub regime: FeasibilityRegime,
    pub initial_wealth: f64,
    pub y_bar: YBarCurve,
}

impl StrategyResult {
    /// Auxiliary integrand in deterministic mode.
    pub fn z_bar(&self) -> f64 {
        0.0
    }

    pub fn y_bar_t(&self) -> f64 {
        self.y_bar.at_start()
    }

    /// Optimal reduced integrand at `(s, r, x)`.
    pub fn p_bar(&self, s: f64, r: f64, x: f64) -> Result<f64, StrategyError> {
        let theta = self.model.market_price_of_risk(s, r)?;
        let aversion = self.spec.aversion(s, r, x)?;
        pointwise_optimal_p(
            self.spec.family(),
            s,
            r,
            theta,
            aversion,
            0.0,
            &self.constraint,
        )
    }

    /// Optimal portfolio weight `pi = p / beta` at `(s, r, x)`.
    pub fn pi_bar(&self, s: f64, r: f64, x: f64) -> Result<f64, StrategyError> {
        pi_bar(&self.model, s, r, self.p_bar(s, r, x)?)
    }
}

/// Solve the deterministic-coefficient problem on `[t, horizon]`: runs the
/// feasibility classification on the time grid, then assembles the
/// closed-form strategy and the quadrature value curve. The constraint set
/// only affects the entropic family.
pub fn solve_deterministic(
    spec: &GeneratorSpec,
    model: &MarketModel,
    t: f64,
    horizon: f64,
    x: f64,
    n_steps: usize,
    constraint: Option<ConstraintSet>,
) -> Result<StrategyResult, StrategyError> {
    let y_bar = minimal_risk_value(spec, model, t, horizon, x, n_steps)?;
    let mut regime = FeasibilityRegime::Interior;
    for &s in &y_bar.grid {
        let theta = model.market_price_of_risk(s, 0.0)?;
        let aversion = spec.aversion(s, 0.0, x)?;
        let (point_regime, ..) = classify_point(spec.family(), theta, aversion);
        if point_regime > regime {
            regime = point_regime;
        }
    }
    Ok(StrategyResult {
        spec: spec.clone(),
        model: model.clone(),
        constraint: constraint.unwrap_or(ConstraintSet::WholeLine),
        regime,
        initial_wealth: x,
        y_bar,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use riskmin_generators::constant_aversion;

    fn theta_market(theta: f64) -> MarketModel {
        MarketModel::gaussian(0.0, 1.0, theta * 0.2, 0.2)
    }

    #[test]
    fn case1_constant_integrand_is_exact() {
        let spec = GeneratorSpec::case1(constant_aversion(0.5));
        let curve = minimal_risk_value(&spec, &theta_market(0.3), 0.0, 1.0, 1.0, 100).unwrap();
        assert!((curve.at_start() + 1.1).abs() < 1e-12);
        assert_eq!(*curve.values.last().unwrap(), -1.0);
    }

    #[test]
    fn case3_value() {
        let spec = GeneratorSpec::case3(constant_aversion(2.0));
        let curve = minimal_risk_value(&spec, &theta_market(0.5), 0.0, 1.0, 0.0, 100).unwrap();
        assert!((curve.at_start() + 0.0625).abs() < 1e-12);
    }

    #[test]
    fn zero_theta_gives_riskless_value() {
        let m = theta_market(0.0);
        for spec in [
            GeneratorSpec::case1(constant_aversion(0.5)),
            GeneratorSpec::case3(constant_aversion(2.0)),
            GeneratorSpec::entropic(constant_aversion(1.0)),
            GeneratorSpec::avar(0.3).unwrap(),
        ] {
            let curve = minimal_risk_value(&spec, &m, 0.0, 1.0, 2.0, 50).unwrap();
            assert!(
                (curve.at_start() + 2.0).abs() < 1e-12,
                "{:?}",
                spec.family()
            );
        }
    }

    #[test]
    fn time_varying_theta_quadrature_matches_closed_integral() {
        // theta(s) = 0.3 + 0.1 s with k = 1: integrand sqrt(1 - theta^2) - 1.
        let model = MarketModel::builder()
            .index_drift(|_, _| 0.0)
            .index_vol(|_, _| 1.0)
            .asset_drift(|s, _| (0.3 + 0.1 * s) * 0.2)
            .asset_vol(|_, _| 0.2)
            .build()
            .unwrap();
        let spec = GeneratorSpec::case1(constant_aversion(1.0));
        let curve = minimal_risk_value(&spec, &model, 0.0, 1.0, 0.0, 64).unwrap();
        // Reference by fine trapezoid quadrature.
        let n = 200_000;
        let mut acc = 0.0;
        for i in 0..n {
            let s = (i as f64 + 0.5) / n as f64;
            let theta: f64 = 0.3 + 0.1 * s;
            acc += ((1.0 - theta * theta).sqrt() - 1.0) / n as f64;
        }
        assert!(
            (curve.at_start() - acc).abs() < 1e-9,
            "{} vs {acc}",
            curve.at_start()
        );
    }

    #[test]
    fn infeasible_grid_point_is_an_error() {
        let spec = GeneratorSpec::case2(constant_aversion(0.6));
        assert!(matches!(
            minimal_risk_value(&spec, &theta_market(-0.1), 0.0, 1.0, 1.0, 10),
            Err(StrategyError::Infeasible { .. })
        ));
    }

    #[test]
    fn stochastic_theta_is_rejected() {
        let model = MarketModel::builder()
            .index_drift(|_, _| 0.0)
            .index_vol(|_, _| 1.0)
            .asset_drift(|_, r| 0.05 * r)
            .asset_vol(|_, _| 0.2)
            .build()
            .unwrap();
        let spec = GeneratorSpec::case1(constant_aversion(1.0));
        assert!(matches!(
            minimal_risk_value(&spec, &model, 0.0, 1.0, 0.0, 10),
            Err(StrategyError::NotDeterministic { .. })
        ));
    }

    #[test]
    fn deterministic_solution_bundles_strategy_and_value() {
        let spec = GeneratorSpec::case1(constant_aversion(0.5));
        let sol = solve_deterministic(&spec, &theta_market(0.3), 0.0, 1.0, 1.0, 100, None).unwrap();
        assert_eq!(sol.regime, FeasibilityRegime::Interior);
        assert_eq!(sol.z_bar(), 0.0);
        assert!((sol.y_bar_t() + 1.1).abs() < 1e-12);
        assert!((sol.p_bar(0.0, 1.0, 1.0).unwrap() - 0.75).abs() < 1e-12);
        assert!((sol.pi_bar(0.0, 1.0, 1.0).unwrap() - 3.75).abs() < 1e-12);
    }

    #[test]
    fn risk_reduction_over_feasible_case2_region() {
        // Ybar(t) <= -x on a (theta, l) sweep of the feasible region.
        for il in 1..=6 {
            let l = 0.25 * il as f64;
            let spec = GeneratorSpec::case2(constant_aversion(l));
            for it in 1..=9 {
                let theta = l * 0.1 * it as f64;
                let curve =
                    minimal_risk_value(&spec, &theta_market(theta), 0.0, 1.0, 1.5, 32).unwrap();
                assert!(
                    curve.at_start() <= -1.5 + 1e-12,
                    "l={l}, theta={theta}: {}",
                    curve.at_start()
                );
            }
        }
    }
}
