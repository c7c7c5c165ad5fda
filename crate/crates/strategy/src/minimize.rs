use riskmin_convex::search;
use riskmin_generators::{effective_generator, GeneratorSpec};
use riskmin_market::MarketModel;

use crate::error::StrategyError;

/// Numeric pointwise minimizer of `p -> g_bar(s, x, z, p)`: bracketing from
/// `p = z` plus golden-section search. Returns `(p, g_bar(p))`. Monotone
/// decrease across the expansion limit is reported as an unbounded-below
/// error.
pub fn pointwise_minimize(
    spec: &GeneratorSpec,
    model: &MarketModel,
    s: f64,
    r: f64,
    x: f64,
    z: f64,
) -> Result<(f64, f64), StrategyError> {
    let theta = model.market_price_of_risk(s, r)?;
    let objective =
        |p: f64| effective_generator(spec, model, s, r, x, z, p).unwrap_or(f64::INFINITY);

    let limit = 1e9 * (1.0 + z.abs());
    let (lo, hi) = search::bracket_min(objective, z, 1.0, limit, 1e-13)
        .map_err(|_| StrategyError::UnboundedBelow { s, r, theta })?;
    let res = search::golden_min_polished(objective, lo, hi, 1e-10 * (1.0 + z.abs()));
    Ok((res.x, res.value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use riskmin_convex::polar;
    use riskmin_generators::constant_aversion;

    #[test]
    fn case1_two_routes_agree() {
        let spec = GeneratorSpec::case1(constant_aversion(0.5));
        let model = MarketModel::gaussian(0.0, 1.0, 0.06, 0.2); // theta 0.3
        let (p, value) = pointwise_minimize(&spec, &model, 0.0, 1.0, 1.0, 0.0).unwrap();
        assert!((p - 0.75).abs() < 1e-7);
        // Duality: min g_bar = -G(theta) = -0.1 at z = 0.
        let g = polar(&spec, 0.0, 1.0, 1.0, 0.3).unwrap();
        assert!((value - (-g.value)).abs() < 1e-9);
        assert!((value + 0.1).abs() < 1e-9);
    }

    #[test]
    fn zero_theta_puts_the_minimum_at_z() {
        let model = MarketModel::gaussian(0.0, 1.0, 0.0, 0.2);
        for spec in [
            GeneratorSpec::case1(constant_aversion(0.5)),
            GeneratorSpec::case3(constant_aversion(2.0)),
            GeneratorSpec::entropic(constant_aversion(1.0)),
            GeneratorSpec::avar(0.3).unwrap(),
        ] {
            let (p, value) = pointwise_minimize(&spec, &model, 0.0, 1.0, 0.0, 1.3).unwrap();
            assert!((p - 1.3).abs() < 1e-6, "{:?}: p = {p}", spec.family());
            assert!(value.abs() < 1e-9);
        }
    }

    #[test]
    fn case3_unboundedness_is_detected() {
        let spec = GeneratorSpec::case3(constant_aversion(2.0));
        let model = MarketModel::gaussian(0.0, 1.0, 0.3, 0.2); // theta 1.5
        assert!(matches!(
            pointwise_minimize(&spec, &model, 0.0, 1.0, 0.0, 0.0),
            Err(StrategyError::UnboundedBelow { .. })
        ));
    }
}
