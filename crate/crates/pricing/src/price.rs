use riskmin_market::{girsanov_density, MarketModel, PathBundle};

use crate::derivative::Derivative;
use crate::error::PricingError;

/// Empirical bound above which the market price of risk is flagged as
/// effectively unbounded on the sampled paths.
const THETA_WARN_BOUND: f64 = 20.0;

/// Monte Carlo risk-indifference price of a payoff.
#[derive(Debug, Clone)]
pub struct PriceReport {
    pub q: f64,
    pub std_err: f64,
    pub n_paths: usize,
    /// Sample mean of the terminal Girsanov density (should be near 1).
    pub density_mean: f64,
    /// Sample second moment of the terminal density.
    pub density_second_moment: f64,
}

/// Risk-indifference price `q = E[A(T) F(R_T)]` (with `A(t0) = 1`), with
/// its Monte Carlo standard error and measure diagnostics. The price reads
/// no risk-preference data: it depends on the market and the payoff only.
pub fn indifference_price(
    model: &MarketModel,
    derivative: &Derivative,
    bundle: &PathBundle,
) -> Result<PriceReport, PricingError> {
    warn_if_theta_unbounded(model, bundle)?;
    for warning in derivative.bound_warnings(bundle) {
        log::warn!("{}: {warning}", derivative.label());
    }

    let density = girsanov_density(bundle, model)?;
    let n = bundle.n_paths;
    let mut weighted = Vec::with_capacity(n);
    let mut a_sum = 0.0;
    let mut a2_sum = 0.0;
    for i in 0..n {
        let a = density[i][bundle.n_steps];
        let r = bundle.index[i][bundle.n_steps];
        let f = derivative.payoff(r);
        if !f.is_finite() {
            return Err(PricingError::PayoffNotFinite { path: i, r });
        }
        weighted.push(a * f);
        a_sum += a;
        a2_sum += a * a;
    }

    let q = weighted.iter().sum::<f64>() / n as f64;
    let var = weighted.iter().map(|w| (w - q) * (w - q)).sum::<f64>() / (n as f64 - 1.0);
    Ok(PriceReport {
        q,
        std_err: (var / n as f64).sqrt(),
        n_paths: n,
        density_mean: a_sum / n as f64,
        density_second_moment: a2_sum / n as f64,
    })
}

/// The price is linear in the payoff, so the marginal risk price of an
/// infinitesimal extra unit coincides with the indifference price itself.
pub fn marginal_price(report: &PriceReport) -> f64 {
    report.q
}

pub(crate) fn warn_if_theta_unbounded(
    model: &MarketModel,
    bundle: &PathBundle,
) -> Result<(), PricingError> {
    let path_stride = (bundle.n_paths / 128).max(1);
    let mut max_theta = 0.0f64;
    for i in (0..bundle.n_paths).step_by(path_stride) {
        for j in 0..bundle.n_steps {
            let theta = model.market_price_of_risk(bundle.grid[j], bundle.index[i][j])?;
            max_theta = max_theta.max(theta.abs());
        }
    }
    if max_theta > THETA_WARN_BOUND {
        log::warn!(
            "market price of risk reaches {max_theta:.2} on sampled paths; \
             the pricing measure may be ill-behaved"
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use riskmin_market::simulate_index;

    #[test]
    fn constant_payoff_at_zero_theta_is_exact() {
        let m = MarketModel::gaussian(0.0, 1.0, 0.0, 0.2);
        let b = simulate_index(&m, 0.0, 1.0, 1.0, 16, 500, 9).unwrap();
        let report = indifference_price(&m, &Derivative::constant(3.25), &b).unwrap();
        assert_eq!(report.q, 3.25);
        assert_eq!(report.density_mean, 1.0);
        assert_eq!(marginal_price(&report), 3.25);
    }

    #[test]
    fn zero_payoff_prices_at_zero() {
        let m = MarketModel::gaussian(0.0, 1.0, 0.06, 0.2);
        let b = simulate_index(&m, 0.0, 1.0, 1.0, 16, 500, 9).unwrap();
        let report = indifference_price(&m, &Derivative::constant(0.0), &b).unwrap();
        assert_eq!(report.q, 0.0);
    }

    #[test]
    fn non_finite_payoff_is_an_error() {
        let m = MarketModel::gaussian(0.0, 1.0, 0.06, 0.2);
        let b = simulate_index(&m, 0.0, 1.0, 1.0, 16, 64, 9).unwrap();
        let bad = Derivative::custom("bad", |_| f64::NAN, None, 1.0, 1.0);
        assert!(matches!(
            indifference_price(&m, &bad, &b),
            Err(PricingError::PayoffNotFinite { .. })
        ));
    }
}
