use rayon::prelude::*;

use crate::bundle::PathBundle;
use crate::error::MarketError;
use crate::model::MarketModel;

/// Exponent beyond which `exp` would overflow to infinity.
const MAX_EXPONENT: f64 = 700.0;

/// Girsanov density curves per path:
/// `A(s_j) = exp(-sum_{k<j} theta_k dW_k - 0.5 * sum_{k<j} theta_k^2 ds_k)`,
/// with `A(t0) = 1`. The exponent is accumulated in log space and
/// exponentiated once per grid point.
pub fn girsanov_density(
    bundle: &PathBundle,
    model: &MarketModel,
) -> Result<Vec<Vec<f64>>, MarketError> {
    (0..bundle.n_paths)
        .into_par_iter()
        .map(|i| {
            let mut log_a = 0.0f64;
            let mut max_exponent = 0.0f64;
            let mut curve = Vec::with_capacity(bundle.n_steps + 1);
            curve.push(1.0);
            for j in 0..bundle.n_steps {
                let s = bundle.grid[j];
                let r = bundle.index[i][j];
                let theta = model.market_price_of_risk(s, r)?;
                log_a += -theta * bundle.increments[i][j] - 0.5 * theta * theta * bundle.dt(j);
                max_exponent = max_exponent.max(log_a.abs());
                if log_a.abs() > MAX_EXPONENT {
                    return Err(MarketError::DensityOverflow {
                        path: i,
                        max_exponent,
                    });
                }
                curve.push(log_a.exp());
            }
            Ok(curve)
        })
        .collect()
}
