use rayon::prelude::*;
use riskmin_market::{MarketModel, PathBundle};

use crate::error::PricingError;

/// Log of the first-variation factor accumulated along one path:
/// `L(j) = sum_{k < j} (b_r - sigma_r^2 / 2) ds_k + sigma_r dW_k`,
/// evaluated at the realized index levels.
pub(crate) fn variation_log(model: &MarketModel, bundle: &PathBundle, path: usize) -> Vec<f64> {
    let mut log = Vec::with_capacity(bundle.n_steps + 1);
    let mut acc = 0.0;
    log.push(0.0);
    for j in 0..bundle.n_steps {
        let s = bundle.grid[j];
        let r = bundle.index[path][j];
        let b_r = model.index_drift_dr(s, r);
        let sig_r = model.index_vol_dr(s, r);
        acc += (b_r - 0.5 * sig_r * sig_r) * bundle.dt(j) + sig_r * bundle.increments[path][j];
        log.push(acc);
    }
    log
}

/// Malliavin derivative curves `D_{s_r} R_{s_j}` for all grid points `j`,
/// per path, from the closed exponential form
///
/// ```text
/// D_r R_s = sigma(r, R_r) * exp( int_r^s (b_r - sigma_r^2/2) du
///                               + int_r^s sigma_r dW )
/// ```
///
/// (all integrals over `[r, s]`). Entries with `j < r_idx` are zero.
pub fn malliavin_curve(
    model: &MarketModel,
    bundle: &PathBundle,
    r_idx: usize,
) -> Result<Vec<Vec<f64>>, PricingError> {
    let out: Vec<Vec<f64>> = (0..bundle.n_paths)
        .into_par_iter()
        .map(|i| {
            let log = variation_log(model, bundle, i);
            let s_r = bundle.grid[r_idx];
            let sigma = model.index_vol(s_r, bundle.index[i][r_idx]);
            let mut curve = vec![0.0; bundle.n_steps + 1];
            for (j, c) in curve.iter_mut().enumerate().skip(r_idx) {
                *c = sigma * (log[j] - log[r_idx]).exp();
            }
            curve
        })
        .collect();
    Ok(out)
}

/// Single-point Malliavin derivative `D_{s_{r_idx}} R_{s_{s_idx}}` per path
/// (zero when the perturbation time lies after the evaluation time).
pub fn malliavin_index_derivative(
    model: &MarketModel,
    bundle: &PathBundle,
    r_idx: usize,
    s_idx: usize,
) -> Result<Vec<f64>, PricingError> {
    if r_idx > s_idx {
        return Ok(vec![0.0; bundle.n_paths]);
    }
    let curves = malliavin_curve(model, bundle, r_idx)?;
    Ok(curves.into_iter().map(|c| c[s_idx]).collect())
}

/// First-variation oracle: bump the Brownian path by `eta` at grid point
/// `r_idx` (so the index moves by `sigma(r, R_r) * eta`), re-run the Euler
/// recursion on the same increments, and return
/// `(R^bumped(s) - R(s)) / eta` per path. Converges to `D_r R_s` as `eta`
/// and the step size shrink.
pub fn bump_resimulated_derivative(
    model: &MarketModel,
    bundle: &PathBundle,
    r_idx: usize,
    s_idx: usize,
    eta: f64,
) -> Result<Vec<f64>, PricingError> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(PricingError::InvalidBump(eta));
    }
    if r_idx > s_idx {
        return Ok(vec![0.0; bundle.n_paths]);
    }
    let out: Vec<f64> = (0..bundle.n_paths)
        .into_par_iter()
        .map(|i| {
            let s_r = bundle.grid[r_idx];
            let mut bumped = bundle.index[i][r_idx]
                + model.index_vol(s_r, bundle.index[i][r_idx]) * eta;
            for j in r_idx..s_idx {
                let s = bundle.grid[j];
                bumped += model.index_drift(s, bumped) * bundle.dt(j)
                    + model.index_vol(s, bumped) * bundle.increments[i][j];
            }
            (bumped - bundle.index[i][s_idx]) / eta
        })
        .collect();
    Ok(out)
}
