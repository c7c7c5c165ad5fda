use riskmin_market::{girsanov_density, MarketModel, PathBundle};

use crate::derivative::Derivative;
use crate::error::PricingError;
use crate::malliavin::variation_log;
use crate::price::warn_if_theta_unbounded;

/// Excess kurtosis above which an estimator integrand is flagged heavy-tailed.
const KURTOSIS_FLAG: f64 = 9.0;

/// Monte Carlo estimates of the three integrability moments behind the
/// hedge representation, plus tail diagnostics.
#[derive(Debug, Clone)]
pub struct IntegrabilityDiagnostics {
    /// `E_Q |F(R_T)|`.
    pub payoff_moment: f64,
    /// `E_Q ( int |D_s F(R_T)|^2 ds )^{1/2}` with `D_s F = F_r(R_T) D_s R_T`.
    pub malliavin_moment: f64,
    /// `E_Q [ |F(R_T)| ( int h(r) dr )^{1/2} ]`.
    pub cross_moment: f64,
    /// Largest sampled value of `h(r)`.
    pub h_max: f64,
    /// Sample kurtosis of the three integrands (payoff, Malliavin, cross).
    pub kurtosis: [f64; 3],
    pub heavy_tailed: bool,
}

/// Malliavin hedge at the initial time.
#[derive(Debug, Clone)]
pub struct HedgeReport {
    /// `delta = term1 + term2`, exactly.
    pub delta: f64,
    pub std_err: f64,
    pub term1: f64,
    pub term2: f64,
    pub n_paths: usize,
    pub diagnostics: IntegrabilityDiagnostics,
}

struct PathTerms {
    term1: Vec<f64>,
    term2: Vec<f64>,
    payoff_integrand: Vec<f64>,
    malliavin_integrand: Vec<f64>,
    cross_integrand: Vec<f64>,
    h_max: f64,
}

/// Shared per-path computation for the hedge and the diagnostics.
///
/// With `L` the first-variation log, `D_r R_j = sigma_r0 e^{L_j - L_r}`,
/// so suffix sums of `m_j = theta_r(s_j) e^{L_j} (dW_j + theta_j ds_j)`
/// give both the hedge's stochastic integral (at `r = t0`) and the whole
/// `h(r)` family in one backward pass.
fn accumulate(
    model: &MarketModel,
    derivative: &Derivative,
    bundle: &PathBundle,
) -> Result<PathTerms, PricingError> {
    let n = bundle.n_paths;
    let nsteps = bundle.n_steps;
    let density = girsanov_density(bundle, model)?;
    let beta0 = model.asset_vol_checked(bundle.t0, bundle.r0)?;
    let sigma0 = model.index_vol(bundle.t0, bundle.r0);

    let mut out = PathTerms {
        term1: Vec::with_capacity(n),
        term2: Vec::with_capacity(n),
        payoff_integrand: Vec::with_capacity(n),
        malliavin_integrand: Vec::with_capacity(n),
        cross_integrand: Vec::with_capacity(n),
        h_max: 0.0,
    };

    for i in 0..n {
        let a_t = density[i][nsteps];
        let r_t = bundle.index[i][nsteps];
        let f = derivative.payoff(r_t);
        if !f.is_finite() {
            return Err(PricingError::PayoffNotFinite { path: i, r: r_t });
        }
        let f_r = derivative
            .payoff_derivative(r_t)
            .ok_or(PricingError::MissingPayoffDerivative)?;

        // theta, theta_r and the W-hat increments along the path.
        let mut theta = Vec::with_capacity(nsteps);
        let mut theta_r = Vec::with_capacity(nsteps);
        for j in 0..nsteps {
            let s = bundle.grid[j];
            let r = bundle.index[i][j];
            theta.push(model.market_price_of_risk(s, r)?);
            theta_r.push(model.market_price_of_risk_dr(s, r)?);
        }

        // First-variation factor e^{L_j}, so D_r R_j = sigma(s_r, R_r)
        // e^{L_j - L_r}; always positive.
        let log = variation_log(model, bundle, i);
        let exp_log: Vec<f64> = log.iter().map(|l| l.exp()).collect();

        // Hedge stochastic integral at t0 plus all suffix sums for h(r).
        let mut m = vec![0.0; nsteps];
        for j in 0..nsteps {
            let dw_hat = bundle.increments[i][j] + theta[j] * bundle.dt(j);
            m[j] = theta_r[j] * exp_log[j] * dw_hat;
        }
        let mut suffix = vec![0.0; nsteps + 1];
        for j in (0..nsteps).rev() {
            suffix[j] = suffix[j + 1] + m[j];
        }

        let term1 = -a_t * f_r * (sigma0 * exp_log[nsteps]) / beta0;
        let term2 = a_t * f * (sigma0 * suffix[0]) / beta0;
        out.term1.push(term1);
        out.term2.push(term2);

        // h(r) = ( sum_{j >= r} theta_r D_r R_j dW_hat_j )^2.
        let mut h_integral = 0.0;
        let mut df_sq_integral = 0.0;
        for r_idx in 0..nsteps {
            let s_r = bundle.grid[r_idx];
            let sigma_r = model.index_vol(s_r, bundle.index[i][r_idx]);
            let scale = sigma_r / exp_log[r_idx];
            let h = (scale * suffix[r_idx]).powi(2);
            out.h_max = out.h_max.max(h);
            h_integral += h * bundle.dt(r_idx);

            let df = f_r * sigma_r * exp_log[nsteps] / exp_log[r_idx];
            df_sq_integral += df * df * bundle.dt(r_idx);
        }

        out.payoff_integrand.push(a_t * f.abs());
        out.malliavin_integrand.push(a_t * df_sq_integral.sqrt());
        out.cross_integrand.push(a_t * f.abs() * h_integral.sqrt());
    }

    Ok(out)
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn kurtosis(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let n = xs.len() as f64;
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n;
    if var <= 0.0 {
        return 0.0;
    }
    let m4 = xs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / n;
    m4 / (var * var)
}

fn diagnostics_from(terms: &PathTerms) -> IntegrabilityDiagnostics {
    let kurtosis = [
        kurtosis(&terms.payoff_integrand),
        kurtosis(&terms.malliavin_integrand),
        kurtosis(&terms.cross_integrand),
    ];
    IntegrabilityDiagnostics {
        payoff_moment: mean(&terms.payoff_integrand),
        malliavin_moment: mean(&terms.malliavin_integrand),
        cross_moment: mean(&terms.cross_integrand),
        h_max: terms.h_max,
        kurtosis,
        heavy_tailed: kurtosis.iter().any(|&k| k > KURTOSIS_FLAG),
    }
}

/// Monte Carlo estimates of the integrability moments only.
pub fn integrability_diagnostics(
    model: &MarketModel,
    derivative: &Derivative,
    bundle: &PathBundle,
) -> Result<IntegrabilityDiagnostics, PricingError> {
    // Diagnostics tolerate a missing payoff derivative by treating it as 0.
    let effective;
    let derivative = if derivative.has_derivative() {
        derivative
    } else {
        log::warn!("payoff derivative missing; Malliavin diagnostics use F_r = 0");
        effective = Derivative::custom(
            derivative.label().to_string(),
            {
                let d = derivative.clone();
                move |r| d.payoff(r)
            },
            Some(std::sync::Arc::new(|_| 0.0)),
            derivative.payoff_bound,
            0.0,
        );
        &effective
    };
    let terms = accumulate(model, derivative, bundle)?;
    Ok(diagnostics_from(&terms))
}

/// Malliavin hedge at the initial time:
///
/// ```text
/// term1 = -E[ A(T) F_r(R_T) D_{t0} R_T ] / beta(t0, r0)
/// term2 = +E[ A(T) F(R_T) sum_j theta_r D_{t0}R_j (dW_j + theta_j ds_j) ] / beta(t0, r0)
/// ```
///
/// with `delta = term1 + term2` and a combined standard error.
pub fn derivative_hedge(
    model: &MarketModel,
    derivative: &Derivative,
    bundle: &PathBundle,
) -> Result<HedgeReport, PricingError> {
    if !derivative.has_derivative() {
        return Err(PricingError::MissingPayoffDerivative);
    }
    warn_if_theta_unbounded(model, bundle)?;
    for warning in derivative.bound_warnings(bundle) {
        log::warn!("{}: {warning}", derivative.label());
    }

    let terms = accumulate(model, derivative, bundle)?;
    let n = bundle.n_paths;
    let term1 = mean(&terms.term1);
    let term2 = mean(&terms.term2);
    let combined: Vec<f64> = terms
        .term1
        .iter()
        .zip(&terms.term2)
        .map(|(a, b)| a + b)
        .collect();
    let delta_mean = mean(&combined);
    let var = combined
        .iter()
        .map(|v| (v - delta_mean) * (v - delta_mean))
        .sum::<f64>()
        / (n as f64 - 1.0);

    Ok(HedgeReport {
        delta: term1 + term2,
        std_err: (var / n as f64).sqrt(),
        term1,
        term2,
        n_paths: n,
        diagnostics: diagnostics_from(&terms),
    })
}
