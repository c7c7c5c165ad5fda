use riskmin_convex::ConstraintSet;
use riskmin_generators::{GeneratorFamily, GeneratorSpec};
use riskmin_market::MarketModel;

use crate::error::StrategyError;
use crate::feasibility::classify_point;

fn require_family(spec: &GeneratorSpec, expected: GeneratorFamily) -> Result<(), StrategyError> {
    if spec.family() == expected {
        Ok(())
    } else {
        Err(StrategyError::WrongFamily {
            expected: expected.name(),
            found: spec.family().name().to_string(),
        })
    }
}

fn infeasible(s: f64, r: f64, theta: f64, family: GeneratorFamily, aversion: f64) -> StrategyError {
    let (regime, margin, bound) = classify_point(family, theta, aversion);
    StrategyError::Infeasible {
        s,
        r,
        theta,
        bound,
        margin,
        regime,
    }
}

/// Closed-form pointwise optimum of the effective generator for any family,
/// given the market price of risk, the aversion value and the auxiliary
/// integrand `z_bar` at that point. Entropic uses the projection onto the
/// constraint set (pass `WholeLine` for the unconstrained problem).
pub fn pointwise_optimal_p(
    family: GeneratorFamily,
    s: f64,
    r: f64,
    theta: f64,
    aversion: f64,
    z_bar: f64,
    constraint: &ConstraintSet,
) -> Result<f64, StrategyError> {
    match family {
        GeneratorFamily::Case1Sqrt => {
            let k = aversion;
            if theta.abs() < k {
                Ok(theta / ((k - theta) * (k + theta)).sqrt() + z_bar)
            } else {
                Err(infeasible(s, r, theta, family, aversion))
            }
        }
        GeneratorFamily::Case2Logistic => {
            let l = aversion;
            if theta > 0.0 && theta < l {
                Ok((theta / (l - theta)).ln() + z_bar)
            } else {
                Err(infeasible(s, r, theta, family, aversion))
            }
        }
        GeneratorFamily::Case3Huber => {
            if theta.abs() <= 1.0 {
                Ok(z_bar + theta / aversion)
            } else {
                Err(StrategyError::UnboundedBelow { s, r, theta })
            }
        }
        GeneratorFamily::Avar => {
            let bound = if aversion < 0.5 {
                1.0
            } else {
                (1.0 - aversion) / aversion
            };
            if theta.abs() <= bound {
                // The kink of |z - p| dominates any |theta| below the slope.
                Ok(z_bar)
            } else {
                Err(StrategyError::UnboundedBelow { s, r, theta })
            }
        }
        GeneratorFamily::EntropicQuadratic => {
            let (proj, _) = constraint.project(z_bar + theta / aversion);
            Ok(proj)
        }
    }
}

/// `p = theta / sqrt(k^2 - theta^2) + z_bar` on `|theta| < k`.
pub fn closed_form_case1(
    spec: &GeneratorSpec,
    model: &MarketModel,
    s: f64,
    r: f64,
    x: f64,
    z_bar: f64,
) -> Result<f64, StrategyError> {
    require_family(spec, GeneratorFamily::Case1Sqrt)?;
    let theta = model.market_price_of_risk(s, r)?;
    let k = spec.aversion(s, r, x)?;
    pointwise_optimal_p(
        GeneratorFamily::Case1Sqrt,
        s,
        r,
        theta,
        k,
        z_bar,
        &ConstraintSet::WholeLine,
    )
}

/// `p = ln(theta / (l - theta)) + z_bar` on `0 < theta < l`.
pub fn closed_form_case2(
    spec: &GeneratorSpec,
    model: &MarketModel,
    s: f64,
    r: f64,
    x: f64,
    z_bar: f64,
) -> Result<f64, StrategyError> {
    require_family(spec, GeneratorFamily::Case2Logistic)?;
    let theta = model.market_price_of_risk(s, r)?;
    let l = spec.aversion(s, r, x)?;
    pointwise_optimal_p(
        GeneratorFamily::Case2Logistic,
        s,
        r,
        theta,
        l,
        z_bar,
        &ConstraintSet::WholeLine,
    )
}

/// `p = z_bar + theta / gamma` on `|theta| <= 1` (kink value at equality).
pub fn closed_form_case3(
    spec: &GeneratorSpec,
    model: &MarketModel,
    s: f64,
    r: f64,
    x: f64,
    z_bar: f64,
) -> Result<f64, StrategyError> {
    require_family(spec, GeneratorFamily::Case3Huber)?;
    let theta = model.market_price_of_risk(s, r)?;
    let gamma = spec.aversion(s, r, x)?;
    pointwise_optimal_p(
        GeneratorFamily::Case3Huber,
        s,
        r,
        theta,
        gamma,
        z_bar,
        &ConstraintSet::WholeLine,
    )
}

/// Constrained entropic optimum `proj_C(z_bar + theta / gamma)`.
pub fn entropic_constrained(
    spec: &GeneratorSpec,
    model: &MarketModel,
    s: f64,
    r: f64,
    x: f64,
    z_bar: f64,
    constraint: &ConstraintSet,
) -> Result<f64, StrategyError> {
    require_family(spec, GeneratorFamily::EntropicQuadratic)?;
    let theta = model.market_price_of_risk(s, r)?;
    let gamma = spec.aversion(s, r, x)?;
    pointwise_optimal_p(
        GeneratorFamily::EntropicQuadratic,
        s,
        r,
        theta,
        gamma,
        z_bar,
        constraint,
    )
}

/// Portfolio weight from the reduced integrand: `pi = p / beta`.
pub fn pi_bar(model: &MarketModel, s: f64, r: f64, p_bar: f64) -> Result<f64, StrategyError> {
    Ok(p_bar / model.asset_vol_checked(s, r)?)
}
