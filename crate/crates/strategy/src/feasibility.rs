use riskmin_generators::{GeneratorFamily, GeneratorSpec};
use riskmin_market::MarketModel;
use serde::{Deserialize, Serialize};

use crate::error::StrategyError;

/// Existence classification of the pointwise minimizer of the effective
/// generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeasibilityRegime {
    /// Unique interior minimizer.
    Interior,
    /// Minimizer exists but sits on the Lipschitz boundary (non-unique or
    /// kink-attained).
    Boundary,
    /// Bounded below but the infimum is not attained.
    InfeasibleNoMinimizer,
    /// Infimum is minus infinity.
    InfeasibleUnbounded,
}

impl FeasibilityRegime {
    pub fn is_feasible(&self) -> bool {
        matches!(
            self,
            FeasibilityRegime::Interior | FeasibilityRegime::Boundary
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub regime: FeasibilityRegime,
    /// Worst distance of the market price of risk to the family's
    /// feasibility bound over the grid (negative when outside).
    pub margin: f64,
    /// `(s, r)` attaining the worst margin.
    pub witness: (f64, f64),
}

/// Classify one `(theta, aversion)` point: regime plus the margin to the
/// feasibility bound in the family's natural units.
pub fn classify_point(
    family: GeneratorFamily,
    theta: f64,
    aversion: f64,
) -> (FeasibilityRegime, f64, f64) {
    use FeasibilityRegime::*;
    match family {
        GeneratorFamily::Case1Sqrt => {
            let bound = aversion;
            let margin = bound - theta.abs();
            let regime = if margin > 0.0 {
                Interior
            } else if margin == 0.0 {
                // Slope of g_bar flattens toward zero: bounded infimum,
                // approached only as |p| grows.
                InfeasibleNoMinimizer
            } else {
                InfeasibleUnbounded
            };
            (regime, margin, bound)
        }
        GeneratorFamily::Case2Logistic => {
            let bound = aversion;
            let margin = theta.min(bound - theta);
            let regime = if theta > 0.0 && theta < bound {
                Interior
            } else if theta == 0.0 || theta == bound {
                // The stationarity equation l e^p/(1+e^p) = theta has no
                // finite root at the endpoints.
                InfeasibleNoMinimizer
            } else {
                InfeasibleUnbounded
            };
            (regime, margin, bound)
        }
        GeneratorFamily::Case3Huber => {
            let margin = 1.0 - theta.abs();
            let regime = if margin > 0.0 {
                Interior
            } else if margin == 0.0 {
                // Minimizer exists on the linear branch; canonical kink value.
                Boundary
            } else {
                InfeasibleUnbounded
            };
            (regime, margin, 1.0)
        }
        GeneratorFamily::Avar => {
            let bound = if aversion < 0.5 {
                1.0
            } else {
                (1.0 - aversion) / aversion
            };
            let margin = bound - theta.abs();
            let regime = if margin > 0.0 {
                Interior
            } else if margin == 0.0 {
                Boundary
            } else {
                InfeasibleUnbounded
            };
            (regime, margin, bound)
        }
        GeneratorFamily::EntropicQuadratic => (Interior, f64::INFINITY, f64::INFINITY),
    }
}

/// Feasibility analysis over a grid of `(s, r, x)` samples; infeasibility
/// is a report, not an error.
pub fn feasibility(
    spec: &GeneratorSpec,
    model: &MarketModel,
    grid: &[(f64, f64, f64)],
) -> Result<FeasibilityReport, StrategyError> {
    assert!(!grid.is_empty(), "feasibility grid must be non-empty");
    let mut worst_regime = FeasibilityRegime::Interior;
    let mut worst_margin = f64::INFINITY;
    let mut witness = (grid[0].0, grid[0].1);
    for &(s, r, x) in grid {
        let theta = model.market_price_of_risk(s, r)?;
        let aversion = spec.aversion(s, r, x)?;
        let (regime, margin, _) = classify_point(spec.family(), theta, aversion);
        if regime > worst_regime {
            worst_regime = regime;
        }
        if margin < worst_margin {
            worst_margin = margin;
            witness = (s, r);
        }
    }
    Ok(FeasibilityReport {
        feasible: worst_regime.is_feasible(),
        regime: worst_regime,
        margin: worst_margin,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use riskmin_generators::constant_aversion;

    fn grid() -> Vec<(f64, f64, f64)> {
        let mut g = Vec::new();
        for i in 0..5 {
            g.push((0.25 * i as f64, 1.0 + 0.1 * i as f64, 1.0));
        }
        g
    }

    #[test]
    fn case1_interior_with_margin() {
        let spec = GeneratorSpec::case1(constant_aversion(0.5));
        let model = MarketModel::gaussian(0.0, 1.0, 0.06, 0.2); // theta 0.3
        let rep = feasibility(&spec, &model, &grid()).unwrap();
        assert!(rep.feasible);
        assert_eq!(rep.regime, FeasibilityRegime::Interior);
        assert!((rep.margin - 0.2).abs() < 1e-12);
    }

    #[test]
    fn case2_negative_theta_is_infeasible() {
        let spec = GeneratorSpec::case2(constant_aversion(0.6));
        let model = MarketModel::gaussian(0.0, 1.0, -0.02, 0.2); // theta -0.1
        let rep = feasibility(&spec, &model, &grid()).unwrap();
        assert!(!rep.feasible);
        assert_eq!(rep.regime, FeasibilityRegime::InfeasibleUnbounded);
    }

    #[test]
    fn case2_zero_theta_has_no_minimizer() {
        let (regime, ..) = classify_point(GeneratorFamily::Case2Logistic, 0.0, 0.6);
        assert_eq!(regime, FeasibilityRegime::InfeasibleNoMinimizer);
        let (regime, ..) = classify_point(GeneratorFamily::Case2Logistic, 0.6, 0.6);
        assert_eq!(regime, FeasibilityRegime::InfeasibleNoMinimizer);
        let (regime, ..) = classify_point(GeneratorFamily::Case2Logistic, 0.7, 0.6);
        assert_eq!(regime, FeasibilityRegime::InfeasibleUnbounded);
    }

    #[test]
    fn case3_unbounded_beyond_unit_theta() {
        let spec = GeneratorSpec::case3(constant_aversion(2.0));
        let model = MarketModel::gaussian(0.0, 1.0, 0.3, 0.2); // theta 1.5
        let rep = feasibility(&spec, &model, &grid()).unwrap();
        assert_eq!(rep.regime, FeasibilityRegime::InfeasibleUnbounded);
        let (regime, ..) = classify_point(GeneratorFamily::Case3Huber, 1.0, 2.0);
        assert_eq!(regime, FeasibilityRegime::Boundary);
    }

    #[test]
    fn case1_boundary_and_beyond() {
        let (regime, margin, _) = classify_point(GeneratorFamily::Case1Sqrt, 0.5, 0.5);
        assert_eq!(regime, FeasibilityRegime::InfeasibleNoMinimizer);
        assert_eq!(margin, 0.0);
        let (regime, ..) = classify_point(GeneratorFamily::Case1Sqrt, -0.7, 0.5);
        assert_eq!(regime, FeasibilityRegime::InfeasibleUnbounded);
    }

    #[test]
    fn witness_tracks_the_worst_point() {
        let spec = GeneratorSpec::case1(constant_aversion(0.5));
        // theta grows with r: worst margin at largest r.
        let model = MarketModel::builder()
            .index_drift(|_, _| 0.0)
            .index_vol(|_, _| 1.0)
            .asset_drift(|_, r| 0.04 * r)
            .asset_vol(|_, _| 0.2)
            .build()
            .unwrap();
        let rep = feasibility(&spec, &model, &grid()).unwrap();
        assert_eq!(rep.witness.1, 1.4);
        assert!((rep.margin - (0.5 - 0.2 * 1.4)).abs() < 1e-12);
    }

    #[test]
    fn entropic_is_always_interior() {
        let spec = GeneratorSpec::entropic(constant_aversion(1.0));
        let model = MarketModel::gaussian(0.0, 1.0, 2.0, 0.2); // theta 10
        let rep = feasibility(&spec, &model, &grid()).unwrap();
        assert!(rep.feasible);
    }
}
