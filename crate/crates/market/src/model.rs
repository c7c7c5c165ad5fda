use std::fmt;
use std::sync::Arc;

use crate::error::MarketError;

/// Deterministic coefficient of `(time, index level)`.
pub type CoeffFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Coefficients of the index/asset pair.
///
/// `index_drift`/`index_vol` drive the non-tradable index, while
/// `asset_drift`/`asset_vol` describe the tradable asset used for cross
/// hedging. The asset price itself is never materialized: only the market
/// price of risk `theta = asset_drift / asset_vol` enters the wealth
/// dynamics. Partial derivatives in the index level are optional; when a
/// model author does not supply them a central finite difference with step
/// `1e-5 * (1 + |r|)` is used.
#[derive(Clone)]
pub struct MarketModel {
    label: String,
    index_drift: CoeffFn,
    index_vol: CoeffFn,
    asset_drift: CoeffFn,
    asset_vol: CoeffFn,
    index_drift_dr: Option<CoeffFn>,
    index_vol_dr: Option<CoeffFn>,
    asset_drift_dr: Option<CoeffFn>,
    asset_vol_dr: Option<CoeffFn>,
    /// Lower bound of the admissible `|asset_vol|` band.
    pub vol_floor: f64,
    /// Upper bound of the admissible `|asset_vol|` band.
    pub vol_cap: f64,
}

impl fmt::Debug for MarketModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MarketModel")
            .field("label", &self.label)
            .field("vol_floor", &self.vol_floor)
            .field("vol_cap", &self.vol_cap)
            .finish()
    }
}

fn finite(name: &'static str, value: f64, s: f64, r: f64) -> Result<f64, MarketError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(MarketError::NonFiniteCoefficient { name, s, r })
    }
}

impl MarketModel {
    pub fn builder() -> MarketModelBuilder {
        MarketModelBuilder::default()
    }

    /// Constant-coefficient Gaussian index: `dR = b ds + sigma dW`.
    pub fn gaussian(index_drift: f64, index_vol: f64, asset_drift: f64, asset_vol: f64) -> Self {
        Self::builder()
            .label("gaussian")
            .index_drift(move |_, _| index_drift)
            .index_vol(move |_, _| index_vol)
            .asset_drift(move |_, _| asset_drift)
            .asset_vol(move |_, _| asset_vol)
            .index_drift_dr(|_, _| 0.0)
            .index_vol_dr(|_, _| 0.0)
            .asset_drift_dr(|_, _| 0.0)
            .asset_vol_dr(|_, _| 0.0)
            .build()
            .expect("gaussian preset is complete")
    }

    /// Ornstein-Uhlenbeck index: `dR = reversion * (mean_level - R) ds + sigma dW`.
    pub fn ornstein_uhlenbeck(
        reversion: f64,
        mean_level: f64,
        index_vol: f64,
        asset_drift: f64,
        asset_vol: f64,
    ) -> Self {
        Self::builder()
            .label("ornstein_uhlenbeck")
            .index_drift(move |_, r| reversion * (mean_level - r))
            .index_vol(move |_, _| index_vol)
            .asset_drift(move |_, _| asset_drift)
            .asset_vol(move |_, _| asset_vol)
            .index_drift_dr(move |_, _| -reversion)
            .index_vol_dr(|_, _| 0.0)
            .asset_drift_dr(|_, _| 0.0)
            .asset_vol_dr(|_, _| 0.0)
            .build()
            .expect("ou preset is complete")
    }

    /// Geometric index: `dR = growth * R ds + vol * R dW`.
    pub fn geometric(growth: f64, index_vol: f64, asset_drift: f64, asset_vol: f64) -> Self {
        Self::builder()
            .label("geometric")
            .index_drift(move |_, r| growth * r)
            .index_vol(move |_, r| index_vol * r)
            .asset_drift(move |_, _| asset_drift)
            .asset_vol(move |_, _| asset_vol)
            .index_drift_dr(move |_, _| growth)
            .index_vol_dr(move |_, _| index_vol)
            .asset_drift_dr(|_, _| 0.0)
            .asset_vol_dr(|_, _| 0.0)
            .build()
            .expect("geometric preset is complete")
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn index_drift(&self, s: f64, r: f64) -> f64 {
        (self.index_drift)(s, r)
    }

    pub fn index_vol(&self, s: f64, r: f64) -> f64 {
        (self.index_vol)(s, r)
    }

    pub fn asset_drift(&self, s: f64, r: f64) -> f64 {
        (self.asset_drift)(s, r)
    }

    pub fn asset_vol(&self, s: f64, r: f64) -> f64 {
        (self.asset_vol)(s, r)
    }

    /// Asset volatility with the `vol_floor <= |beta| <= vol_cap` band enforced.
    pub fn asset_vol_checked(&self, s: f64, r: f64) -> Result<f64, MarketError> {
        let beta = finite("asset_vol", self.asset_vol(s, r), s, r)?;
        if beta.abs() < self.vol_floor || beta.abs() > self.vol_cap {
            return Err(MarketError::DegenerateVolatility {
                value: beta,
                lo: self.vol_floor,
                hi: self.vol_cap,
                s,
                r,
            });
        }
        Ok(beta)
    }

    /// Market price of risk `theta = asset_drift / asset_vol`.
    pub fn market_price_of_risk(&self, s: f64, r: f64) -> Result<f64, MarketError> {
        let alpha = finite("asset_drift", self.asset_drift(s, r), s, r)?;
        let beta = self.asset_vol_checked(s, r)?;
        let theta = alpha / beta;
        if theta.is_finite() {
            Ok(theta)
        } else {
            Err(MarketError::NonFiniteTheta { s, r })
        }
    }

    fn diff_dr(f: &CoeffFn, s: f64, r: f64) -> f64 {
        let h = 1e-5 * (1.0 + r.abs());
        (f(s, r + h) - f(s, r - h)) / (2.0 * h)
    }

    pub fn index_drift_dr(&self, s: f64, r: f64) -> f64 {
        match &self.index_drift_dr {
            Some(d) => d(s, r),
            None => Self::diff_dr(&self.index_drift, s, r),
        }
    }

    pub fn index_vol_dr(&self, s: f64, r: f64) -> f64 {
        match &self.index_vol_dr {
            Some(d) => d(s, r),
            None => Self::diff_dr(&self.index_vol, s, r),
        }
    }

    pub fn asset_drift_dr(&self, s: f64, r: f64) -> f64 {
        match &self.asset_drift_dr {
            Some(d) => d(s, r),
            None => Self::diff_dr(&self.asset_drift, s, r),
        }
    }

    pub fn asset_vol_dr(&self, s: f64, r: f64) -> f64 {
        match &self.asset_vol_dr {
            Some(d) => d(s, r),
            None => Self::diff_dr(&self.asset_vol, s, r),
        }
    }

    /// `d theta / dr = alpha_r / beta - alpha * beta_r / beta^2`.
    pub fn market_price_of_risk_dr(&self, s: f64, r: f64) -> Result<f64, MarketError> {
        let beta = self.asset_vol_checked(s, r)?;
        let alpha = finite("asset_drift", self.asset_drift(s, r), s, r)?;
        let alpha_r = finite("asset_drift_dr", self.asset_drift_dr(s, r), s, r)?;
        let beta_r = finite("asset_vol_dr", self.asset_vol_dr(s, r), s, r)?;
        Ok(alpha_r / beta - alpha * beta_r / (beta * beta))
    }
}

/// Builder for custom (compiled-in) models.
#[derive(Default)]
pub struct MarketModelBuilder {
    label: Option<String>,
    index_drift: Option<CoeffFn>,
    index_vol: Option<CoeffFn>,
    asset_drift: Option<CoeffFn>,
    asset_vol: Option<CoeffFn>,
    index_drift_dr: Option<CoeffFn>,
    index_vol_dr: Option<CoeffFn>,
    asset_drift_dr: Option<CoeffFn>,
    asset_vol_dr: Option<CoeffFn>,
    vol_floor: Option<f64>,
    vol_cap: Option<f64>,
}

macro_rules! coeff_setter {
    ($name:ident) => {
        pub fn $name(mut self, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
            self.$name = Some(Arc::new(f));
            self
        }
    };
}

impl MarketModelBuilder {
    pub fn label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    coeff_setter!(index_drift);
    coeff_setter!(index_vol);
    coeff_setter!(asset_drift);
    coeff_setter!(asset_vol);
    coeff_setter!(index_drift_dr);
    coeff_setter!(index_vol_dr);
    coeff_setter!(asset_drift_dr);
    coeff_setter!(asset_vol_dr);

    pub fn vol_band(mut self, floor: f64, cap: f64) -> Self {
        self.vol_floor = Some(floor);
        self.vol_cap = Some(cap);
        self
    }

    pub fn build(self) -> Result<MarketModel, MarketError> {
        Ok(MarketModel {
            label: self.label.unwrap_or_else(|| "custom".to_string()),
            index_drift: self
                .index_drift
                .ok_or(MarketError::MissingCoefficient("index_drift"))?,
            index_vol: self
                .index_vol
                .ok_or(MarketError::MissingCoefficient("index_vol"))?,
            asset_drift: self
                .asset_drift
                .ok_or(MarketError::MissingCoefficient("asset_drift"))?,
            asset_vol: self
                .asset_vol
                .ok_or(MarketError::MissingCoefficient("asset_vol"))?,
            index_drift_dr: self.index_drift_dr,
            index_vol_dr: self.index_vol_dr,
            asset_drift_dr: self.asset_drift_dr,
            asset_vol_dr: self.asset_vol_dr,
            vol_floor: self.vol_floor.unwrap_or(1e-10),
            vol_cap: self.vol_cap.unwrap_or(1e12),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_is_the_drift_to_vol_ratio() {
        let m = MarketModel::gaussian(0.0, 1.0, 0.06, 0.2);
        assert!((m.market_price_of_risk(0.0, 1.0).unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn zero_appreciation_gives_zero_theta() {
        let m = MarketModel::gaussian(0.0, 1.0, 0.0, 0.7);
        assert_eq!(m.market_price_of_risk(0.3, -4.0).unwrap(), 0.0);
    }

    #[test]
    fn state_dependent_theta() {
        let m = MarketModel::builder()
            .index_drift(|_, _| 0.0)
            .index_vol(|_, _| 1.0)
            .asset_drift(|_, r| 0.05 * r)
            .asset_vol(|_, _| 0.2)
            .build()
            .unwrap();
        assert!((m.market_price_of_risk(0.0, 2.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn degenerate_vol_is_an_error() {
        let m = MarketModel::builder()
            .index_drift(|_, _| 0.0)
            .index_vol(|_, _| 1.0)
            .asset_drift(|_, _| 0.06)
            .asset_vol(|_, _| 0.0)
            .vol_band(1e-4, 10.0)
            .build()
            .unwrap();
        assert!(matches!(
            m.market_price_of_risk(0.0, 1.0),
            Err(MarketError::DegenerateVolatility { .. })
        ));
    }

    #[test]
    fn finite_difference_fallback_matches_analytic_derivative() {
        let m = MarketModel::builder()
            .index_drift(|_, r| -r)
            .index_vol(|_, r| 0.1 * r * r)
            .asset_drift(|_, r| 0.02 * r)
            .asset_vol(|_, _| 0.2)
            .build()
            .unwrap();
        assert!((m.index_drift_dr(0.0, 3.0) + 1.0).abs() < 1e-8);
        assert!((m.index_vol_dr(0.0, 3.0) - 0.6).abs() < 1e-6);
        // theta = 0.1 * r so theta_r = 0.1
        assert!((m.market_price_of_risk_dr(0.0, 3.0).unwrap() - 0.1).abs() < 1e-8);
    }
}
