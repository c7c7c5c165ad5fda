use riskmin_market::MarketError;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum PricingError {
    #[error("payoff evaluated to a non-finite value at index level {r} on path {path}")]
    PayoffNotFinite { path: usize, r: f64 },

    #[error("derivative declares no payoff derivative; the hedge needs F_r")]
    MissingPayoffDerivative,

    #[error("Malliavin bump size must be positive and finite, got {0}")]
    InvalidBump(f64),

    #[error(transparent)]
    Market(#[from] MarketError),
}
