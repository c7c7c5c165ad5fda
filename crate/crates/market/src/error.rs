use thiserror::Error;

/// Errors raised by model evaluation, simulation and density computation.
#[derive(Debug, Clone, Error)]
pub enum MarketError {
    #[error("invalid simulation grid: {0}")]
    InvalidGrid(String),

    #[error("coefficient `{name}` evaluated to a non-finite value at (s = {s}, r = {r})")]
    NonFiniteCoefficient { name: &'static str, s: f64, r: f64 },

    #[error(
        "asset volatility {value} outside the admissible band [{lo}, {hi}] at (s = {s}, r = {r})"
    )]
    DegenerateVolatility {
        value: f64,
        lo: f64,
        hi: f64,
        s: f64,
        r: f64,
    },

    #[error("market price of risk is not finite at (s = {s}, r = {r})")]
    NonFiniteTheta { s: f64, r: f64 },

    #[error("Girsanov density exponent overflowed on path {path} (max exponent {max_exponent})")]
    DensityOverflow { path: usize, max_exponent: f64 },

    #[error("strategy table shape mismatch: {0}")]
    StrategyShape(String),

    #[error("model is missing required coefficient `{0}`")]
    MissingCoefficient(&'static str),
}
