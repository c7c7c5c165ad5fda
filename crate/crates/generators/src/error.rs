use riskmin_market::MarketError;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum GeneratorError {
    #[error("risk-aversion parameter must be positive, got {value} at (s = {s}, r = {r}, x = {x})")]
    NonPositiveAversion { s: f64, r: f64, x: f64, value: f64 },

    #[error("AVaR level must lie in (0, 1], got {0}")]
    InvalidAvarLevel(f64),

    #[error("operation requires the `{expected}` family, got `{found}`")]
    WrongFamily {
        expected: &'static str,
        found: String,
    },

    #[error(
        "Huber identity violated at (s = {s}, r = {r}, x = {x}, z = {z}): \
         gamma * g = {product} but Huber gives {huber}"
    )]
    IdentityViolation {
        s: f64,
        r: f64,
        x: f64,
        z: f64,
        product: f64,
        huber: f64,
    },

    #[error(transparent)]
    Market(#[from] MarketError),
}
