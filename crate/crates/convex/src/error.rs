use riskmin_generators::GeneratorError;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum ConvexError {
    #[error("polar function is infinite at mu = {mu}; test not applicable")]
    InfinitePolar { mu: f64 },

    #[error("interval constraint requires lo <= hi, got [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error(transparent)]
    Generator(#[from] GeneratorError),
}
