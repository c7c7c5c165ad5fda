use riskmin_generators::GeneratorError;
use riskmin_market::MarketError;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum BsdeError {
    #[error("terminal vector has {found} entries but the bundle holds {expected} paths")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("a degree-{degree} basis needs at least {needed} paths, got {got}")]
    InsufficientPaths {
        degree: usize,
        needed: usize,
        got: usize,
    },

    #[error("regression matrix is rank-deficient; try a basis degree lower than {degree}")]
    Basis { degree: usize },

    #[error("driver returned a non-finite value at step {step}, path {path}")]
    DriverNonFinite { step: usize, path: usize },

    #[error(transparent)]
    Market(#[from] MarketError),

    #[error(transparent)]
    Generator(#[from] GeneratorError),
}
