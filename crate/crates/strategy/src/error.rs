use riskmin_bsde::BsdeError;
use riskmin_convex::ConvexError;
use riskmin_generators::GeneratorError;
use riskmin_market::MarketError;
use thiserror::Error;

use crate::feasibility::FeasibilityRegime;

#[derive(Debug, Error)]
pub enum StrategyError {
    #[error("operation requires the `{expected}` family, got `{found}`")]
    WrongFamily {
        expected: &'static str,
        found: String,
    },

    #[error(
        "infeasible point (s = {s}, r = {r}): regime {regime:?}, margin {margin} \
         (market price of risk {theta} against bound {bound})"
    )]
    Infeasible {
        s: f64,
        r: f64,
        theta: f64,
        bound: f64,
        margin: f64,
        regime: FeasibilityRegime,
    },

    #[error("effective generator is unbounded below at (s = {s}, r = {r}), theta = {theta}")]
    UnboundedBelow { s: f64, r: f64, theta: f64 },

    #[error("family `{0}` has no minimal-risk quadrature")]
    UnsupportedFamily(String),

    #[error("deterministic mode requires r-independent {what}: {detail}")]
    NotDeterministic { what: &'static str, detail: String },

    #[error("coupled solve did not converge: residual {residual} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },

    #[error(transparent)]
    Market(#[from] MarketError),

    #[error(transparent)]
    Generator(#[from] GeneratorError),

    #[error(transparent)]
    Convex(#[from] ConvexError),

    #[error(transparent)]
    Bsde(#[from] BsdeError),
}
