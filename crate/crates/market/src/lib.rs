//! Market model for a non-tradable index hedged with one correlated tradable asset.
//!
//! The index follows `dR = b(s, R) ds + sigma(s, R) dW` and the tradable asset
//! has appreciation rate `alpha(s, R)` and volatility `beta(s, R)` on the same
//! Brownian driver, so the whole market is summarized by the index paths plus
//! the market price of risk `theta = alpha / beta`. Wealth is always expressed
//! through the reduced integrand `p = pi * beta`:
//!
//! ```text
//! X^p(T) = x + sum_j theta(s_j, R_j) p_j ds_j + sum_j p_j dW_j
//! ```
//!
//! Everything in this crate is deterministic given `(model, grid, seed)`:
//! each path draws from its own RNG stream derived from the master seed, so
//! parallel and serial execution produce identical bundles and all downstream
//! estimators can share common random numbers.

mod bundle;
mod density;
mod error;
mod model;
mod wealth;

pub use bundle::{simulate_index, PathBundle};
pub use density::girsanov_density;
pub use error::MarketError;
pub use model::{CoeffFn, MarketModel, MarketModelBuilder};
pub use wealth::{terminal_wealth, wealth_process, StrategyProcess};
