//! Risk-indifference price and derivative hedge for payoffs on the
//! non-tradable index.
//!
//! Both quantities depend only on market parameters: the price is the
//! expectation of the payoff under the measure defined by the Girsanov
//! density `A`,
//!
//! ```text
//! q = E[ A(T) F(R_T) ]            (A(t0) = 1)
//! ```
//!
//! and the hedge adjustment at the initial time combines the Malliavin
//! derivative of the index with the sensitivity of the market price of
//! risk:
//!
//! ```text
//! delta = -E[ A(T) F'(R_T) D_{t0} R_T ] / beta
//!         +E[ A(T) F(R_T) int theta_r D_{t0}R dW_hat ] / beta
//! ```
//!
//! This crate intentionally has no dependency on the generator library;
//! the build itself enforces that prices and hedges read no
//! risk-preference data.

mod derivative;
mod error;
mod hedge;
mod malliavin;
mod price;

pub use derivative::Derivative;
pub use error::PricingError;
pub use hedge::{derivative_hedge, integrability_diagnostics, HedgeReport, IntegrabilityDiagnostics};
pub use malliavin::{bump_resimulated_derivative, malliavin_curve, malliavin_index_derivative};
pub use price::{indifference_price, marginal_price, PriceReport};
