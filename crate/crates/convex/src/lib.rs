//! Legendre-Fenchel machinery for the generator families.
//!
//! The polar function
//!
//! ```text
//! G(s, x, mu) = sup_r ( -mu * r - g(s, x, r) )
//! ```
//!
//! is finite exactly when `|mu|` stays within the generator's Lipschitz
//! bound; infiniteness is a meaningful regime (it encodes strategy
//! non-existence downstream), so it is represented by an explicit flag and
//! never by a floating sentinel. Optimality of a candidate point is
//! certified through the Fenchel-Young equality
//! `g(r) + mu * r = -G(mu)`, and every analytic branch can be
//! cross-checked against a bracketing + golden-section maximization.

mod constraint;
mod error;
mod polar;
pub mod search;

pub use constraint::{project, ConstraintSet};
pub use error::ConvexError;
pub use polar::{numeric_polar, optimal_p_from_polar, polar, subdifferential_test, PolarResult};
