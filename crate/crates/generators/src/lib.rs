//! Generator families `g(s, x, z)` for the dynamic risk measure.
//!
//! Each family is convex in `z`, normalized so that `g(s, x, 0) = 0`, and
//! scaled by a risk-aversion parameter that may depend on time, index level
//! and initial wealth. The effective generator
//!
//! ```text
//! g_bar(s, x, z, p) = g(s, x, z - p) - p * theta(s, r)
//! ```
//!
//! absorbs the wealth dynamics into the backward equation; minimizing it
//! pointwise over `p` is what produces the optimal strategies downstream.
//!
//! Five families are supported:
//!
//! * `case1_sqrt`      — `k * (sqrt(1 + z^2) - 1)`, Lipschitz bound `k`
//! * `case2_logistic`  — `l * ln((1 + e^{-z}) / 2)`, Lipschitz bound `l`
//! * `case3_huber`     — quadratic below `1/gamma`, linear beyond; bound 1
//! * `avar`            — `|z|` below level 1/2, `((1-a)/a) |z|` above
//! * `entropic_quadratic` — `gamma/2 * z^2`, not Lipschitz (flagged)

mod error;
mod spec;

pub use error::GeneratorError;
pub use spec::{
    constant_aversion, effective_generator, huber_identity_check, wealth_decay_aversion,
    AversionFn, GeneratorFamily, GeneratorSpec,
};
