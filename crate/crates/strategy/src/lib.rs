//! Risk-minimizing strategies.
//!
//! The pointwise problem is to minimize the effective generator
//! `g_bar(s, x, z, p) = g(s, x, z - p) - p * theta` over the reduced
//! integrand `p`. Whether a minimizer exists is decided entirely by the
//! market price of risk against the generator's aversion scale, and on the
//! feasible range each family has a closed-form optimum:
//!
//! ```text
//! case1:    p = theta / sqrt(k^2 - theta^2) + z      (|theta| < k)
//! case2:    p = ln(theta / (l - theta)) + z          (0 < theta < l)
//! case3:    p = z + theta / gamma                    (|theta| <= 1)
//! entropic: p = proj_C(z + theta / gamma)            (constrained)
//! ```
//!
//! Every closed form is cross-checked against an independent bracketing +
//! golden-section minimizer, and against the duality identity
//! `min_p g_bar = -G(theta) - theta z`. The portfolio weight is always
//! `pi = p / beta`.
//!
//! In deterministic-coefficient mode (`theta` and aversion independent of
//! the index level) the auxiliary process vanishes and the minimal risk
//! value reduces to a time quadrature; in stochastic mode the strategy and
//! the auxiliary integrand are solved jointly by a fixed-point iteration
//! around the regression-based backward solver.

mod closed_form;
mod coupled;
mod error;
mod feasibility;
mod minimize;
mod value;

pub use closed_form::{
    closed_form_case1, closed_form_case2, closed_form_case3, entropic_constrained, pi_bar,
    pointwise_optimal_p,
};
pub use coupled::{solve_coupled, CoupledSolution};
pub use error::StrategyError;
pub use feasibility::{classify_point, feasibility, FeasibilityRegime, FeasibilityReport};
pub use minimize::pointwise_minimize;
pub use value::{minimal_risk_value, solve_deterministic, StrategyResult, YBarCurve};
