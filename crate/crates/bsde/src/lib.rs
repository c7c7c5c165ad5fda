//! Least-squares Monte Carlo solver for the backward equations.
//!
//! The scheme is an explicit backward Euler recursion with one regression
//! per time step on polynomial features of the index level (the problems
//! here are Markovian in `R` because the initial wealth is a fixed
//! parameter):
//!
//! ```text
//! Z_j = E[ Y_{j+1} dW_j | R_j ] / ds_j          (increment projection)
//! Y_j = E[ Y_{j+1} | R_j ] + f(s_j, Z_j) ds_j
//! ```
//!
//! Given a fixed path bundle the solver is fully deterministic, so two
//! drivers solved on the same bundle can be compared path by path. That is
//! what `risk_of_strategy`, `comparison_check` and `minimality_probe`
//! exploit: all cross-checks run on common random numbers.

mod error;
mod risk;
mod solver;

pub use error::BsdeError;
pub use risk::{
    comparison_check, minimality_probe, risk_of_strategy, ComparisonOutcome, OrderingReport,
    ProbeEntry, ProbeReport, DEFAULT_Z_TRUNCATION,
};
pub use solver::{solve, BsdeSolution};
