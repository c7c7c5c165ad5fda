use riskmin_bsde::{solve, DEFAULT_Z_TRUNCATION};
use riskmin_convex::ConstraintSet;
use riskmin_generators::{GeneratorFamily, GeneratorSpec};
use riskmin_market::{MarketModel, PathBundle};

use crate::closed_form::pointwise_optimal_p;
use crate::error::StrategyError;

/// Stochastic-coefficient solution: the optimal integrand and the auxiliary
/// process are only defined implicitly through each other, so they are
/// solved by fixed-point iteration around the backward solver.
///
/// Layout matches the solver: `z_bar[step][path]`, `p_bar[step][path]`.
#[derive(Debug, Clone)]
pub struct CoupledSolution {
    pub y_bar_t: f64,
    pub y_t_dispersion: f64,
    pub z_bar: Vec<Vec<f64>>,
    pub p_bar: Vec<Vec<f64>>,
    pub iterations: usize,
    pub residual: f64,
}

fn optimal_p_table(
    spec: &GeneratorSpec,
    bundle: &PathBundle,
    theta: &[Vec<f64>],
    aversion: &[Vec<f64>],
    z_bar: &[Vec<f64>],
    constraint: &ConstraintSet,
) -> Result<Vec<Vec<f64>>, StrategyError> {
    let mut table = Vec::with_capacity(bundle.n_steps);
    for j in 0..bundle.n_steps {
        let s = bundle.grid[j];
        let mut row = Vec::with_capacity(bundle.n_paths);
        for i in 0..bundle.n_paths {
            row.push(pointwise_optimal_p(
                spec.family(),
                s,
                bundle.index[i][j],
                theta[j][i],
                aversion[j][i],
                z_bar[j][i],
                constraint,
            )?);
        }
        table.push(row);
    }
    Ok(table)
}

/// Solve the coupled system: iterate `p = p(theta, aversion, z_bar)` and a
/// backward solve of the effective equation (terminal value `-x`, driver
/// `g_bar(s, x, z, p)`) updating `z_bar`, until the sup-over-time RMS
/// change of `z_bar` drops below `tol` (default 1e-4) or `max_iter`
/// (default 20) is hit, which is an error.
#[allow(clippy::too_many_arguments)]
pub fn solve_coupled(
    spec: &GeneratorSpec,
    model: &MarketModel,
    bundle: &PathBundle,
    x: f64,
    constraint: Option<ConstraintSet>,
    basis_degree: usize,
    tol: f64,
    max_iter: usize,
) -> Result<CoupledSolution, StrategyError> {
    let constraint = constraint.unwrap_or(ConstraintSet::WholeLine);
    let n = bundle.n_paths;
    let nsteps = bundle.n_steps;

    let mut theta = Vec::with_capacity(nsteps);
    let mut aversion = Vec::with_capacity(nsteps);
    for j in 0..nsteps {
        let s = bundle.grid[j];
        let mut trow = Vec::with_capacity(n);
        let mut arow = Vec::with_capacity(n);
        for i in 0..n {
            let r = bundle.index[i][j];
            trow.push(model.market_price_of_risk(s, r)?);
            arow.push(spec.aversion(s, r, x)?);
        }
        theta.push(trow);
        aversion.push(arow);
    }

    let truncate = spec.family() == GeneratorFamily::EntropicQuadratic;
    let terminal = vec![-x; n];
    let mut z_bar = vec![vec![0.0; n]; nsteps];
    let mut residual = f64::INFINITY;

    for iteration in 1..=max_iter {
        let p_bar = optimal_p_table(spec, bundle, &theta, &aversion, &z_bar, &constraint)?;
        let driver = |j: usize, i: usize, z: f64| -> f64 {
            let s = bundle.grid[j];
            let r = bundle.index[i][j];
            let mut arg = z - p_bar[j][i];
            if truncate {
                arg = arg.clamp(-DEFAULT_Z_TRUNCATION, DEFAULT_Z_TRUNCATION);
            }
            match spec.evaluate(s, r, x, arg) {
                Ok(g) => g - p_bar[j][i] * theta[j][i],
                Err(_) => f64::NAN,
            }
        };
        let sol = solve(bundle, &terminal, driver, basis_degree)?;

        residual = 0.0;
        for j in 0..nsteps {
            let ms: f64 = (0..n)
                .map(|i| {
                    let d = sol.z[j][i] - z_bar[j][i];
                    d * d
                })
                .sum::<f64>()
                / n as f64;
            residual = residual.max(ms.sqrt());
        }
        z_bar = sol.z;

        if residual < tol {
            let p_bar = optimal_p_table(spec, bundle, &theta, &aversion, &z_bar, &constraint)?;
            return Ok(CoupledSolution {
                y_bar_t: sol.y_t,
                y_t_dispersion: sol.y_t_dispersion,
                z_bar,
                p_bar,
                iterations: iteration,
                residual,
            });
        }
    }

    Err(StrategyError::NoConvergence {
        residual,
        iterations: max_iter,
    })
}
