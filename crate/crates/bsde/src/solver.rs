use nalgebra::{Cholesky, DMatrix, DVector};
use riskmin_market::PathBundle;

use crate::error::BsdeError;

/// Ridge added to the normal equations (relative to the path count).
const RIDGE: f64 = 1e-10;

/// Paths required per basis function.
const PATHS_PER_BASIS: usize = 50;

/// Solution of one backward equation on a path bundle.
///
/// Layout: `y[j][i]` is the value process at grid point `j` on path `i`
/// and `z[j][i]` the integrand on step `j`. `y_t` is the cross-path average
/// at the initial time; `y_t_dispersion` is the cross-path standard
/// deviation there, a convergence diagnostic which should be tiny in
/// Markovian problems.
#[derive(Debug, Clone)]
pub struct BsdeSolution {
    pub y: Vec<Vec<f64>>,
    pub z: Vec<Vec<f64>>,
    pub y_t: f64,
    pub y_t_dispersion: f64,
}

impl BsdeSolution {
    pub fn y_at(&self, path: usize, grid_point: usize) -> f64 {
        self.y[grid_point][path]
    }

    pub fn z_at(&self, path: usize, step: usize) -> f64 {
        self.z[step][path]
    }
}

/// Per-step regression context: standardized polynomial features of the
/// index level with a cached Cholesky factor of the ridge normal equations.
struct Regression {
    /// Column-major standardized features, `cols[m][i]`.
    cols: Vec<Vec<f64>>,
    chol: Cholesky<f64, nalgebra::Dyn>,
}

impl Regression {
    fn build(levels: &[f64], degree: usize) -> Result<Self, BsdeError> {
        let n = levels.len();
        let k = degree + 1;
        let mut cols = Vec::with_capacity(k);
        cols.push(vec![1.0; n]);
        let mut power = vec![1.0; n];
        for _ in 1..k {
            for (p, &r) in power.iter_mut().zip(levels) {
                *p *= r;
            }
            let mean = power.iter().sum::<f64>() / n as f64;
            let var = power.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
            let std = var.sqrt();
            let col = if std < 1e-12 * (1.0 + mean.abs()) {
                // Degenerate column (e.g. the index is constant at t0):
                // drop it and let the intercept carry the fit.
                vec![0.0; n]
            } else {
                power.iter().map(|v| (v - mean) / std).collect()
            };
            cols.push(col);
        }

        let mut xtx = DMatrix::zeros(k, k);
        for a in 0..k {
            for b in a..k {
                let dot: f64 = cols[a].iter().zip(&cols[b]).map(|(u, v)| u * v).sum();
                xtx[(a, b)] = dot;
                xtx[(b, a)] = dot;
            }
        }
        for a in 0..k {
            xtx[(a, a)] += RIDGE * n as f64;
        }
        let chol = xtx.cholesky().ok_or(BsdeError::Basis { degree })?;
        Ok(Self { cols, chol })
    }

    /// Fitted conditional expectation of `target` given the features.
    fn fit(&self, target: &[f64]) -> Vec<f64> {
        let k = self.cols.len();
        let n = target.len();
        let mut xty = DVector::zeros(k);
        for a in 0..k {
            xty[a] = self.cols[a].iter().zip(target).map(|(u, v)| u * v).sum();
        }
        let coef = self.chol.solve(&xty);
        let mut fitted = vec![0.0; n];
        for a in 0..k {
            let c = coef[a];
            if c != 0.0 {
                for (f, &v) in fitted.iter_mut().zip(&self.cols[a]) {
                    *f += c * v;
                }
            }
        }
        fitted
    }
}

/// Backward Euler + least-squares regression solve of
/// `Y_j = E[Y_{j+1} | R_j] + driver(j, i, Z_j) ds_j` with terminal values
/// `terminal` and `Z` from the increment projection (computed on the
/// centered target `(Y_{j+1} - E[Y_{j+1}|R_j]) dW_j / ds_j`, which is the
/// same projection with less variance).
pub fn solve<F>(
    bundle: &PathBundle,
    terminal: &[f64],
    driver: F,
    basis_degree: usize,
) -> Result<BsdeSolution, BsdeError>
where
    F: Fn(usize, usize, f64) -> f64,
{
    let n = bundle.n_paths;
    if terminal.len() != n {
        return Err(BsdeError::ShapeMismatch {
            expected: n,
            found: terminal.len(),
        });
    }
    let needed = PATHS_PER_BASIS * (basis_degree + 1);
    if n < needed {
        return Err(BsdeError::InsufficientPaths {
            degree: basis_degree,
            needed,
            got: n,
        });
    }

    let nsteps = bundle.n_steps;
    let mut y = vec![Vec::new(); nsteps + 1];
    let mut z = vec![Vec::new(); nsteps];
    y[nsteps] = terminal.to_vec();

    for j in (0..nsteps).rev() {
        let dt = bundle.dt(j);
        let levels: Vec<f64> = (0..n).map(|i| bundle.index[i][j]).collect();
        let regression = Regression::build(&levels, basis_degree)?;

        let cond_exp = regression.fit(&y[j + 1]);

        let centered: Vec<f64> = (0..n)
            .map(|i| (y[j + 1][i] - cond_exp[i]) * bundle.increments[i][j] / dt)
            .collect();
        let z_fit = regression.fit(&centered);

        let mut y_cur = Vec::with_capacity(n);
        for i in 0..n {
            let f = driver(j, i, z_fit[i]);
            if !f.is_finite() {
                return Err(BsdeError::DriverNonFinite { step: j, path: i });
            }
            y_cur.push(cond_exp[i] + f * dt);
        }
        y[j] = y_cur;
        z[j] = z_fit;
    }

    let y0 = &y[0];
    let y_t = y0.iter().sum::<f64>() / n as f64;
    let var = y0.iter().map(|v| (v - y_t) * (v - y_t)).sum::<f64>() / n as f64;
    let y_t_dispersion = var.sqrt();
    if y_t_dispersion > 1e-2 * (1.0 + y_t.abs()) {
        log::warn!(
            "BSDE initial value dispersion {y_t_dispersion:.3e} is large; \
             the regression basis may be too coarse"
        );
    }

    Ok(BsdeSolution {
        y,
        z,
        y_t,
        y_t_dispersion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use riskmin_market::{simulate_index, MarketModel};

    #[test]
    fn constant_terminal_zero_driver() {
        let m = MarketModel::gaussian(0.0, 1.0, 0.06, 0.2);
        let b = simulate_index(&m, 0.0, 1.0, 1.0, 20, 400, 3).unwrap();
        let xi = vec![-2.0; b.n_paths];
        let sol = solve(&b, &xi, |_, _, _| 0.0, 2).unwrap();
        // Exact up to the ridge shrinkage of the intercept.
        assert!((sol.y_t + 2.0).abs() < 1e-8);
        assert!(sol.y_t_dispersion < 1e-8);
        for j in 0..b.n_steps {
            for i in 0..b.n_paths {
                assert!(sol.z_at(i, j).abs() < 1e-9);
            }
        }
        // Terminal consistency is exact.
        assert_eq!(sol.y[b.n_steps], xi);
    }

    #[test]
    fn shape_and_path_count_checks() {
        let m = MarketModel::gaussian(0.0, 1.0, 0.06, 0.2);
        let b = simulate_index(&m, 0.0, 1.0, 1.0, 4, 400, 3).unwrap();
        assert!(matches!(
            solve(&b, &[0.0; 3], |_, _, _| 0.0, 2),
            Err(BsdeError::ShapeMismatch { .. })
        ));
        assert!(matches!(
            solve(&b, &vec![0.0; 400], |_, _, _| 0.0, 9),
            Err(BsdeError::InsufficientPaths { .. })
        ));
    }

    #[test]
    fn non_finite_driver_is_located() {
        let m = MarketModel::gaussian(0.0, 1.0, 0.06, 0.2);
        let b = simulate_index(&m, 0.0, 1.0, 1.0, 8, 400, 3).unwrap();
        let xi = vec![1.0; b.n_paths];
        let err = solve(&b, &xi, |j, _, _| if j == 5 { f64::NAN } else { 0.0 }, 2).unwrap_err();
        assert!(matches!(err, BsdeError::DriverNonFinite { step: 5, .. }));
    }
}
