use std::sync::Arc;

use rayon::prelude::*;

use crate::bundle::PathBundle;
use crate::error::MarketError;
use crate::model::MarketModel;

#[derive(Clone)]
enum StrategyRule {
    Constant(f64),
    /// Markov feedback rule `(s, r, x) -> p`, adapted by construction.
    Feedback(Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>),
    /// Precomputed values per `[path][step]`, e.g. from a regression solver.
    Table(Arc<Vec<Vec<f64>>>),
}

/// The reduced integrand `p(s, R_s, x) = pi * beta` together with the
/// initial wealth it is run from. An affine post-transform supports the
/// perturbation probes (`scaled`, `shifted`) without re-deriving the rule.
#[derive(Clone)]
pub struct StrategyProcess {
    initial_wealth: f64,
    rule: StrategyRule,
    scale: f64,
    shift: f64,
}

impl StrategyProcess {
    pub fn constant(initial_wealth: f64, level: f64) -> Self {
        Self {
            initial_wealth,
            rule: StrategyRule::Constant(level),
            scale: 1.0,
            shift: 0.0,
        }
    }

    pub fn feedback(
        initial_wealth: f64,
        rule: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            initial_wealth,
            rule: StrategyRule::Feedback(Arc::new(rule)),
            scale: 1.0,
            shift: 0.0,
        }
    }

    pub fn table(initial_wealth: f64, values: Vec<Vec<f64>>) -> Self {
        Self {
            initial_wealth,
            rule: StrategyRule::Table(Arc::new(values)),
            scale: 1.0,
            shift: 0.0,
        }
    }

    pub fn initial_wealth(&self) -> f64 {
        self.initial_wealth
    }

    /// Pointwise scaling `p -> factor * p`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.scale *= factor;
        out.shift *= factor;
        out
    }

    /// Pointwise shift `p -> p + delta`.
    pub fn shifted(&self, delta: f64) -> Self {
        let mut out = self.clone();
        out.shift += delta;
        out
    }

    /// Value of `p` at grid point `step` on path `path`.
    pub fn value(&self, bundle: &PathBundle, step: usize, path: usize) -> Result<f64, MarketError> {
        let raw = match &self.rule {
            StrategyRule::Constant(c) => *c,
            StrategyRule::Feedback(f) => f(
                bundle.grid[step],
                bundle.index[path][step],
                self.initial_wealth,
            ),
            StrategyRule::Table(t) => *t
                .get(path)
                .and_then(|row| row.get(step))
                .ok_or_else(|| {
                    MarketError::StrategyShape(format!(
                        "table has no entry for path {path}, step {step}"
                    ))
                })?,
        };
        Ok(raw * self.scale + self.shift)
    }
}

/// Terminal wealth `X^p(T)` per path:
/// `x + sum_j theta(s_j, R_j) p_j ds_j + sum_j p_j dW_j`.
pub fn terminal_wealth(
    bundle: &PathBundle,
    strategy: &StrategyProcess,
    model: &MarketModel,
) -> Result<Vec<f64>, MarketError> {
    (0..bundle.n_paths)
        .into_par_iter()
        .map(|i| {
            // The excess over the initial wealth is accumulated on its own so
            // that it is exactly linear in the strategy values.
            let mut excess = 0.0;
            for j in 0..bundle.n_steps {
                let s = bundle.grid[j];
                let r = bundle.index[i][j];
                let theta = model.market_price_of_risk(s, r)?;
                let p = strategy.value(bundle, j, i)?;
                excess += p * theta * bundle.dt(j) + p * bundle.increments[i][j];
            }
            Ok(strategy.initial_wealth() + excess)
        })
        .collect()
}

/// Full wealth curve per path (grid-point aligned, `X(t0) = x`).
pub fn wealth_process(
    bundle: &PathBundle,
    strategy: &StrategyProcess,
    model: &MarketModel,
) -> Result<Vec<Vec<f64>>, MarketError> {
    (0..bundle.n_paths)
        .into_par_iter()
        .map(|i| {
            let x0 = strategy.initial_wealth();
            let mut excess = 0.0;
            let mut curve = Vec::with_capacity(bundle.n_steps + 1);
            curve.push(x0);
            for j in 0..bundle.n_steps {
                let s = bundle.grid[j];
                let r = bundle.index[i][j];
                let theta = model.market_price_of_risk(s, r)?;
                let p = strategy.value(bundle, j, i)?;
                excess += p * theta * bundle.dt(j) + p * bundle.increments[i][j];
                curve.push(x0 + excess);
            }
            Ok(curve)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::simulate_index;

    fn setup() -> (MarketModel, PathBundle) {
        let m = MarketModel::gaussian(0.0, 1.0, 0.06, 0.2);
        let b = simulate_index(&m, 0.0, 1.0, 1.0, 64, 128, 11).unwrap();
        (m, b)
    }

    #[test]
    fn zero_strategy_keeps_wealth() {
        let (m, b) = setup();
        let x = terminal_wealth(&b, &StrategyProcess::constant(2.5, 0.0), &m).unwrap();
        assert!(x.iter().all(|&v| v == 2.5));
    }

    #[test]
    fn doubling_p_doubles_excess_wealth_exactly() {
        let (m, b) = setup();
        // x = 0 so the excess is the wealth itself and doubling is bitwise.
        let base = StrategyProcess::feedback(0.0, |s, r, _| 0.3 + 0.1 * s + 0.05 * r);
        let x1 = terminal_wealth(&b, &base, &m).unwrap();
        let x2 = terminal_wealth(&b, &base.scaled(2.0), &m).unwrap();
        for (a, b) in x1.iter().zip(&x2) {
            assert_eq!(2.0 * a, *b);
        }

        let shifted = StrategyProcess::feedback(1.0, |s, r, _| 0.3 + 0.1 * s + 0.05 * r);
        let y1 = terminal_wealth(&b, &shifted, &m).unwrap();
        let y2 = terminal_wealth(&b, &shifted.scaled(2.0), &m).unwrap();
        for (a, b) in y1.iter().zip(&y2) {
            assert!((2.0 * (a - 1.0) - (b - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn wealth_is_additive_in_the_strategy() {
        let (m, b) = setup();
        let p1 = StrategyProcess::constant(1.0, 0.4);
        let p2 = StrategyProcess::feedback(1.0, |_, r, _| 0.1 * r);
        let sum = StrategyProcess::feedback(1.0, |_, r, _| 0.4 + 0.1 * r);
        let x1 = terminal_wealth(&b, &p1, &m).unwrap();
        let x2 = terminal_wealth(&b, &p2, &m).unwrap();
        let xs = terminal_wealth(&b, &sum, &m).unwrap();
        for i in 0..b.n_paths {
            let lhs = xs[i] - 1.0;
            let rhs = (x1[i] - 1.0) + (x2[i] - 1.0);
            assert!((lhs - rhs).abs() < 1e-12, "path {i}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn wealth_process_is_adapted() {
        let (m, b) = setup();
        let strat = StrategyProcess::feedback(1.0, |_, r, _| 0.2 * r);
        let base = wealth_process(&b, &strat, &m).unwrap();

        // Perturbing increments after step j must not change X(s_k) for k <= j.
        let cut = 20;
        let mut tampered = b.clone();
        for i in 0..tampered.n_paths {
            for j in cut..tampered.n_steps {
                tampered.increments[i][j] = -tampered.increments[i][j];
                tampered.index[i][j + 1] = tampered.index[i][j] + 1.0;
            }
        }
        let moved = wealth_process(&tampered, &strat, &m).unwrap();
        for i in 0..b.n_paths {
            for k in 0..=cut {
                assert_eq!(base[i][k], moved[i][k]);
            }
        }
    }

    #[test]
    fn table_shape_mismatch_is_reported() {
        let (m, b) = setup();
        let strat = StrategyProcess::table(1.0, vec![vec![0.0; 4]; 2]);
        assert!(matches!(
            terminal_wealth(&b, &strat, &m),
            Err(MarketError::StrategyShape(_))
        ));
    }
}
