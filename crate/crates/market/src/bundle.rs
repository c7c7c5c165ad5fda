use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::MarketError;
use crate::model::MarketModel;

/// A seeded set of discretized index paths with their Brownian increments.
///
/// The increments are stored (never regenerated) so every downstream
/// estimator runs on common random numbers. A bundle is immutable after
/// construction and identical inputs produce bit-identical bundles.
#[derive(Debug, Clone)]
pub struct PathBundle {
    pub t0: f64,
    pub horizon: f64,
    pub r0: f64,
    pub n_steps: usize,
    pub n_paths: usize,
    pub seed: u64,
    /// Grid times `t0 = s_0 < ... < s_N = horizon`, length `n_steps + 1`.
    pub grid: Vec<f64>,
    /// Brownian increments per path, `increments[i][j] = W(s_{j+1}) - W(s_j)`.
    pub increments: Vec<Vec<f64>>,
    /// Index values per path, `index[i][j] = R(s_j)`, length `n_steps + 1`.
    pub index: Vec<Vec<f64>>,
}

impl PathBundle {
    pub fn dt(&self, step: usize) -> f64 {
        self.grid[step + 1] - self.grid[step]
    }

    pub fn terminal_index(&self) -> Vec<f64> {
        self.index.iter().map(|p| p[self.n_steps]).collect()
    }
}

fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic per-path RNG stream derived from the master seed.
pub(crate) fn path_rng(seed: u64, path: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix64(seed ^ mix64(path as u64 ^ 0x51CC_1B72_7220_A95F)))
}

/// Forward Euler discretization of the index SDE on a uniform grid.
pub fn simulate_index(
    model: &MarketModel,
    t0: f64,
    r0: f64,
    horizon: f64,
    n_steps: usize,
    n_paths: usize,
    seed: u64,
) -> Result<PathBundle, MarketError> {
    if !(horizon > t0) {
        return Err(MarketError::InvalidGrid(format!(
            "horizon {horizon} must exceed start time {t0}"
        )));
    }
    if n_steps == 0 || n_paths == 0 {
        return Err(MarketError::InvalidGrid(
            "n_steps and n_paths must be at least 1".into(),
        ));
    }

    let dt = (horizon - t0) / n_steps as f64;
    let grid: Vec<f64> = (0..=n_steps)
        .map(|j| {
            if j == n_steps {
                horizon
            } else {
                t0 + dt * j as f64
            }
        })
        .collect();
    let sqrt_dt = dt.sqrt();

    let paths: Result<Vec<(Vec<f64>, Vec<f64>)>, MarketError> = (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(seed, i);
            let mut dw = Vec::with_capacity(n_steps);
            let mut r_path = Vec::with_capacity(n_steps + 1);
            let mut r = r0;
            r_path.push(r);
            for j in 0..n_steps {
                let s = grid[j];
                let drift = model.index_drift(s, r);
                let vol = model.index_vol(s, r);
                if !drift.is_finite() {
                    return Err(MarketError::NonFiniteCoefficient {
                        name: "index_drift",
                        s,
                        r,
                    });
                }
                if !vol.is_finite() {
                    return Err(MarketError::NonFiniteCoefficient {
                        name: "index_vol",
                        s,
                        r,
                    });
                }
                let z: f64 = StandardNormal.sample(&mut rng);
                let inc = sqrt_dt * z;
                r = r + drift * dt + vol * inc;
                dw.push(inc);
                r_path.push(r);
            }
            Ok((dw, r_path))
        })
        .collect();

    let paths = paths?;
    let mut increments = Vec::with_capacity(n_paths);
    let mut index = Vec::with_capacity(n_paths);
    for (dw, r_path) in paths {
        increments.push(dw);
        index.push(r_path);
    }

    Ok(PathBundle {
        t0,
        horizon,
        r0,
        n_steps,
        n_paths,
        seed,
        grid,
        increments,
        index,
    })
}
