use riskmin_generators::{GeneratorFamily, GeneratorSpec};

use crate::error::ConvexError;
use crate::search;

/// Value of the polar function `G(s, x, mu)` at one point.
///
/// `finite = false` is a meaningful regime (the supremum is `+inf`), not an
/// error. `boundary` marks `|mu|` sitting exactly on the Lipschitz bound,
/// where the supremum is finite but may not be attained; `optimizer` is the
/// attaining point when one exists.
#[derive(Debug, Clone, Copy)]
pub struct PolarResult {
    pub finite: bool,
    pub boundary: bool,
    pub value: f64,
    pub optimizer: Option<f64>,
}

impl PolarResult {
    fn interior(value: f64, optimizer: f64) -> Self {
        Self {
            finite: true,
            boundary: false,
            value,
            optimizer: Some(optimizer),
        }
    }

    fn at_boundary(value: f64, optimizer: Option<f64>) -> Self {
        Self {
            finite: true,
            boundary: true,
            value,
            optimizer,
        }
    }

    fn infinite() -> Self {
        Self {
            finite: false,
            boundary: false,
            value: f64::INFINITY,
            optimizer: None,
        }
    }
}

fn xlogx(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        t * t.ln()
    }
}

/// Analytic polar function of the generator family at `mu`.
///
/// Branches:
/// * `case1_sqrt`: `k - sqrt(k^2 - mu^2)` for `|mu| < k`, finite value `k`
///   on the boundary (supremum not attained), `+inf` outside.
/// * `case2_logistic`: finite for `0 <= mu <= l` with interior optimizer
///   `ln((l - mu)/mu)`; both endpoints give `l ln 2` without an attaining
///   point.
/// * `case3_huber`: `mu^2 / (2 gamma)` for `|mu| <= 1` (attained at the
///   kink for `|mu| = 1`), `+inf` outside.
/// * `avar`: `0` on `[-L, 0]` with optimizer `0`, `+inf` elsewhere, where
///   `L` is the level-dependent Lipschitz bound.
/// * `entropic_quadratic`: `mu^2 / (2 gamma)` everywhere.
pub fn polar(
    spec: &GeneratorSpec,
    s: f64,
    r: f64,
    x: f64,
    mu: f64,
) -> Result<PolarResult, ConvexError> {
    let a = spec.aversion(s, r, x)?;
    Ok(match spec.family() {
        GeneratorFamily::Case1Sqrt => {
            let k = a;
            if mu.abs() < k {
                let root = ((k - mu) * (k + mu)).sqrt();
                PolarResult::interior(k - root, -mu / root)
            } else if mu.abs() == k {
                PolarResult::at_boundary(k, None)
            } else {
                PolarResult::infinite()
            }
        }
        GeneratorFamily::Case2Logistic => {
            let l = a;
            if mu > 0.0 && mu < l {
                let value = xlogx(l - mu) + xlogx(mu) - xlogx(l) + l * std::f64::consts::LN_2;
                PolarResult::interior(value, ((l - mu) / mu).ln())
            } else if mu == 0.0 || mu == l {
                PolarResult::at_boundary(l * std::f64::consts::LN_2, None)
            } else {
                PolarResult::infinite()
            }
        }
        GeneratorFamily::Case3Huber => {
            let gamma = a;
            if mu.abs() < 1.0 {
                PolarResult::interior(mu * mu / (2.0 * gamma), -mu / gamma)
            } else if mu.abs() == 1.0 {
                // Supremum attained on a whole ray; report the kink point.
                PolarResult::at_boundary(1.0 / (2.0 * gamma), Some(-mu / gamma))
            } else {
                PolarResult::infinite()
            }
        }
        GeneratorFamily::Avar => {
            let bound = spec
                .lipschitz_bound(s, r, x)?
                .expect("avar has a Lipschitz bound");
            if (-bound..=0.0).contains(&mu) {
                if mu == -bound {
                    PolarResult::at_boundary(0.0, Some(0.0))
                } else {
                    PolarResult::interior(0.0, 0.0)
                }
            } else {
                PolarResult::infinite()
            }
        }
        GeneratorFamily::EntropicQuadratic => {
            let gamma = a;
            PolarResult::interior(mu * mu / (2.0 * gamma), -mu / gamma)
        }
    })
}

/// Numeric polar: golden-section maximization of `r -> -mu r - g(s, x, r)`
/// over an adaptive bracket. Used to cross-validate the analytic branches.
///
/// The initial half-width is `10 * (1 + |mu| / gap)` where `gap` is the
/// distance of `|mu|` to the Lipschitz bound; monotone growth across the
/// expansion limit is reported as an infinite polar, numerically stalled
/// growth as a boundary value.
pub fn numeric_polar(
    spec: &GeneratorSpec,
    s: f64,
    r: f64,
    x: f64,
    mu: f64,
) -> Result<PolarResult, ConvexError> {
    let objective = |t: f64| -> f64 { -(-mu * t - spec.evaluate(s, r, x, t).unwrap_or(f64::NAN)) };
    let half_width = match spec.lipschitz_bound(s, r, x)? {
        Some(bound) => {
            let gap = bound - mu.abs();
            if gap > 0.0 {
                10.0 * (1.0 + mu.abs() / gap)
            } else {
                10.0 * (1.0 + mu.abs())
            }
        }
        None => 10.0 * (1.0 + mu.abs()),
    };

    match search::bracket_min(objective, 0.0, half_width, 1e12, 1e-11) {
        Err(_) => Ok(PolarResult::infinite()),
        Ok((lo, hi)) => {
            let res = search::golden_min_polished(objective, lo, hi, 1e-9 * (1.0 + hi - lo));
            let stalled = (hi - lo) > 1e9;
            Ok(PolarResult {
                finite: true,
                boundary: stalled,
                value: -res.value,
                optimizer: if stalled { None } else { Some(res.x) },
            })
        }
    }
}

/// Fenchel-Young equality test: `r_hat` is optimal for
/// `inf_r (g(s, x, r) + mu r) = -G(s, x, mu)` iff
/// `g(r_hat) + mu * r_hat <= -G + tol` (the reverse inequality always
/// holds).
pub fn subdifferential_test(
    spec: &GeneratorSpec,
    s: f64,
    r: f64,
    x: f64,
    mu: f64,
    r_hat: f64,
    tol: f64,
) -> Result<bool, ConvexError> {
    let pol = polar(spec, s, r, x, mu)?;
    if !pol.finite {
        return Err(ConvexError::InfinitePolar { mu });
    }
    let lhs = spec.evaluate(s, r, x, r_hat)? + mu * r_hat;
    Ok(lhs <= -pol.value + tol)
}

/// Recover the optimal wealth integrand from a polar optimizer: `p = z - r`.
pub fn optimal_p_from_polar(z: f64, r_bar: f64) -> f64 {
    z - r_bar
}
