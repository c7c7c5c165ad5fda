use std::fmt;
use std::sync::Arc;

use riskmin_market::MarketModel;
use serde::{Deserialize, Serialize};

use crate::error::GeneratorError;

/// Risk-aversion parameter as a function of `(time, index level, wealth)`.
pub type AversionFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// Constant risk aversion.
pub fn constant_aversion(value: f64) -> AversionFn {
    Arc::new(move |_, _, _| value)
}

/// The default test shape `base / (1 + max(x, 0) * decay)`: positive and
/// non-increasing in wealth for `base > 0`, `decay >= 0`.
pub fn wealth_decay_aversion(base: f64, decay: f64) -> AversionFn {
    Arc::new(move |_, _, x| base / (1.0 + x.max(0.0) * decay))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorFamily {
    Case1Sqrt,
    Case2Logistic,
    Case3Huber,
    Avar,
    EntropicQuadratic,
}

impl GeneratorFamily {
    pub fn name(&self) -> &'static str {
        match self {
            GeneratorFamily::Case1Sqrt => "case1_sqrt",
            GeneratorFamily::Case2Logistic => "case2_logistic",
            GeneratorFamily::Case3Huber => "case3_huber",
            GeneratorFamily::Avar => "avar",
            GeneratorFamily::EntropicQuadratic => "entropic_quadratic",
        }
    }
}

impl fmt::Display for GeneratorFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A generator family together with its risk-aversion parameter function.
#[derive(Clone)]
pub struct GeneratorSpec {
    family: GeneratorFamily,
    aversion: AversionFn,
}

impl fmt::Debug for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneratorSpec")
            .field("family", &self.family)
            .finish()
    }
}

/// Numerically stable `ln(1 + e^{-z})`.
fn ln_one_plus_exp_neg(z: f64) -> f64 {
    if z >= 0.0 {
        (-z).exp().ln_1p()
    } else {
        -z + z.exp().ln_1p()
    }
}

impl GeneratorSpec {
    pub fn case1(aversion: AversionFn) -> Self {
        Self {
            family: GeneratorFamily::Case1Sqrt,
            aversion,
        }
    }

    pub fn case2(aversion: AversionFn) -> Self {
        Self {
            family: GeneratorFamily::Case2Logistic,
            aversion,
        }
    }

    pub fn case3(aversion: AversionFn) -> Self {
        Self {
            family: GeneratorFamily::Case3Huber,
            aversion,
        }
    }

    pub fn entropic(aversion: AversionFn) -> Self {
        Self {
            family: GeneratorFamily::EntropicQuadratic,
            aversion,
        }
    }

    /// AVaR generator at a fixed level in `(0, 1]`.
    pub fn avar(level: f64) -> Result<Self, GeneratorError> {
        if !(level > 0.0 && level <= 1.0) {
            return Err(GeneratorError::InvalidAvarLevel(level));
        }
        Ok(Self {
            family: GeneratorFamily::Avar,
            aversion: constant_aversion(level),
        })
    }

    pub fn family(&self) -> GeneratorFamily {
        self.family
    }

    /// Risk-aversion parameter (the AVaR level for the `avar` family),
    /// positivity enforced at evaluation time.
    pub fn aversion(&self, s: f64, r: f64, x: f64) -> Result<f64, GeneratorError> {
        let value = (self.aversion)(s, r, x);
        if value > 0.0 && value.is_finite() {
            Ok(value)
        } else {
            Err(GeneratorError::NonPositiveAversion { s, r, x, value })
        }
    }

    /// Lipschitz constant of `z -> g(s, x, z)`, `None` for the entropic
    /// (quadratic) family which is flagged non-Lipschitz.
    pub fn lipschitz_bound(&self, s: f64, r: f64, x: f64) -> Result<Option<f64>, GeneratorError> {
        let a = self.aversion(s, r, x)?;
        Ok(match self.family {
            GeneratorFamily::Case1Sqrt | GeneratorFamily::Case2Logistic => Some(a),
            GeneratorFamily::Case3Huber => Some(1.0),
            GeneratorFamily::Avar => Some(if a < 0.5 { 1.0 } else { (1.0 - a) / a }),
            GeneratorFamily::EntropicQuadratic => None,
        })
    }

    /// Evaluate `g(s, x, z)` (the index level enters through the
    /// risk-aversion parameter).
    pub fn evaluate(&self, s: f64, r: f64, x: f64, z: f64) -> Result<f64, GeneratorError> {
        let a = self.aversion(s, r, x)?;
        Ok(match self.family {
            GeneratorFamily::Case1Sqrt => a * ((1.0 + z * z).sqrt() - 1.0),
            GeneratorFamily::Case2Logistic => {
                a * (ln_one_plus_exp_neg(z) - std::f64::consts::LN_2)
            }
            GeneratorFamily::Case3Huber => {
                let threshold = 1.0 / a;
                if z.abs() >= threshold {
                    z.abs() - 0.5 * threshold
                } else {
                    0.5 * a * z * z
                }
            }
            GeneratorFamily::Avar => {
                if a < 0.5 {
                    z.abs()
                } else {
                    (1.0 - a) / a * z.abs()
                }
            }
            GeneratorFamily::EntropicQuadratic => 0.5 * a * z * z,
        })
    }
}

/// Effective generator `g(s, x, z - p) - p * theta(s, r)`.
pub fn effective_generator(
    spec: &GeneratorSpec,
    model: &MarketModel,
    s: f64,
    r: f64,
    x: f64,
    z: f64,
    p: f64,
) -> Result<f64, GeneratorError> {
    let theta = model.market_price_of_risk(s, r)?;
    Ok(spec.evaluate(s, r, x, z - p)? - p * theta)
}

/// Reference Huber function with unit threshold.
fn unit_huber(v: f64) -> f64 {
    if v.abs() <= 1.0 {
        0.5 * v * v
    } else {
        v.abs() - 0.5
    }
}

/// Checks `gamma(x) * g(x, z) = Huber(gamma(x) * z)` on every sample
/// `(s, r, x, z)`, to an absolute 1e-12. Mismatches are reported as errors.
pub fn huber_identity_check(
    spec: &GeneratorSpec,
    samples: &[(f64, f64, f64, f64)],
) -> Result<bool, GeneratorError> {
    if spec.family() != GeneratorFamily::Case3Huber {
        return Err(GeneratorError::WrongFamily {
            expected: "case3_huber",
            found: spec.family().name().to_string(),
        });
    }
    for &(s, r, x, z) in samples {
        let gamma = spec.aversion(s, r, x)?;
        let product = gamma * spec.evaluate(s, r, x, z)?;
        let huber = unit_huber(gamma * z);
        if (product - huber).abs() > 1e-12 {
            return Err(GeneratorError::IdentityViolation {
                s,
                r,
                x,
                z,
                product,
                huber,
            });
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec3(gamma: f64) -> GeneratorSpec {
        GeneratorSpec::case3(constant_aversion(gamma))
    }

    #[test]
    fn huber_branches() {
        // Quadratic branch: |z| < 1/gamma.
        let g = spec3(2.0).evaluate(0.0, 0.0, 0.0, 0.25).unwrap();
        assert!((g - 0.0625).abs() < 1e-15);
        // Linear branch: |z| >= 1/gamma.
        let g = spec3(2.0).evaluate(0.0, 0.0, 0.0, 1.0).unwrap();
        assert!((g - 0.75).abs() < 1e-15);
    }

    #[test]
    fn all_families_vanish_at_zero() {
        let specs = [
            GeneratorSpec::case1(constant_aversion(0.5)),
            GeneratorSpec::case2(constant_aversion(0.6)),
            spec3(2.0),
            GeneratorSpec::avar(0.3).unwrap(),
            GeneratorSpec::entropic(constant_aversion(1.5)),
        ];
        for spec in &specs {
            assert_eq!(spec.evaluate(0.1, 1.0, 2.0, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn effective_generator_reductions() {
        let model = MarketModel::gaussian(0.0, 1.0, 0.06, 0.2); // theta = 0.3
        let spec = GeneratorSpec::case1(constant_aversion(0.5));

        // p = 0 reduces to g.
        let lhs = effective_generator(&spec, &model, 0.0, 1.0, 0.0, 0.7, 0.0).unwrap();
        assert_eq!(lhs, spec.evaluate(0.0, 1.0, 0.0, 0.7).unwrap());

        // theta = 0 drops the drift term.
        let flat = MarketModel::gaussian(0.0, 1.0, 0.0, 0.2);
        let lhs = effective_generator(&spec, &flat, 0.0, 1.0, 0.0, 0.75, 0.5).unwrap();
        assert_eq!(lhs, spec.evaluate(0.0, 1.0, 0.0, 0.25).unwrap());

        // Worked value: k = 0.5, theta = 0.3, z = 0, p = 0.75.
        let v = effective_generator(&spec, &model, 0.0, 1.0, 0.0, 0.0, 0.75).unwrap();
        assert!((v + 0.1).abs() < 1e-12, "got {v}");
    }

    #[test]
    fn huber_identity_holds_on_samples() {
        let spec = GeneratorSpec::case3(wealth_decay_aversion(2.0, 0.5));
        let mut samples = Vec::new();
        for &x in &[0.0, 0.5, 2.0] {
            for i in 0..41 {
                let z = -2.0 + 0.1 * i as f64;
                samples.push((0.0, 1.0, x, z));
            }
        }
        assert!(huber_identity_check(&spec, &samples).unwrap());

        // gamma = 1, z = 2: product = 1.5 = |2| - 1/2.
        let one = spec3(1.0);
        assert!(huber_identity_check(&one, &[(0.0, 0.0, 0.0, 2.0)]).unwrap());
        // Kink: both branches give 1/2.
        let four = spec3(4.0);
        assert!(huber_identity_check(&four, &[(0.0, 0.0, 0.0, 0.25)]).unwrap());
        let g = four.evaluate(0.0, 0.0, 0.0, 0.25).unwrap();
        assert!((4.0 * g - 0.5).abs() < 1e-15);
    }

    #[test]
    fn huber_identity_rejects_other_families() {
        let spec = GeneratorSpec::case1(constant_aversion(1.0));
        assert!(matches!(
            huber_identity_check(&spec, &[]),
            Err(GeneratorError::WrongFamily { .. })
        ));
    }

    #[test]
    fn case2_is_stable_for_large_arguments() {
        let spec = GeneratorSpec::case2(constant_aversion(0.6));
        // For z -> +inf, g -> -l ln 2; for z -> -inf, g ~ -l z - l ln 2.
        let hi = spec.evaluate(0.0, 0.0, 0.0, 800.0).unwrap();
        assert!((hi + 0.6 * std::f64::consts::LN_2).abs() < 1e-12);
        let lo = spec.evaluate(0.0, 0.0, 0.0, -800.0).unwrap();
        assert!((lo - (0.6 * 800.0 - 0.6 * std::f64::consts::LN_2)).abs() < 1e-9);
        assert!(hi.is_finite() && lo.is_finite());
    }

    #[test]
    fn aversion_must_be_positive() {
        let spec = GeneratorSpec::case1(Arc::new(|_, _, x| 1.0 - x));
        assert!(spec.evaluate(0.0, 0.0, 0.5, 1.0).is_ok());
        assert!(matches!(
            spec.evaluate(0.0, 0.0, 2.0, 1.0),
            Err(GeneratorError::NonPositiveAversion { .. })
        ));
    }

    #[test]
    fn avar_level_is_validated() {
        assert!(GeneratorSpec::avar(0.0).is_err());
        assert!(GeneratorSpec::avar(1.5).is_err());
        assert!(GeneratorSpec::avar(0.95).is_ok());
    }

    #[test]
    fn lipschitz_metadata() {
        let s = 0.0;
        assert_eq!(
            GeneratorSpec::case1(constant_aversion(0.5))
                .lipschitz_bound(s, 0.0, 0.0)
                .unwrap(),
            Some(0.5)
        );
        assert_eq!(
            spec3(2.0).lipschitz_bound(s, 0.0, 0.0).unwrap(),
            Some(1.0)
        );
        // Below level 1/2 the generator is |z|; above it the slope flattens.
        assert_eq!(
            GeneratorSpec::avar(0.3)
                .unwrap()
                .lipschitz_bound(s, 0.0, 0.0)
                .unwrap(),
            Some(1.0)
        );
        let upper = GeneratorSpec::avar(0.8)
            .unwrap()
            .lipschitz_bound(s, 0.0, 0.0)
            .unwrap()
            .unwrap();
        assert!((upper - 0.25).abs() < 1e-15);
        assert_eq!(
            GeneratorSpec::entropic(constant_aversion(1.0))
                .lipschitz_bound(s, 0.0, 0.0)
                .unwrap(),
            None
        );
    }
}
