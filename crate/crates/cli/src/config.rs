//! Scenario configuration: a single TOML file with sections for the
//! market model, generator, problem window, Monte Carlo grid, payoff,
//! constraint set, tolerances and output. Unknown keys are rejected and
//! every run echoes its fully resolved configuration into the reports.

use riskmin_convex::ConstraintSet;
use riskmin_generators::{wealth_decay_aversion, GeneratorFamily, GeneratorSpec};
use riskmin_market::MarketModel;
use riskmin_pricing::Derivative;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    /// Constant-coefficient Gaussian index.
    Gaussian {
        index_drift: f64,
        index_vol: f64,
        asset_drift: f64,
        asset_vol: f64,
    },
    /// Mean-reverting index `dR = reversion (mean_level - R) ds + vol dW`.
    OrnsteinUhlenbeck {
        reversion: f64,
        mean_level: f64,
        index_vol: f64,
        asset_drift: f64,
        asset_vol: f64,
    },
    /// Geometric index `dR = growth R ds + vol R dW`.
    Geometric {
        growth: f64,
        index_vol: f64,
        asset_drift: f64,
        asset_vol: f64,
    },
}

impl ModelConfig {
    pub fn build(&self) -> MarketModel {
        match *self {
            ModelConfig::Gaussian {
                index_drift,
                index_vol,
                asset_drift,
                asset_vol,
            } => MarketModel::gaussian(index_drift, index_vol, asset_drift, asset_vol),
            ModelConfig::OrnsteinUhlenbeck {
                reversion,
                mean_level,
                index_vol,
                asset_drift,
                asset_vol,
            } => MarketModel::ornstein_uhlenbeck(
                reversion,
                mean_level,
                index_vol,
                asset_drift,
                asset_vol,
            ),
            ModelConfig::Geometric {
                growth,
                index_vol,
                asset_drift,
                asset_vol,
            } => MarketModel::geometric(growth, index_vol, asset_drift, asset_vol),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    pub family: GeneratorFamily,
    /// Base aversion (k0, l0 or gamma0); unused by `avar`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<f64>,
    /// Wealth decay `c` in `base / (1 + max(x, 0) c)`.
    #[serde(default)]
    pub wealth_decay: f64,
    /// Level for the `avar` family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub avar_level: Option<f64>,
}

impl GeneratorConfig {
    pub fn build(&self) -> Result<GeneratorSpec, String> {
        match self.family {
            GeneratorFamily::Avar => {
                let level = self
                    .avar_level
                    .ok_or("generator.avar_level is required for the avar family")?;
                GeneratorSpec::avar(level).map_err(|e| e.to_string())
            }
            family => {
                let base = self
                    .base
                    .ok_or("generator.base is required for this family")?;
                if base <= 0.0 {
                    return Err(format!("generator.base must be positive, got {base}"));
                }
                if self.wealth_decay < 0.0 {
                    return Err(format!(
                        "generator.wealth_decay must be non-negative, got {}",
                        self.wealth_decay
                    ));
                }
                let aversion = if self.wealth_decay == 0.0 {
                    riskmin_generators::constant_aversion(base)
                } else {
                    wealth_decay_aversion(base, self.wealth_decay)
                };
                Ok(match family {
                    GeneratorFamily::Case1Sqrt => GeneratorSpec::case1(aversion),
                    GeneratorFamily::Case2Logistic => GeneratorSpec::case2(aversion),
                    GeneratorFamily::Case3Huber => GeneratorSpec::case3(aversion),
                    GeneratorFamily::EntropicQuadratic => GeneratorSpec::entropic(aversion),
                    GeneratorFamily::Avar => unreachable!(),
                })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub t0: f64,
    pub horizon: f64,
    pub r0: f64,
    pub initial_wealth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n_steps: usize,
    pub n_paths: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum PayoffConfig {
    Constant { value: f64 },
    Linear { slope: f64, intercept: f64 },
    ClippedLinear { slope: f64, intercept: f64, lo: f64, hi: f64 },
    SmoothBump { center: f64, width: f64, height: f64 },
}

impl PayoffConfig {
    pub fn build(&self) -> Derivative {
        match *self {
            PayoffConfig::Constant { value } => Derivative::constant(value),
            PayoffConfig::Linear { slope, intercept } => Derivative::linear(slope, intercept),
            PayoffConfig::ClippedLinear {
                slope,
                intercept,
                lo,
                hi,
            } => Derivative::clipped_linear(slope, intercept, lo, hi),
            PayoffConfig::SmoothBump {
                center,
                width,
                height,
            } => Derivative::smooth_bump(center, width, height),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    /// Closed form vs grid minimizer.
    pub closed_form: f64,
    /// Duality identity and polar cross-checks.
    pub duality: f64,
    /// Backward-solver vs quadrature values (absolute).
    pub bsde_absolute: f64,
    /// Monte Carlo acceptance band in standard errors.
    pub mc_sigmas: f64,
    /// Malliavin formula vs bump oracle (relative).
    pub malliavin_relative: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            closed_form: 1e-7,
            duality: 1e-7,
            bsde_absolute: 2e-2,
            mc_sigmas: 3.0,
            malliavin_relative: 1e-2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: "out".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolarGridConfig {
    pub mu_min: f64,
    pub mu_max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub model: ModelConfig,
    pub generator: GeneratorConfig,
    pub problem: ProblemConfig,
    pub grid: GridConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payoff: Option<PayoffConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraint: Option<ConstraintSet>,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polar_grid: Option<PolarGridConfig>,
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    /// Field-level validation; returns every problem found.
    pub fn validate(&self) -> Vec<String> {
        let mut issues = Vec::new();
        if !(self.problem.horizon > self.problem.t0) {
            issues.push(format!(
                "problem.horizon ({}) must exceed problem.t0 ({})",
                self.problem.horizon, self.problem.t0
            ));
        }
        if self.grid.n_steps == 0 {
            issues.push("grid.n_steps must be at least 1".into());
        }
        if self.grid.n_paths == 0 {
            issues.push("grid.n_paths must be at least 1".into());
        }
        if let Err(e) = self.generator.build() {
            issues.push(e);
        }
        if let Some(ConstraintSet::Interval { lo, hi }) = self.constraint {
            if lo > hi {
                issues.push(format!("constraint interval [{lo}, {hi}] is empty"));
            }
        }
        if let Some(p) = &self.polar_grid {
            if p.points < 2 {
                issues.push("polar_grid.points must be at least 2".into());
            }
            if !(p.mu_max > p.mu_min) {
                issues.push("polar_grid.mu_max must exceed polar_grid.mu_min".into());
            }
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("closed_form", t.closed_form),
            ("duality", t.duality),
            ("bsde_absolute", t.bsde_absolute),
            ("mc_sigmas", t.mc_sigmas),
            ("malliavin_relative", t.malliavin_relative),
        ] {
            if !(v > 0.0) {
                issues.push(format!("tolerances.{name} must be positive, got {v}"));
            }
        }
        issues
    }

    pub fn model(&self) -> MarketModel {
        self.model.build()
    }

    pub fn generator(&self) -> GeneratorSpec {
        self.generator
            .build()
            .expect("validated before building")
    }

    pub fn derivative(&self) -> Option<Derivative> {
        self.payoff.as_ref().map(|p| p.build())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const EXAMPLE: &str = r#"
[model]
preset = "gaussian"
index_drift = 0.0
index_vol = 1.0
asset_drift = 0.06
asset_vol = 0.2

[generator]
family = "case1_sqrt"
base = 0.5

[problem]
t0 = 0.0
horizon = 1.0
r0 = 1.0
initial_wealth = 1.0

[grid]
n_steps = 100
n_paths = 20000
seed = 42

[payoff]
preset = "linear"
slope = 1.0
intercept = 0.0
"#;

    #[test]
    fn parses_and_validates_the_example() {
        let cfg = ScenarioConfig::parse(EXAMPLE).unwrap();
        assert!(cfg.validate().is_empty());
        assert_eq!(cfg.grid.seed, 42);
        assert!(cfg.payoff.is_some());
        assert_eq!(cfg.tolerances, ToleranceConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = EXAMPLE.replace("[grid]", "[grid]\nextra_knob = 1");
        assert!(ScenarioConfig::parse(&bad).is_err());
    }

    #[test]
    fn field_level_validation_messages() {
        let mut cfg = ScenarioConfig::parse(EXAMPLE).unwrap();
        cfg.problem.horizon = -1.0;
        cfg.grid.n_paths = 0;
        cfg.generator.base = Some(-0.5);
        let issues = cfg.validate();
        assert_eq!(issues.len(), 3);
        assert!(issues[0].contains("problem.horizon"));
        assert!(issues[1].contains("grid.n_paths"));
        assert!(issues[2].contains("generator.base"));
    }

    #[test]
    fn avar_requires_a_level() {
        let text = EXAMPLE.replace(
            "family = \"case1_sqrt\"\nbase = 0.5",
            "family = \"avar\"",
        );
        let cfg = ScenarioConfig::parse(&text).unwrap();
        assert!(!cfg.validate().is_empty());
    }
}
