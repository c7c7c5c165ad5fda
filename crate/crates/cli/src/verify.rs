//! The shipped verification matrix: closed forms against the numeric
//! minimizer, duality, polar cross-checks, solver benchmarks, measure and
//! hedge references, Malliavin oracle, feasibility classification,
//! monotonicity sweeps and the constrained projection case.
//!
//! The matrix uses fixed benchmark parameters; only the seed, the (capped)
//! path count and the tolerances come from the scenario configuration, so
//! two runs with the same seed produce byte-identical reports.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use riskmin_bsde::{comparison_check, risk_of_strategy, ComparisonOutcome};
use riskmin_convex::{numeric_polar, polar, ConstraintSet};
use riskmin_generators::{
    constant_aversion, effective_generator, GeneratorFamily, GeneratorSpec,
};
use riskmin_market::{girsanov_density, simulate_index, MarketModel, StrategyProcess};
use riskmin_pricing::{
    bump_resimulated_derivative, derivative_hedge, indifference_price, malliavin_index_derivative,
    Derivative,
};
use riskmin_strategy::{
    classify_point, closed_form_case1, closed_form_case2, closed_form_case3,
    entropic_constrained, minimal_risk_value, pi_bar, pointwise_minimize, FeasibilityRegime,
    StrategyError,
};

use crate::commands::CliError;
use crate::config::ScenarioConfig;

pub struct VerifyRow {
    pub check: String,
    pub family: String,
    pub detail: String,
    pub value: f64,
    pub reference: f64,
    pub gap: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl VerifyRow {
    fn new(
        check: &str,
        family: &str,
        detail: &str,
        value: f64,
        reference: f64,
        tolerance: f64,
    ) -> Self {
        let gap = value - reference;
        Self {
            check: check.into(),
            family: family.into(),
            detail: detail.into(),
            value,
            reference,
            gap,
            tolerance,
            pass: gap.abs() <= tolerance,
        }
    }

    fn flag(check: &str, family: &str, detail: &str, pass: bool) -> Self {
        Self {
            check: check.into(),
            family: family.into(),
            detail: detail.into(),
            value: if pass { 1.0 } else { 0.0 },
            reference: 1.0,
            gap: if pass { 0.0 } else { -1.0 },
            tolerance: 0.0,
            pass,
        }
    }
}

fn theta_market(theta: f64) -> MarketModel {
    MarketModel::gaussian(0.0, 1.0, theta * 0.2, 0.2)
}

fn family_spec(family: GeneratorFamily, aversion: f64) -> GeneratorSpec {
    match family {
        GeneratorFamily::Case1Sqrt => GeneratorSpec::case1(constant_aversion(aversion)),
        GeneratorFamily::Case2Logistic => GeneratorSpec::case2(constant_aversion(aversion)),
        GeneratorFamily::Case3Huber => GeneratorSpec::case3(constant_aversion(aversion)),
        GeneratorFamily::Avar => GeneratorSpec::avar(aversion).expect("valid level"),
        GeneratorFamily::EntropicQuadratic => GeneratorSpec::entropic(constant_aversion(aversion)),
    }
}

fn closed_form_for(
    family: GeneratorFamily,
    spec: &GeneratorSpec,
    model: &MarketModel,
    z: f64,
) -> Result<f64, StrategyError> {
    match family {
        GeneratorFamily::Case1Sqrt => closed_form_case1(spec, model, 0.0, 1.0, 1.0, z),
        GeneratorFamily::Case2Logistic => closed_form_case2(spec, model, 0.0, 1.0, 1.0, z),
        GeneratorFamily::Case3Huber => closed_form_case3(spec, model, 0.0, 1.0, 1.0, z),
        _ => unreachable!("closed forms cover cases 1-3"),
    }
}

pub fn run_matrix(config: &ScenarioConfig) -> Result<Vec<VerifyRow>, CliError> {
    let tol = config.tolerances;
    let seed = config.grid.seed;
    // Benchmarks are capped for runtime; the acceptance suite runs the
    // full-scale versions.
    let mc_paths = config.grid.n_paths.clamp(1_000, 50_000);
    let bsde_paths = config.grid.n_paths.clamp(1_000, 20_000);

    let mut rows = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Closed form vs grid minimizer and duality, 50 samples per family.
    let families = [
        (GeneratorFamily::Case1Sqrt, "case1_sqrt"),
        (GeneratorFamily::Case2Logistic, "case2_logistic"),
        (GeneratorFamily::Case3Huber, "case3_huber"),
    ];
    for (family, name) in families {
        let mut worst_gap = 0.0f64;
        let mut worst_dual = 0.0f64;
        for _ in 0..50 {
            let (aversion, theta) = match family {
                GeneratorFamily::Case1Sqrt => {
                    let k = rng.random_range(0.3..2.0);
                    (k, k * rng.random_range(-0.85..0.85))
                }
                GeneratorFamily::Case2Logistic => {
                    let l = rng.random_range(0.3..2.0);
                    (l, l * rng.random_range(0.15..0.85))
                }
                _ => (rng.random_range(0.5..4.0), rng.random_range(-0.9..0.9)),
            };
            let z = rng.random_range(-2.0..2.0);
            let spec = family_spec(family, aversion);
            let model = theta_market(theta);
            let closed = closed_form_for(family, &spec, &model, z)?;
            let (p_grid, g_min) = pointwise_minimize(&spec, &model, 0.0, 1.0, 1.0, z)?;
            worst_gap = worst_gap.max((closed - p_grid).abs());
            let g = polar(&spec, 0.0, 1.0, 1.0, theta)?;
            worst_dual = worst_dual.max((g_min - (-g.value - theta * z)).abs());
        }
        rows.push(VerifyRow::new(
            "closed_form_vs_grid",
            name,
            "max |p_closed - p_grid| over 50 samples",
            worst_gap,
            0.0,
            tol.closed_form,
        ));
        rows.push(VerifyRow::new(
            "duality_identity",
            name,
            "max |min g_bar - (-G - theta z)|",
            worst_dual,
            0.0,
            tol.duality,
        ));
    }

    // Analytic vs numeric polars on each family's finite domain.
    let polar_specs: [(GeneratorFamily, f64, &str, Vec<f64>); 5] = [
        (
            GeneratorFamily::Case1Sqrt,
            0.7,
            "case1_sqrt",
            vec![-0.55, -0.3, 0.0, 0.3, 0.55],
        ),
        (
            GeneratorFamily::Case2Logistic,
            0.6,
            "case2_logistic",
            vec![0.1, 0.2, 0.3, 0.4, 0.5],
        ),
        (
            GeneratorFamily::Case3Huber,
            2.0,
            "case3_huber",
            vec![-0.9, -0.5, 0.0, 0.5, 0.9],
        ),
        (GeneratorFamily::Avar, 0.3, "avar", vec![-0.9, -0.5, -0.1]),
        (
            GeneratorFamily::EntropicQuadratic,
            1.5,
            "entropic_quadratic",
            vec![-2.0, -0.5, 0.5, 2.0],
        ),
    ];
    for (family, aversion, name, mus) in polar_specs {
        let spec = family_spec(family, aversion);
        let mut worst = 0.0f64;
        for mu in mus {
            let analytic = polar(&spec, 0.0, 1.0, 1.0, mu)?;
            let numeric = numeric_polar(&spec, 0.0, 1.0, 1.0, mu)?;
            if analytic.finite && numeric.finite {
                worst = worst.max((analytic.value - numeric.value).abs());
            }
        }
        rows.push(VerifyRow::new(
            "polar_analytic_vs_numeric",
            name,
            "max |G_analytic - G_golden| on finite domain",
            worst,
            0.0,
            tol.duality,
        ));
    }

    // Quadrature vs backward solver on the case 1 and case 3 benchmarks.
    {
        let spec = GeneratorSpec::case1(constant_aversion(0.5));
        let model = theta_market(0.3);
        let quad = minimal_risk_value(&spec, &model, 0.0, 1.0, 1.0, 100)?.at_start();
        rows.push(VerifyRow::new(
            "ybar_quadrature",
            "case1_sqrt",
            "theta 0.3, k 0.5, x 1",
            quad,
            -1.1,
            1e-9,
        ));
        let bundle = simulate_index(&model, 0.0, 1.0, 1.0, 100, bsde_paths, seed)?;
        let sol = risk_of_strategy(
            &bundle,
            &StrategyProcess::constant(1.0, 0.75),
            &spec,
            &model,
            4,
        )?;
        rows.push(VerifyRow::new(
            "ybar_bsde",
            "case1_sqrt",
            "solver vs quadrature",
            sol.y_t,
            quad,
            tol.bsde_absolute,
        ));

        let spec3 = GeneratorSpec::case3(constant_aversion(2.0));
        let model3 = theta_market(0.5);
        let quad3 = minimal_risk_value(&spec3, &model3, 0.0, 1.0, 0.0, 100)?.at_start();
        rows.push(VerifyRow::new(
            "ybar_quadrature",
            "case3_huber",
            "theta 0.5, gamma 2, x 0",
            quad3,
            -0.0625,
            1e-9,
        ));
        let bundle3 = simulate_index(&model3, 0.0, 1.0, 1.0, 100, bsde_paths, seed ^ 0x5a5a)?;
        let sol3 = risk_of_strategy(
            &bundle3,
            &StrategyProcess::constant(0.0, 0.25),
            &spec3,
            &model3,
            4,
        )?;
        rows.push(VerifyRow::new(
            "ybar_bsde",
            "case3_huber",
            "solver vs quadrature",
            sol3.y_t,
            quad3,
            tol.bsde_absolute,
        ));
    }

    // Girsanov measure diagnostics and the Gaussian price/hedge references.
    {
        let model = theta_market(0.3);
        let bundle = simulate_index(&model, 0.0, 1.0, 1.0, 64, mc_paths, seed ^ 0x11)?;
        let density = girsanov_density(&bundle, &model)?;
        let terminal: Vec<f64> = density.iter().map(|c| c[bundle.n_steps]).collect();
        let n = terminal.len() as f64;
        let mean = terminal.iter().sum::<f64>() / n;
        let var = terminal.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / (n - 1.0);
        rows.push(VerifyRow::new(
            "girsanov_unit_mean",
            "-",
            "E[A(T)] vs 1",
            mean,
            1.0,
            tol.mc_sigmas * (var / n).sqrt(),
        ));
        let sq: Vec<f64> = terminal.iter().map(|a| a * a).collect();
        let mean2 = sq.iter().sum::<f64>() / n;
        let var2 = sq.iter().map(|a| (a - mean2) * (a - mean2)).sum::<f64>() / (n - 1.0);
        rows.push(VerifyRow::new(
            "girsanov_second_moment",
            "-",
            "E[A(T)^2] vs exp(theta^2 tau)",
            mean2,
            (0.09f64).exp(),
            tol.mc_sigmas * (var2 / n).sqrt(),
        ));

        let payoff = Derivative::linear(1.0, 0.0);
        let price = indifference_price(&model, &payoff, &bundle)?;
        rows.push(VerifyRow::new(
            "price_gaussian_linear",
            "-",
            "q vs r0 - theta tau",
            price.q,
            0.7,
            tol.mc_sigmas * price.std_err,
        ));
        let price2 = indifference_price(&model, &payoff.scaled(2.0), &bundle)?;
        rows.push(VerifyRow::new(
            "price_linearity",
            "-",
            "q(2F) - 2 q(F), exact on common randomness",
            price2.q,
            2.0 * price.q,
            0.0,
        ));

        let hedge = derivative_hedge(&model, &payoff, &bundle)?;
        rows.push(VerifyRow::new(
            "hedge_gaussian_linear",
            "-",
            "delta vs -1/beta",
            hedge.delta,
            -5.0,
            tol.mc_sigmas * hedge.std_err,
        ));
        let hedge2 = derivative_hedge(&model, &payoff.scaled(2.0), &bundle)?;
        rows.push(VerifyRow::new(
            "hedge_scaling",
            "-",
            "delta(2F) - 2 delta(F), exact",
            hedge2.delta,
            2.0 * hedge.delta,
            0.0,
        ));
        let flat = derivative_hedge(&model, &Derivative::constant(3.0), &bundle)?;
        rows.push(VerifyRow::new(
            "hedge_constant_payoff",
            "-",
            "delta of a cash payoff",
            flat.delta,
            0.0,
            0.0,
        ));
    }

    // Malliavin formula vs bump resimulation on the OU and geometric presets.
    for (name, model) in [
        (
            "ornstein_uhlenbeck",
            MarketModel::ornstein_uhlenbeck(1.0, 0.0, 0.2, 0.06, 0.2),
        ),
        ("geometric", MarketModel::geometric(0.05, 0.2, 0.06, 0.2)),
    ] {
        let bundle = simulate_index(&model, 0.0, 1.0, 1.0, 200, 64, seed ^ 0x22)?;
        let mut worst = 0.0f64;
        for (r_idx, s_idx) in [(0, 200), (40, 160), (100, 200)] {
            let exact = malliavin_index_derivative(&model, &bundle, r_idx, s_idx)?;
            let bumped = bump_resimulated_derivative(&model, &bundle, r_idx, s_idx, 1e-4)?;
            for (e, b) in exact.iter().zip(&bumped) {
                worst = worst.max((e - b).abs() / e.abs().max(1e-12));
            }
        }
        rows.push(VerifyRow::new(
            "malliavin_bump_oracle",
            name,
            "max relative error over paths and (r, s) pairs",
            worst,
            0.0,
            tol.malliavin_relative,
        ));
    }

    // Feasibility classification.
    {
        let expect = |family, theta, aversion, regime| {
            let (got, ..) = classify_point(family, theta, aversion);
            got == regime
        };
        rows.push(VerifyRow::flag(
            "feasibility",
            "case2_logistic",
            "theta -0.1 infeasible",
            expect(
                GeneratorFamily::Case2Logistic,
                -0.1,
                0.6,
                FeasibilityRegime::InfeasibleUnbounded,
            ),
        ));
        rows.push(VerifyRow::flag(
            "feasibility",
            "case2_logistic",
            "theta 0.7 above l infeasible",
            expect(
                GeneratorFamily::Case2Logistic,
                0.7,
                0.6,
                FeasibilityRegime::InfeasibleUnbounded,
            ),
        ));
        rows.push(VerifyRow::flag(
            "feasibility",
            "case3_huber",
            "theta 1.5 unbounded",
            expect(
                GeneratorFamily::Case3Huber,
                1.5,
                2.0,
                FeasibilityRegime::InfeasibleUnbounded,
            ),
        ));
        rows.push(VerifyRow::flag(
            "feasibility",
            "case1_sqrt",
            "|theta| >= k infeasible",
            expect(
                GeneratorFamily::Case1Sqrt,
                0.5,
                0.5,
                FeasibilityRegime::InfeasibleNoMinimizer,
            ) && expect(
                GeneratorFamily::Case1Sqrt,
                0.8,
                0.5,
                FeasibilityRegime::InfeasibleUnbounded,
            ),
        ));
        let unbounded_detected = matches!(
            pointwise_minimize(
                &GeneratorSpec::case3(constant_aversion(2.0)),
                &theta_market(1.5),
                0.0,
                1.0,
                0.0,
                0.0,
            ),
            Err(StrategyError::UnboundedBelow { .. })
        );
        rows.push(VerifyRow::flag(
            "feasibility",
            "case3_huber",
            "grid minimizer detects unboundedness at theta 1.5",
            unbounded_detected,
        ));
    }

    // Monotonicity sweeps (worst signed violation; tolerance 1e-12).
    {
        let sweep = |values: &[f64]| -> f64 {
            let mut worst: f64 = 0.0;
            for w in values.windows(2) {
                worst = worst.max(w[0] - w[1]);
            }
            worst
        };

        let mut pis = Vec::new();
        for i in 1..=9 {
            let theta = 0.05 * i as f64;
            let m = theta_market(theta);
            let spec = GeneratorSpec::case1(constant_aversion(0.5));
            let p = closed_form_case1(&spec, &m, 0.0, 1.0, 1.0, 0.0)?;
            pis.push(pi_bar(&m, 0.0, 1.0, p)?);
        }
        rows.push(VerifyRow::new(
            "monotone_in_theta",
            "case1_sqrt",
            "pi non-decreasing on a theta grid",
            sweep(&pis),
            0.0,
            1e-12,
        ));

        let m = theta_market(0.3);
        let mut pis = Vec::new();
        for k in [0.35, 0.4, 0.5, 0.7, 1.0, 1.5] {
            let spec = GeneratorSpec::case1(constant_aversion(k));
            let p = closed_form_case1(&spec, &m, 0.0, 1.0, 1.0, 0.0)?;
            pis.push(-pi_bar(&m, 0.0, 1.0, p)?);
        }
        rows.push(VerifyRow::new(
            "monotone_in_aversion",
            "case1_sqrt",
            "pi non-increasing on a k grid",
            sweep(&pis),
            0.0,
            1e-12,
        ));

        let spec = GeneratorSpec::case3(riskmin_generators::wealth_decay_aversion(2.0, 0.5));
        let m = theta_market(0.5);
        let mut pis = Vec::new();
        for i in 0..=8 {
            let x = 0.25 * i as f64;
            let p = closed_form_case3(&spec, &m, 0.0, 1.0, x, 0.0)?;
            pis.push(pi_bar(&m, 0.0, 1.0, p)?);
        }
        rows.push(VerifyRow::new(
            "monotone_in_wealth",
            "case3_huber",
            "pi non-decreasing in x under decaying aversion",
            sweep(&pis),
            0.0,
            1e-12,
        ));
    }

    // Constrained entropic projection.
    {
        let spec = GeneratorSpec::entropic(constant_aversion(2.0));
        let model = theta_market(-0.4);
        let p_star =
            entropic_constrained(&spec, &model, 0.0, 1.0, 0.0, 0.0, &ConstraintSet::NonNegative)?;
        let at_opt = effective_generator(&spec, &model, 0.0, 1.0, 0.0, 0.0, p_star)
            .map_err(|e| CliError::Numerical(e.to_string()))?;
        let mut dominated = true;
        for k in 0..1000 {
            let p = 5.0 * (k as f64 + 0.5) / 1000.0;
            let v = effective_generator(&spec, &model, 0.0, 1.0, 0.0, 0.0, p)
                .map_err(|e| CliError::Numerical(e.to_string()))?;
            if at_opt > v + 1e-12 {
                dominated = false;
            }
        }
        rows.push(VerifyRow::new(
            "entropic_projection",
            "entropic_quadratic",
            "no-shorting clamps theta -0.4 to zero",
            p_star,
            0.0,
            0.0,
        ));
        rows.push(VerifyRow::flag(
            "entropic_projection_optimal",
            "entropic_quadratic",
            "g_bar at projected point dominates the feasible ray",
            dominated,
        ));
    }

    // Comparison-theorem ordering at reduced scale.
    {
        let model = theta_market(0.3);
        let bundle = simulate_index(&model, 0.0, 1.0, 1.0, 50, bsde_paths.min(10_000), seed ^ 0x33)?;
        let xi: Vec<f64> =
            riskmin_market::terminal_wealth(&bundle, &StrategyProcess::constant(1.0, 0.75), &model)?
                .iter()
                .map(|w| -w)
                .collect();
        let g = |k: f64| move |_: usize, _: usize, z: f64| k * ((1.0 + z * z).sqrt() - 1.0);
        let report = comparison_check(&bundle, &xi, g(0.4), g(0.6), 4, 1e-6)?;
        let (ordered, gap) = match report.outcome {
            ComparisonOutcome::Ordered { gap, .. } => (true, gap),
            _ => (false, f64::NAN),
        };
        rows.push(VerifyRow::flag(
            "comparison_ordering",
            "case1_sqrt",
            &format!("k 0.4 vs 0.6, gap {gap:.3e}"),
            ordered,
        ));

        let huber = |gamma: f64| {
            move |_: usize, _: usize, z: f64| {
                if z.abs() >= 1.0 / gamma {
                    z.abs() - 0.5 / gamma
                } else {
                    0.5 * gamma * z * z
                }
            }
        };
        let report = comparison_check(&bundle, &xi, huber(1.0), huber(3.0), 4, 1e-6)?;
        rows.push(VerifyRow::flag(
            "comparison_ordering",
            "case3_huber",
            "gamma 1 vs 3",
            report.is_ordered(),
        ));
    }

    Ok(rows)
}
