//! Subcommand implementations. Every command writes its report files under
//! the output directory with the resolved config echoed in the header.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use riskmin_bsde::risk_of_strategy;
use riskmin_convex::{numeric_polar, polar};
use riskmin_market::{girsanov_density, simulate_index, PathBundle, StrategyProcess};
use riskmin_pricing::{derivative_hedge, indifference_price, marginal_price};
use riskmin_strategy::{feasibility, pointwise_optimal_p, solve_deterministic, FeasibilityReport};
use serde_json::Value;

use crate::config::ScenarioConfig;
use crate::emit::{csv_number, json_to_string, report_header};

pub enum CliError {
    /// Exit 2: configuration problems, one message per field.
    Validation(Vec<String>),
    /// Exit 3: the scenario is infeasible; the report is serialized.
    Infeasible(FeasibilityReport),
    /// Exit 4: numerical or I/O failure.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Numerical(e.to_string())
    }
}

pub struct RunContext {
    pub config: ScenarioConfig,
    pub out_dir: PathBuf,
    pub quiet: bool,
    pub timestamp: Option<u64>,
}

impl RunContext {
    fn config_json(&self) -> Value {
        serde_json::to_value(&self.config).expect("config serializes")
    }

    fn header(&self, subcommand: &str) -> String {
        report_header(subcommand, &self.config_json(), self.timestamp)
    }

    fn write(&self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        fs::create_dir_all(&self.out_dir)
            .map_err(|e| CliError::Numerical(format!("cannot create output dir: {e}")))?;
        let path = self.out_dir.join(name);
        fs::write(&path, contents)
            .map_err(|e| CliError::Numerical(format!("cannot write {}: {e}", path.display())))?;
        if !self.quiet {
            println!("wrote {}", path.display());
        }
        Ok(path)
    }

    fn write_json_report(&self, name: &str, body: Value) -> Result<(), CliError> {
        let report = serde_json::json!({
            "config": self.config_json(),
            "report": body,
        });
        let mut text = String::new();
        let _ = writeln!(text, "{}", json_to_string(&report));
        self.write(name, &text)?;
        Ok(())
    }

    fn bundle(&self) -> Result<PathBundle, CliError> {
        let p = &self.config.problem;
        let g = &self.config.grid;
        Ok(simulate_index(
            &self.config.model(),
            p.t0,
            p.r0,
            p.horizon,
            g.n_steps,
            g.n_paths,
            g.seed,
        )?)
    }
}

/// `simulate`: per-grid-point summary of the index paths and the Girsanov
/// density.
pub fn run_simulate(ctx: &RunContext) -> Result<(), CliError> {
    let model = ctx.config.model();
    let bundle = ctx.bundle()?;
    let density = girsanov_density(&bundle, &model)?;

    let mut out = ctx.header("simulate");
    out.push_str("step,time,index_mean,index_std,density_mean\n");
    let n = bundle.n_paths as f64;
    for j in 0..=bundle.n_steps {
        let mean = (0..bundle.n_paths)
            .map(|i| bundle.index[i][j])
            .sum::<f64>()
            / n;
        let var = (0..bundle.n_paths)
            .map(|i| {
                let d = bundle.index[i][j] - mean;
                d * d
            })
            .sum::<f64>()
            / n;
        let a_mean = (0..bundle.n_paths).map(|i| density[i][j]).sum::<f64>() / n;
        let _ = writeln!(
            out,
            "{j},{},{},{},{}",
            csv_number(bundle.grid[j]),
            csv_number(mean),
            csv_number(var.sqrt()),
            csv_number(a_mean)
        );
    }
    ctx.write("simulate.csv", &out)?;
    Ok(())
}

/// `polar`: tabulate the polar function of the configured generator over a
/// mu grid, alongside the golden-section cross-check.
pub fn run_polar(ctx: &RunContext) -> Result<(), CliError> {
    let spec = ctx.config.generator();
    let p = &ctx.config.problem;
    let (mu_min, mu_max, points) = match &ctx.config.polar_grid {
        Some(g) => (g.mu_min, g.mu_max, g.points),
        None => {
            let bound = spec
                .lipschitz_bound(p.t0, p.r0, p.initial_wealth)?
                .unwrap_or(4.0);
            (-1.2 * bound, 1.2 * bound, 121)
        }
    };

    let mut out = ctx.header("polar");
    out.push_str("mu,finite,boundary,value,optimizer,numeric_value\n");
    for i in 0..points {
        let mu = mu_min + (mu_max - mu_min) * i as f64 / (points - 1) as f64;
        let analytic = polar(&spec, p.t0, p.r0, p.initial_wealth, mu)?;
        let numeric = numeric_polar(&spec, p.t0, p.r0, p.initial_wealth, mu)?;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            csv_number(mu),
            analytic.finite,
            analytic.boundary,
            csv_number(analytic.value),
            analytic
                .optimizer
                .map(csv_number)
                .unwrap_or_default(),
            csv_number(numeric.value),
        );
    }
    ctx.write("polar.csv", &out)?;
    Ok(())
}

/// `strategy`: feasibility, the optimal strategy table over the time grid
/// and the minimal-risk value curve. Infeasible scenarios exit with the
/// serialized feasibility report.
pub fn run_strategy(ctx: &RunContext) -> Result<(), CliError> {
    let spec = ctx.config.generator();
    let model = ctx.config.model();
    let p = &ctx.config.problem;
    let n_steps = ctx.config.grid.n_steps;

    let dt = (p.horizon - p.t0) / n_steps as f64;
    let grid: Vec<(f64, f64, f64)> = (0..=n_steps)
        .map(|j| (p.t0 + dt * j as f64, p.r0, p.initial_wealth))
        .collect();
    let report = feasibility(&spec, &model, &grid)?;
    if !report.feasible {
        let mut text = String::new();
        let _ = writeln!(
            text,
            "{}",
            json_to_string(&serde_json::json!({
                "config": ctx.config_json(),
                "feasibility": serde_json::to_value(&report).expect("report serializes"),
            }))
        );
        ctx.write("feasibility.json", &text)?;
        return Err(CliError::Infeasible(report));
    }

    let solution = solve_deterministic(
        &spec,
        &model,
        p.t0,
        p.horizon,
        p.initial_wealth,
        n_steps,
        ctx.config.constraint,
    )
    ?;

    let mut out = ctx.header("strategy");
    out.push_str("time,index_level,wealth,theta,p_bar,pi_bar,regime\n");
    for &(s, r, x) in &grid {
        let theta = model.market_price_of_risk(s, r)?;
        let p_bar = solution.p_bar(s, r, x)?;
        let pi_bar = solution.pi_bar(s, r, x)?;
        let (regime, ..) =
            riskmin_strategy::classify_point(spec.family(), theta, spec.aversion(s, r, x)?);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{:?}",
            csv_number(s),
            csv_number(r),
            csv_number(x),
            csv_number(theta),
            csv_number(p_bar),
            csv_number(pi_bar),
            regime
        );
    }
    ctx.write("strategy.csv", &out)?;

    let mut out = ctx.header("strategy");
    out.push_str("time,y_bar\n");
    for (s, v) in solution.y_bar.grid.iter().zip(&solution.y_bar.values) {
        let _ = writeln!(out, "{},{}", csv_number(*s), csv_number(*v));
    }
    ctx.write("ybar.csv", &out)?;
    Ok(())
}

/// `risk`: the backward-solver risk of the closed-form strategy on a fresh
/// bundle, against the quadrature value.
pub fn run_risk(ctx: &RunContext) -> Result<(), CliError> {
    let spec = ctx.config.generator();
    let model = ctx.config.model();
    let p = &ctx.config.problem;

    let solution = solve_deterministic(
        &spec,
        &model,
        p.t0,
        p.horizon,
        p.initial_wealth,
        ctx.config.grid.n_steps,
        ctx.config.constraint,
    )
    ?;
    let y_bar = solution.y_bar_t();

    let bundle = ctx.bundle()?;
    let family = spec.family();
    let constraint = ctx
        .config
        .constraint
        .unwrap_or(riskmin_convex::ConstraintSet::WholeLine);
    let spec_for_rule = spec.clone();
    let model_for_rule = model.clone();
    let strategy = StrategyProcess::feedback(p.initial_wealth, move |s, r, x| {
        let theta = match model_for_rule.market_price_of_risk(s, r) {
            Ok(t) => t,
            Err(_) => return f64::NAN,
        };
        let aversion = match spec_for_rule.aversion(s, r, x) {
            Ok(a) => a,
            Err(_) => return f64::NAN,
        };
        pointwise_optimal_p(family, s, r, theta, aversion, 0.0, &constraint).unwrap_or(f64::NAN)
    });
    let sol = risk_of_strategy(&bundle, &strategy, &spec, &model, 4)?;

    ctx.write_json_report(
        "risk.json",
        serde_json::json!({
            "rho_bsde": sol.y_t,
            "dispersion": sol.y_t_dispersion,
            "y_bar_quadrature": y_bar,
            "gap": sol.y_t - y_bar,
            "n_paths": ctx.config.grid.n_paths,
        }),
    )
}

/// `price`: Monte Carlo risk-indifference price of the configured payoff.
pub fn run_price(ctx: &RunContext) -> Result<(), CliError> {
    let derivative = ctx
        .config
        .derivative()
        .ok_or_else(|| CliError::Validation(vec!["payoff section is required for price".into()]))?;
    let model = ctx.config.model();
    let bundle = ctx.bundle()?;
    let report = indifference_price(&model, &derivative, &bundle)?;
    ctx.write_json_report(
        "price.json",
        serde_json::json!({
            "q": report.q,
            "marginal_price": marginal_price(&report),
            "std_err": report.std_err,
            "n_paths": report.n_paths,
            "density_mean": report.density_mean,
            "density_second_moment": report.density_second_moment,
        }),
    )
}

/// `hedge`: Malliavin hedge of the configured payoff with integrability
/// diagnostics.
pub fn run_hedge(ctx: &RunContext) -> Result<(), CliError> {
    let derivative = ctx
        .config
        .derivative()
        .ok_or_else(|| CliError::Validation(vec!["payoff section is required for hedge".into()]))?;
    let model = ctx.config.model();
    let bundle = ctx.bundle()?;
    let report = derivative_hedge(&model, &derivative, &bundle)?;
    let d = &report.diagnostics;
    ctx.write_json_report(
        "hedge.json",
        serde_json::json!({
            "delta": report.delta,
            "std_err": report.std_err,
            "term1": report.term1,
            "term2": report.term2,
            "n_paths": report.n_paths,
            "diagnostics": {
                "payoff_moment": d.payoff_moment,
                "malliavin_moment": d.malliavin_moment,
                "cross_moment": d.cross_moment,
                "h_max": d.h_max,
                "kurtosis": d.kurtosis.to_vec(),
                "heavy_tailed": d.heavy_tailed,
            },
        }),
    )
}

/// `verify`: the shipped benchmark matrix as a pass/fail CSV. Any failing
/// row makes the command exit with a numerical-failure status.
pub fn run_verify(ctx: &RunContext) -> Result<(), CliError> {
    let rows = crate::verify::run_matrix(&ctx.config)?;
    let mut out = ctx.header("verify");
    out.push_str("check,family,detail,value,reference,gap,tolerance,pass\n");
    let mut failures = 0usize;
    // Free-text fields are kept comma-free so the body stays plain CSV.
    let clean = |s: &str| s.replace(',', ";");
    for row in &rows {
        if !row.pass {
            failures += 1;
        }
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            clean(&row.check),
            clean(&row.family),
            clean(&row.detail),
            csv_number(row.value),
            csv_number(row.reference),
            csv_number(row.gap),
            csv_number(row.tolerance),
            row.pass
        );
    }
    ctx.write("verify.csv", &out)?;
    if failures > 0 {
        return Err(CliError::Numerical(format!(
            "{failures} of {} verification rows failed",
            rows.len()
        )));
    }
    if !ctx.quiet {
        println!("all {} verification rows passed", rows.len());
    }
    Ok(())
}
