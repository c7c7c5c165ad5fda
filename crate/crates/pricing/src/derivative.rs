use std::fmt;
use std::sync::Arc;

use riskmin_market::PathBundle;

type PayoffFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A terminal payoff `F(R_T)` with its derivative `F_r` and the declared
/// sup-norms of both (the boundedness hypothesis is declared by the
/// derivative author and spot-checked on simulated paths; violations warn,
/// they do not abort).
#[derive(Clone)]
pub struct Derivative {
    label: String,
    payoff: PayoffFn,
    payoff_derivative: Option<PayoffFn>,
    pub payoff_bound: f64,
    pub derivative_bound: f64,
}

impl fmt::Debug for Derivative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Derivative")
            .field("label", &self.label)
            .field("payoff_bound", &self.payoff_bound)
            .field("derivative_bound", &self.derivative_bound)
            .finish()
    }
}

impl Derivative {
    pub fn constant(value: f64) -> Self {
        Self {
            label: format!("constant({value})"),
            payoff: Arc::new(move |_| value),
            payoff_derivative: Some(Arc::new(|_| 0.0)),
            payoff_bound: value.abs(),
            derivative_bound: 0.0,
        }
    }

    /// `F(r) = slope * r + intercept`. The payoff itself is declared
    /// unbounded (the sup-norm check is vacuous); the derivative bound is
    /// `|slope|`.
    pub fn linear(slope: f64, intercept: f64) -> Self {
        Self {
            label: format!("linear({slope}, {intercept})"),
            payoff: Arc::new(move |r| slope * r + intercept),
            payoff_derivative: Some(Arc::new(move |_| slope)),
            payoff_bound: f64::INFINITY,
            derivative_bound: slope.abs(),
        }
    }

    /// `F(r) = clamp(slope * r + intercept, lo, hi)`; the derivative is
    /// `slope` strictly inside the band and 0 outside.
    pub fn clipped_linear(slope: f64, intercept: f64, lo: f64, hi: f64) -> Self {
        Self {
            label: format!("clipped_linear({slope}, {intercept}, {lo}, {hi})"),
            payoff: Arc::new(move |r| (slope * r + intercept).clamp(lo, hi)),
            payoff_derivative: Some(Arc::new(move |r| {
                let raw = slope * r + intercept;
                if raw > lo && raw < hi {
                    slope
                } else {
                    0.0
                }
            })),
            payoff_bound: lo.abs().max(hi.abs()),
            derivative_bound: slope.abs(),
        }
    }

    /// `F(r) = height * exp(-((r - center)/width)^2)`.
    pub fn smooth_bump(center: f64, width: f64, height: f64) -> Self {
        let w2 = width * width;
        Self {
            label: format!("smooth_bump({center}, {width}, {height})"),
            payoff: Arc::new(move |r| height * (-(r - center) * (r - center) / w2).exp()),
            payoff_derivative: Some(Arc::new(move |r| {
                let f = height * (-(r - center) * (r - center) / w2).exp();
                -2.0 * (r - center) / w2 * f
            })),
            // max |F_r| at one width from the center: |h| sqrt(2/e) / w.
            payoff_bound: height.abs(),
            derivative_bound: height.abs() * (2.0f64 / std::f64::consts::E).sqrt() / width.abs(),
        }
    }

    pub fn custom(
        label: impl Into<String>,
        payoff: impl Fn(f64) -> f64 + Send + Sync + 'static,
        payoff_derivative: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
        payoff_bound: f64,
        derivative_bound: f64,
    ) -> Self {
        Self {
            label: label.into(),
            payoff: Arc::new(payoff),
            payoff_derivative,
            payoff_bound,
            derivative_bound,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn payoff(&self, r: f64) -> f64 {
        (self.payoff)(r)
    }

    pub fn payoff_derivative(&self, r: f64) -> Option<f64> {
        self.payoff_derivative.as_ref().map(|f| f(r))
    }

    pub fn has_derivative(&self) -> bool {
        self.payoff_derivative.is_some()
    }

    /// Pointwise scaling `F -> factor * F` (derivative and bounds scale
    /// along). Scaling by powers of two is exact path by path.
    pub fn scaled(&self, factor: f64) -> Self {
        let payoff = self.payoff.clone();
        let derivative = self.payoff_derivative.clone();
        Self {
            label: format!("{} * {factor}", self.label),
            payoff: Arc::new(move |r| factor * payoff(r)),
            payoff_derivative: derivative
                .map(|d| Arc::new(move |r| factor * d(r)) as PayoffFn),
            payoff_bound: self.payoff_bound * factor.abs(),
            derivative_bound: self.derivative_bound * factor.abs(),
        }
    }

    /// Cash translation `F -> F + c`.
    pub fn shifted(&self, c: f64) -> Self {
        let payoff = self.payoff.clone();
        Self {
            label: format!("{} + {c}", self.label),
            payoff: Arc::new(move |r| payoff(r) + c),
            payoff_derivative: self.payoff_derivative.clone(),
            payoff_bound: self.payoff_bound + c.abs(),
            derivative_bound: self.derivative_bound,
        }
    }

    /// Spot-check the declared sup-norms on the bundle's terminal values;
    /// returns warnings instead of failing.
    pub fn bound_warnings(&self, bundle: &PathBundle) -> Vec<String> {
        let mut payoff_violations = 0usize;
        let mut derivative_violations = 0usize;
        for path in &bundle.index {
            let r = path[bundle.n_steps];
            if self.payoff(r).abs() > self.payoff_bound + 1e-12 {
                payoff_violations += 1;
            }
            if let Some(d) = self.payoff_derivative(r) {
                if d.abs() > self.derivative_bound + 1e-12 {
                    derivative_violations += 1;
                }
            }
        }
        let mut warnings = Vec::new();
        if payoff_violations > 0 {
            warnings.push(format!(
                "payoff exceeded its declared bound {} on {payoff_violations} paths",
                self.payoff_bound
            ));
        }
        if derivative_violations > 0 {
            warnings.push(format!(
                "payoff derivative exceeded its declared bound {} on {derivative_violations} paths",
                self.derivative_bound
            ));
        }
        warnings
    }
}
