//! One-dimensional bracketing and golden-section search.
//!
//! The routines assume a (piecewise) convex objective. `bracket_min`
//! expands geometrically downhill from a center; monotone decrease across
//! the expansion limit is how unbounded-below objectives are detected.

/// Inverse golden ratio, `(sqrt(5) - 1) / 2`.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Outcome of a minimizing line search.
#[derive(Debug, Clone, Copy)]
pub struct SearchResult {
    pub x: f64,
    pub value: f64,
}

/// Downhill expansion failed to turn around before the width limit.
#[derive(Debug, Clone, Copy)]
pub struct UnboundedBelow {
    /// Sign of the direction in which the objective kept decreasing.
    pub direction: f64,
    /// Last decrease observed per expansion step.
    pub last_drop: f64,
}

/// Expand a bracket around `center` until the objective increases at both
/// ends. `half_width` seeds the expansion; `limit` bounds the distance from
/// `center`. Decrease that stays above `stall_tol` per step at the limit is
/// reported as unbounded; smaller decrease counts as numerically stalled
/// and yields a (huge but valid) bracket.
pub fn bracket_min(
    f: impl Fn(f64) -> f64,
    center: f64,
    half_width: f64,
    limit: f64,
    stall_tol: f64,
) -> Result<(f64, f64), UnboundedBelow> {
    let h = half_width.max(1e-12);
    let fc = f(center);
    let (flo, fhi) = (f(center - h), f(center + h));
    if fc <= flo && fc <= fhi {
        return Ok((center - h, center + h));
    }

    // Walk downhill with doubling steps.
    let dir = if flo < fhi { -1.0 } else { 1.0 };
    let mut step = h;
    let mut prev = center;
    let mut cur = center + dir * step;
    let mut f_prev = fc;
    let mut f_cur = if dir < 0.0 { flo } else { fhi };
    loop {
        if f_cur >= f_prev {
            // Turned around: the minimum lies between `prev -/+ step` and `cur`.
            let a = prev - dir * step;
            return Ok((a.min(cur), a.max(cur)));
        }
        if (cur - center).abs() >= limit {
            let drop = f_prev - f_cur;
            if drop <= stall_tol * (1.0 + f_cur.abs()) {
                // Numerically flat tail: treat as a bracket.
                return Ok((center.min(cur), center.max(cur)));
            }
            return Err(UnboundedBelow {
                direction: dir,
                last_drop: drop,
            });
        }
        step *= 2.0;
        prev = cur;
        f_prev = f_cur;
        cur += dir * step;
        f_cur = f(cur);
    }
}

/// Golden-section minimization on `[lo, hi]` down to an absolute `xtol`.
pub fn golden_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64, xtol: f64) -> SearchResult {
    let mut a = lo.min(hi);
    let mut b = lo.max(hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iter = 0;
    while (b - a).abs() > xtol && iter < 400 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        iter += 1;
    }
    let x = 0.5 * (a + b);
    SearchResult { x, value: f(x) }
}

/// Golden-section search followed by a couple of parabolic refinements.
/// The refinement is only kept when it does not increase the objective, so
/// kinked minima are safe.
pub fn golden_min_polished(f: impl Fn(f64) -> f64, lo: f64, hi: f64, xtol: f64) -> SearchResult {
    let mut best = golden_min(&f, lo, hi, xtol);
    let mut h = (hi - lo).abs().min(1.0) * 1e-4 + xtol;
    for _ in 0..3 {
        let (fl, fr) = (f(best.x - h), f(best.x + h));
        let denom = fl - 2.0 * best.value + fr;
        if denom > 0.0 {
            let shift = 0.5 * h * (fl - fr) / denom;
            if shift.is_finite() && shift.abs() <= h {
                let cand = best.x + shift;
                let fcand = f(cand);
                if fcand <= best.value {
                    best = SearchResult {
                        x: cand,
                        value: fcand,
                    };
                }
            }
        }
        h *= 1e-2;
    }
    best
}
