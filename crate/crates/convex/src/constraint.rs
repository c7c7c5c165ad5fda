use serde::{Deserialize, Serialize};

use crate::error::ConvexError;

/// Closed convex strategy constraint on the real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstraintSet {
    WholeLine,
    NonNegative,
    Interval { lo: f64, hi: f64 },
}

impl ConstraintSet {
    pub fn interval(lo: f64, hi: f64) -> Result<Self, ConvexError> {
        if lo <= hi {
            Ok(ConstraintSet::Interval { lo, hi })
        } else {
            Err(ConvexError::InvalidInterval { lo, hi })
        }
    }

    /// Closest point of the set and the distance to it.
    pub fn project(&self, a: f64) -> (f64, f64) {
        let proj = match *self {
            ConstraintSet::WholeLine => a,
            ConstraintSet::NonNegative => a.max(0.0),
            ConstraintSet::Interval { lo, hi } => a.clamp(lo, hi),
        };
        (proj, (a - proj).abs())
    }

    pub fn contains(&self, a: f64) -> bool {
        let (proj, _) = self.project(a);
        proj == a
    }
}

/// Free-function form of [`ConstraintSet::project`].
pub fn project(a: f64, set: &ConstraintSet) -> (f64, f64) {
    set.project(a)
}
