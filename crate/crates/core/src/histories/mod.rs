//! Decoherent-histories machinery for the arrival-time problem: class
//! operators as time-ordered strings of side projections, the complex-
//! potential crossing class operator, the decoherence functional and its
//! interference diagnostics, and regime classification by environment
//! timescales.

mod class_ops;
mod functional;
mod regime;

pub use class_ops::{apply_class_operator, crossing_class_operator_cp};
pub use functional::{
    decoherence_functional, decoherence_functional_pure, delta_bound, delta_bound_density,
    DecoherenceReport, DeltaBound, Timescales,
};
pub use regime::{regime_classify, Regime, RegimeReport};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Which side of the origin a projection selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// P = theta(x): keep x >= 0.
    Positive,
    /// Pbar = theta(-x): keep x < 0.
    Negative,
}

/// A history: a labelled, time-ordered string of side projections
/// P_side(t_n) ... P_side(t_1), applied in the Heisenberg picture.
#[derive(Debug, Clone)]
pub struct HistorySpec<T> {
    label: String,
    steps: Vec<(T, Side)>,
}

impl<T: Real> HistorySpec<T> {
    /// Build a history from (time, side) steps. Times must be non-negative
    /// and non-decreasing; equal adjacent times are allowed (two projections
    /// at the same instant compose directly, e.g. P Pbar = 0).
    pub fn new(label: impl Into<String>, steps: Vec<(T, Side)>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::InvalidParameter(
                "history needs at least one projection".to_string(),
            ));
        }
        if steps[0].0 < T::of(0.0) {
            return Err(Error::InvalidParameter(
                "projection times must be non-negative".to_string(),
            ));
        }
        for w in steps.windows(2) {
            if w[1].0 < w[0].0 {
                return Err(Error::InvalidParameter(
                    "projection times must be non-decreasing".to_string(),
                ));
            }
        }
        Ok(Self {
            label: label.into(),
            steps,
        })
    }

    #[inline]
    pub fn label(&self) -> &str {
        &self.label
    }

    /// The (time, side) string in application order (earliest first).
    #[inline]
    pub fn steps(&self) -> &[(T, Side)] {
        &self.steps
    }

    /// Time of the last projection.
    #[inline]
    pub fn final_time(&self) -> T {
        self.steps[self.steps.len() - 1].0
    }
}

/// The first-crossing history set over a time grid t_1 < ... < t_n:
/// C_1 = Pbar(t_1), C_k = Pbar(t_k) P(t_{k-1}) ... P(t_1) for k >= 2
/// ("in x > 0 up to t_{k-1}, in x < 0 at t_k": a first crossing between
/// t_{k-1} and t_k"), plus the no-crossing complement P(t_n) ... P(t_1).
/// The set telescopes to the identity: summing the class operators over
/// the set reproduces bare evolution.
pub fn first_crossing_operators<T: Real>(t_grid: &[T]) -> Result<Vec<HistorySpec<T>>> {
    if t_grid.is_empty() {
        return Err(Error::InvalidParameter(
            "first-crossing set needs at least one time".to_string(),
        ));
    }
    for w in t_grid.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidParameter(
                "first-crossing time grid must be strictly increasing".to_string(),
            ));
        }
    }
    let mut specs = Vec::with_capacity(t_grid.len() + 1);
    for k in 1..=t_grid.len() {
        let mut steps: Vec<(T, Side)> = t_grid[..k - 1]
            .iter()
            .map(|&t| (t, Side::Positive))
            .collect();
        steps.push((t_grid[k - 1], Side::Negative));
        specs.push(HistorySpec::new(format!("crossing-{k}"), steps)?);
    }
    let all_positive: Vec<(T, Side)> = t_grid.iter().map(|&t| (t, Side::Positive)).collect();
    specs.push(HistorySpec::new("no-crossing", all_positive)?);
    Ok(specs)
}
