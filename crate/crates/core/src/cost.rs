//! Strict and relaxed cost functions.

use serde::{Deserialize, Serialize};

use crate::constraints::{Evaluation, Summary, ViolationCounts};
use crate::model::{Objectives, Penalties, Weights};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub objective_term: f64,
    pub penalty_term: f64,
    pub total: f64,
}

/// Weighted miles, good days and bad days.
pub fn strict_cost(obj: &Objectives, w: &Weights) -> f64 {
    w.mile * obj.total_miles as f64 + w.good * obj.good_days as f64 + w.bad * obj.bad_days as f64
}

pub fn penalty_cost(counts: &ViolationCounts, p: &Penalties) -> f64 {
    p.as_array()
        .iter()
        .zip(counts.as_array())
        .map(|(b, y)| b * y as f64)
        .sum()
}

pub fn relaxed_cost_of(summary: &Summary, w: &Weights, p: &Penalties) -> CostBreakdown {
    let objective_term = strict_cost(&summary.objectives, w);
    let penalty_term = penalty_cost(&summary.counts, p);
    CostBreakdown {
        objective_term,
        penalty_term,
        total: objective_term + penalty_term,
    }
}

/// Strict cost plus the weighted violation counts.
pub fn relaxed_cost(ev: &Evaluation, w: &Weights, p: &Penalties) -> CostBreakdown {
    relaxed_cost_of(&ev.summary(), w, p)
}
