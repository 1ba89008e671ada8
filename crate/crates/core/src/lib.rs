//! Concert tour scheduling.
//!
//! A band must play every city exactly once within a fixed calendar. Tours
//! are scored by miles driven, performances on good and bad weekdays, and
//! penalties for availability, rest and travel-time violations. An initial
//! tour is built greedily and then improved by simulated annealing with
//! restarts; an exhaustive oracle covers tiny instances.

pub mod anneal;
pub mod constraints;
pub mod construct;
pub mod cost;
pub mod error;
pub mod ingest;
pub mod model;
pub mod oracle;
pub mod report;

pub use anneal::{simulated_annealing, AnnealOutcome, Budget, CostModel, RunTrace, SaParams};
pub use constraints::{
    evaluate, Evaluation, ViolationCounts, ViolationReport, DEFAULT_BREAK_LIMIT,
};
pub use construct::construct_initial;
pub use cost::{relaxed_cost, strict_cost, CostBreakdown};
pub use error::{Error, Result};
pub use model::{
    Availability, Calendar, Instance, Matrix, Objectives, Penalties, Tour, Weekday, Weights,
};
