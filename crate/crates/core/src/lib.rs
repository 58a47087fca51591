//! Cost forecasting for budget-constrained crowdsourcing with a growing,
//! crowd-generated task set.
//!
//! The crate is organized bottom-up:
//!
//! - [`model`]: tasks, response tallies, label inference and accuracy.
//! - [`forecast`]: completion-cost estimates and the growth rules.
//! - [`allocation`]: the optimistic knowledge-gradient allocator.
//! - [`sim`]: the run engine, replications and matched baselines.
//! - [`dataset`]: canonical response tables for replay runs.
//! - [`analysis`]: growth rates, accuracy curves and burstiness statistics.
//!
//! Replications run on rayon when the default `parallel` feature is enabled.

pub mod allocation;
pub mod analysis;
pub mod dataset;
pub mod error;
pub mod forecast;
pub mod model;
pub mod parallel;
pub mod sim;

pub use error::{Error, Result};
