//! Simulator and analysis toolkit for random walks on growing graphs.
//!
//! A growing-graph walk is specified by a duration schedule `d(n)`, a graph
//! family `G(n)` with nested vertex sets, and a transition family `P(n)`;
//! the walk follows `P(n)` during phase `n`, the time window
//! `[T_{n-1}, T_n)` with `T_n = sum_{i<=n} d(i)`. The crate provides:
//!
//! - [`schedule`]: duration schedules, phase timelines, prefix-sum order;
//! - [`families`]: the concrete graph families (k-ary trees, boxes,
//!   hypercubes, level trees, stars) as sparse stochastic matrices, plus
//!   their exact lumped projections;
//! - [`engine`]: exact distribution evolution across phases, return-series
//!   bookkeeping, Monte Carlo cross-validation, hitting experiments;
//! - [`analysis`]: stationary distributions (closed-form and numeric),
//!   mass bounds, even mixing times, and the recurrence/transience
//!   classifier;
//! - [`coupling`]: monotone couplings and dominance verification for the
//!   less-homesick-as-graph-growing property.

pub mod analysis;
pub mod coupling;
pub mod engine;
pub mod error;
pub mod families;
pub mod matrix;
pub mod numeric;
pub mod schedule;
pub mod state;

pub use error::{Error, Result};
