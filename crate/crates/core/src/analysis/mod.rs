//! Stationary distributions, mass bounds, mixing times, recurrence
//! classification, and growth diagnostics.

pub mod classify;
pub mod diagnostic;
pub mod mixing;
pub mod stationary;

pub use classify::{classify, RecurrenceVerdict, Verdict};
pub use diagnostic::{series_diagnostic, GrowthReport, GrowthRow};
pub use mixing::{
    analytic_mixing_bound, measure_even_mixing, mixing_estimate, MixingConstants, MixingEstimate,
};
pub use stationary::{
    closed_form_weights, detailed_balance_residual, even_stationary_closed,
    even_stationary_numeric, even_stationary_rational, p_bounds, p_origin_closed, EvenStationary,
    NumericStart, ReversibilityWeights,
};
