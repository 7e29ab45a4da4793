//! Model and empirical pipeline for daily-leveraged index funds.
//!
//! * [`model`]: compounded leveraged log-returns, the `(u, v)` window summary,
//!   the quadratic excess `g(L)`, its envelope `h(v)` and the dominance
//!   interval `[v⁻, v⁺]`.
//! * [`market_data`]: local CSV ingestion, annual real returns and nominal
//!   return projections.
//! * [`analysis`]: rolling volatility, approximation validation and threshold
//!   reports.
//! * [`chart`]: deterministic SVG line charts with a CSV of the plotted points.
//! * [`report`]: CSV output with stable headers.

pub mod analysis;
pub mod chart;
pub mod error;
pub mod market_data;
pub mod model;
pub mod report;

pub use error::{Error, Result};
pub use model::{
    approx_excess_total, daily_changes, dominance_interval, dominance_predicate, excess_g, fee_gap,
    leveraged_log_return, max_excess_h, optimal_leverage, quadratic_log_approx, window_stats,
    ChangeSeries, DominanceInterval, FeePair, Leverage, PriceSeries, WindowStats,
};
