//! Intraday volatility toolkit: windowed realized/implied variance measures,
//! chained search-volume attention indices, and HAR-style log-log
//! regressions with stationary-bootstrap inference.
//!
//! The pipeline runs from raw inputs to fitted models:
//!
//! 1. [`windowing`] lays an intraday window grid (default six 4-hour windows
//!    per day, UTC) over a date range, with trading-day vs. all-days scopes
//!    and the weekend lag rules connecting them.
//! 2. [`variance`] turns 5-minute prices into annualized realized variance
//!    per window; [`implied`] averages squared volatility quotes into
//!    implied variance; [`attention`] clamps, rescales and chains
//!    overlapping search-volume batches into category indices.
//! 3. [`model`] assembles design matrices for the specification ladder
//!    (autoregressive core + seasonal/onset interactions + optional
//!    attention and implied-volatility blocks) and fits them by OLS.
//! 4. [`inference`] attaches stationary-bootstrap p-values with automatic
//!    expected block length and checks residual serial dependence with an
//!    automatic portmanteau test.
//! 5. [`diagnostics`] produces descriptive tables and seeded synthetic
//!    datasets for end-to-end validation.

pub mod attention;
pub mod diagnostics;
pub mod error;
pub mod implied;
pub mod inference;
pub mod model;
pub mod variance;
pub mod windowing;

pub use error::{Error, ErrorKind, Result};
pub use windowing::{CalendarScope, Window, WindowGrid, WindowSeries};
