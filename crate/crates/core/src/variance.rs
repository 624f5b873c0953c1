//! Annualized realized variance from intraday prices.
//!
//! For the prices `P_1..P_J` observed inside one trading window, the
//! annualized realized variance is
//!
//! ```text
//! V = 252 * w * sum_{j=2..J} (100 * (ln P_j - ln P_{j-1}))^2
//! ```
//!
//! where `w` is the number of windows per day. Returns spanning a window
//! boundary are excluded: the sum restarts inside each window, so the
//! window-crossing return is discarded.

use chrono::NaiveDateTime;

use crate::error::{Error, Result};
use crate::windowing::{CalendarScope, WindowGrid, WindowSeries};

/// Trading days per year used in annualization.
pub const ANNUAL_TRADING_DAYS: f64 = 252.0;

/// Default intraday sampling interval.
pub const DEFAULT_SAMPLE_MINUTES: u32 = 5;

/// Default minimum fraction of expected samples a window must contain.
pub const DEFAULT_MIN_COVERAGE: f64 = 0.8;

/// Validated intraday price series: strictly increasing UTC timestamps,
/// strictly positive prices.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    timestamps: Vec<NaiveDateTime>,
    prices: Vec<f64>,
}

impl PriceSeries {
    pub fn new(timestamps: Vec<NaiveDateTime>, prices: Vec<f64>) -> Result<Self> {
        if timestamps.len() != prices.len() {
            return Err(Error::LengthMismatch {
                scope: "price timestamps",
                expected: timestamps.len(),
                got: prices.len(),
            });
        }
        for (i, (&ts, &p)) in timestamps.iter().zip(&prices).enumerate() {
            if !p.is_finite() {
                return Err(Error::NonFiniteValue { value: p, position: i });
            }
            if p <= 0.0 {
                return Err(Error::NonPositivePrice { value: p, timestamp: ts });
            }
            if i > 0 && timestamps[i - 1] >= ts {
                return Err(Error::UnorderedTimestamps { position: i });
            }
        }
        Ok(PriceSeries { timestamps, prices })
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }

    pub fn timestamps(&self) -> &[NaiveDateTime] {
        &self.timestamps
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }
}

/// Options for building a realized-variance series from prices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RvOptions {
    pub sample_minutes: u32,
    /// Windows with fewer than this fraction of expected samples are marked
    /// missing rather than computed from sparse data.
    pub min_coverage: f64,
}

impl Default for RvOptions {
    fn default() -> Self {
        RvOptions {
            sample_minutes: DEFAULT_SAMPLE_MINUTES,
            min_coverage: DEFAULT_MIN_COVERAGE,
        }
    }
}

/// Annualized realized variance of the prices observed in one window.
///
/// Requires at least two strictly positive prices.
pub fn realized_variance(window_prices: &[f64], windows_per_day: u32) -> Result<f64> {
    if window_prices.len() < 2 {
        return Err(Error::InsufficientPrices {
            got: window_prices.len(),
        });
    }
    for (i, &p) in window_prices.iter().enumerate() {
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::NonPositiveSeriesValue { index: i, value: p });
        }
    }
    let sum: f64 = window_prices
        .windows(2)
        .map(|pair| {
            let r = 100.0 * (pair[1].ln() - pair[0].ln());
            r * r
        })
        .sum();
    Ok(ANNUAL_TRADING_DAYS * f64::from(windows_per_day) * sum)
}

/// Realized-variance series on the trading scope of `grid`.
///
/// A window is missing when it holds fewer than two prices or less than
/// `min_coverage` of its expected sample count.
pub fn rv_series(grid: &WindowGrid, prices: &PriceSeries, options: &RvOptions) -> WindowSeries {
    let expected = f64::from(grid.window_hours() * 60 / options.sample_minutes);
    let per_day = grid.windows_per_day();
    let mut buckets: Vec<Vec<f64>> = vec![Vec::new(); grid.len(CalendarScope::TradingDays)];
    for (&ts, &p) in prices.timestamps().iter().zip(prices.prices()) {
        if let Some(idx) = grid.locate(CalendarScope::TradingDays, ts) {
            buckets[idx].push(p);
        }
    }
    let values = buckets
        .into_iter()
        .map(|bucket| {
            if bucket.len() < 2 || (bucket.len() as f64) < options.min_coverage * expected {
                return None;
            }
            realized_variance(&bucket, per_day).ok()
        })
        .collect();
    // Lengths match by construction.
    WindowSeries::new(grid, CalendarScope::TradingDays, values).expect("bucket count matches grid")
}

/// A log-transformed series together with the windows that could not be
/// logged because their value was zero.
#[derive(Debug, Clone, PartialEq)]
pub struct LogSeries {
    pub series: WindowSeries,
    /// Indices of zero-valued windows marked missing by the transform.
    pub zero_windows: Vec<usize>,
}

/// Natural log of a realized-variance series. Zero-variance windows are
/// marked missing and reported; negative values are rejected.
pub fn log_rv(series: &WindowSeries) -> Result<LogSeries> {
    let mut zero_windows = Vec::new();
    let mut values = Vec::with_capacity(series.len());
    for (i, v) in series.values().iter().enumerate() {
        match v {
            None => values.push(None),
            Some(x) if *x < 0.0 => {
                return Err(Error::NegativeVariance { index: i, value: *x });
            }
            Some(x) if *x == 0.0 => {
                zero_windows.push(i);
                values.push(None);
            }
            Some(x) => values.push(Some(x.ln())),
        }
    }
    Ok(LogSeries {
        series: WindowSeries::from_parts(series.scope(), values),
        zero_windows,
    })
}

/// Annualized volatility implied by a log realized-variance value:
/// `sqrt(exp(x))`.
pub fn annualized_volatility(ln_rv: f64) -> f64 {
    (0.5 * ln_rv).exp()
}
