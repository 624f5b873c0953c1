//! Window-averaged implied variance from quoted volatilities.
//!
//! OTC FX options are quoted directly as annualized implied volatilities.
//! The window measure squares each quote and averages across the window:
//! `IV = J^-1 * sum_j I_j^2`, which puts implied and realized measures on the
//! same (variance) scale. Quotes are already annualized; no horizon
//! adjustment is applied — in a log-log model a constant horizon factor is
//! absorbed by the intercept.

use chrono::NaiveDateTime;

use crate::error::{Error, Result};
use crate::windowing::{CalendarScope, WindowGrid, WindowSeries};

/// Option maturity bucket for quoted implied volatilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Maturity {
    OneDay,
    OneWeek,
    TwoWeeks,
    ThreeWeeks,
    OneMonth,
    ThreeMonths,
}

impl Maturity {
    pub const ALL: [Maturity; 6] = [
        Maturity::OneDay,
        Maturity::OneWeek,
        Maturity::TwoWeeks,
        Maturity::ThreeWeeks,
        Maturity::OneMonth,
        Maturity::ThreeMonths,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Maturity::OneDay => "1d",
            Maturity::OneWeek => "1w",
            Maturity::TwoWeeks => "2w",
            Maturity::ThreeWeeks => "3w",
            Maturity::OneMonth => "1m",
            Maturity::ThreeMonths => "3m",
        }
    }

    pub fn parse(label: &str) -> Result<Self> {
        Maturity::ALL
            .into_iter()
            .find(|m| m.label() == label)
            .ok_or_else(|| Error::UnknownMaturity(label.to_string()))
    }
}

impl Default for Maturity {
    /// Monthly at-the-money quotes are the modeled series.
    fn default() -> Self {
        Maturity::OneMonth
    }
}

/// Validated implied-volatility quote stream for one maturity.
#[derive(Debug, Clone, PartialEq)]
pub struct IvQuoteSeries {
    timestamps: Vec<NaiveDateTime>,
    quotes: Vec<f64>,
    maturity: Maturity,
}

impl IvQuoteSeries {
    pub fn new(
        timestamps: Vec<NaiveDateTime>,
        quotes: Vec<f64>,
        maturity: Maturity,
    ) -> Result<Self> {
        if timestamps.len() != quotes.len() {
            return Err(Error::LengthMismatch {
                scope: "quote timestamps",
                expected: timestamps.len(),
                got: quotes.len(),
            });
        }
        for (i, (&ts, &q)) in timestamps.iter().zip(&quotes).enumerate() {
            if !q.is_finite() {
                return Err(Error::NonFiniteValue { value: q, position: i });
            }
            if q <= 0.0 {
                return Err(Error::NonPositiveQuote { value: q, timestamp: ts });
            }
            if i > 0 && timestamps[i - 1] >= ts {
                return Err(Error::UnorderedTimestamps { position: i });
            }
        }
        Ok(IvQuoteSeries {
            timestamps,
            quotes,
            maturity,
        })
    }

    pub fn len(&self) -> usize {
        self.quotes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quotes.is_empty()
    }

    pub fn timestamps(&self) -> &[NaiveDateTime] {
        &self.timestamps
    }

    pub fn quotes(&self) -> &[f64] {
        &self.quotes
    }

    pub fn maturity(&self) -> Maturity {
        self.maturity
    }
}

/// Mean of squared quotes over one window; `None` when the window is empty.
pub fn window_iv(quotes: &[f64]) -> Option<f64> {
    if quotes.is_empty() {
        return None;
    }
    Some(quotes.iter().map(|q| q * q).sum::<f64>() / quotes.len() as f64)
}

/// Implied-variance series on the trading scope of `grid`.
///
/// Windows without quotes inherit the last quote of the same trading day
/// (OTC quotes persist intraday); across days they stay missing.
pub fn iv_series(grid: &WindowGrid, quotes: &IvQuoteSeries) -> WindowSeries {
    let n = grid.len(CalendarScope::TradingDays);
    let mut buckets: Vec<Vec<f64>> = vec![Vec::new(); n];
    for (&ts, &q) in quotes.timestamps().iter().zip(quotes.quotes()) {
        if let Some(idx) = grid.locate(CalendarScope::TradingDays, ts) {
            buckets[idx].push(q);
        }
    }
    let mut values: Vec<Option<f64>> = Vec::with_capacity(n);
    let mut last_quote: Option<(chrono::NaiveDate, f64)> = None;
    for (idx, bucket) in buckets.iter().enumerate() {
        let window = grid.window(CalendarScope::TradingDays, idx);
        match window_iv(bucket) {
            Some(v) => {
                last_quote = Some((window.date, *bucket.last().expect("non-empty bucket")));
                values.push(Some(v));
            }
            None => match last_quote {
                Some((date, q)) if date == window.date => values.push(Some(q * q)),
                _ => values.push(None),
            },
        }
    }
    WindowSeries::new(grid, CalendarScope::TradingDays, values).expect("bucket count matches grid")
}

/// Natural log of an implied-variance series; all present values must be
/// strictly positive.
pub fn log_iv(series: &WindowSeries) -> Result<WindowSeries> {
    for (i, v) in series.iter_present() {
        if v <= 0.0 {
            return Err(Error::NonPositiveSeriesValue { index: i, value: v });
        }
    }
    Ok(series.map(f64::ln))
}

/// First difference of a log implied-variance series within its own scope:
/// `dln IV_t = ln IV_t - ln IV_{t-1}`. The first window and any window whose
/// lag is missing produce a missing value.
pub fn diff_log_iv(log_series: &WindowSeries) -> WindowSeries {
    let values = (0..log_series.len())
        .map(|i| {
            let current = log_series.get(i)?;
            let previous = if i == 0 { None } else { log_series.get(i - 1) }?;
            Some(current - previous)
        })
        .collect();
    WindowSeries::from_parts(log_series.scope(), values)
}
