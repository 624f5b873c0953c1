//! Intraday window grid, trading calendar, and lag alignment.
//!
//! The 24-hour day is split into `w = 24 / window_hours` consecutive windows.
//! Slot 1 always starts at 00:00 UTC. Price and implied-volatility series
//! exist on weekdays only (trading scope); search-volume attention exists on
//! all seven days (all-days scope). The grid owns the mapping between the two
//! index spaces and the lag rules across weekend boundaries: in trading scope
//! the lag of Monday's first window is Friday's last, in all-days scope it is
//! Sunday's last.

use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime, Weekday};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Window lengths that divide the day evenly, in hours.
pub const VALID_WINDOW_HOURS: [u32; 4] = [2, 3, 4, 6];

/// Default window length in hours.
pub const DEFAULT_WINDOW_HOURS: u32 = 4;

/// Which calendar a series lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalendarScope {
    /// Monday through Friday only (prices, implied volatility).
    TradingDays,
    /// All seven days (search-volume attention).
    AllDays,
}

impl CalendarScope {
    pub fn label(self) -> &'static str {
        match self {
            CalendarScope::TradingDays => "trading_days",
            CalendarScope::AllDays => "all_days",
        }
    }
}

/// One intraday window. `slot` is the window-of-day label `j` in `1..=w`;
/// `end` is exclusive and may fall on the next calendar day (the last slot
/// ends at 24:00, represented as 00:00 of the following day).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    pub date: NaiveDate,
    pub slot: u8,
    pub start: NaiveDateTime,
    pub end: NaiveDateTime,
}

pub fn is_trading_day(date: NaiveDate) -> bool {
    !matches!(date.weekday(), Weekday::Sat | Weekday::Sun)
}

/// The ordered sequence of intraday windows over an inclusive date range.
///
/// Construction is a pure function of `(start_date, end_date, window_hours)`.
/// Immutable after construction; safe to share across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowGrid {
    window_hours: u32,
    start_date: NaiveDate,
    end_date: NaiveDate,
    windows: Vec<Window>,
    trading_to_all: Vec<usize>,
    all_to_trading: Vec<Option<usize>>,
}

impl WindowGrid {
    /// Builds the grid covering every day from `start_date` to `end_date`
    /// inclusive. Windows never extend past the end date's 24:00.
    pub fn build(start_date: NaiveDate, end_date: NaiveDate, window_hours: u32) -> Result<Self> {
        if !VALID_WINDOW_HOURS.contains(&window_hours) {
            return Err(Error::InvalidWindowHours(window_hours));
        }
        if start_date > end_date {
            return Err(Error::ReversedDateRange {
                start: start_date,
                end: end_date,
            });
        }
        let per_day = 24 / window_hours;
        let mut windows = Vec::new();
        let mut trading_to_all = Vec::new();
        let mut all_to_trading = Vec::new();
        let mut date = start_date;
        while date <= end_date {
            let trading = is_trading_day(date);
            let midnight = date.and_hms_opt(0, 0, 0).expect("valid midnight");
            for slot in 0..per_day {
                let start = midnight + Duration::hours(i64::from(slot * window_hours));
                let end = start + Duration::hours(i64::from(window_hours));
                let all_index = windows.len();
                if trading {
                    all_to_trading.push(Some(trading_to_all.len()));
                    trading_to_all.push(all_index);
                } else {
                    all_to_trading.push(None);
                }
                windows.push(Window {
                    date,
                    slot: (slot + 1) as u8,
                    start,
                    end,
                });
            }
            date = date.succ_opt().expect("date within chrono range");
        }
        Ok(WindowGrid {
            window_hours,
            start_date,
            end_date,
            windows,
            trading_to_all,
            all_to_trading,
        })
    }

    pub fn window_hours(&self) -> u32 {
        self.window_hours
    }

    pub fn windows_per_day(&self) -> u32 {
        24 / self.window_hours
    }

    pub fn start_date(&self) -> NaiveDate {
        self.start_date
    }

    pub fn end_date(&self) -> NaiveDate {
        self.end_date
    }

    /// Number of windows in the given scope.
    pub fn len(&self, scope: CalendarScope) -> usize {
        match scope {
            CalendarScope::TradingDays => self.trading_to_all.len(),
            CalendarScope::AllDays => self.windows.len(),
        }
    }

    pub fn is_empty(&self, scope: CalendarScope) -> bool {
        self.len(scope) == 0
    }

    /// Window at a scope-local index. Panics if out of range, like slice
    /// indexing.
    pub fn window(&self, scope: CalendarScope, index: usize) -> &Window {
        match scope {
            CalendarScope::TradingDays => &self.windows[self.trading_to_all[index]],
            CalendarScope::AllDays => &self.windows[index],
        }
    }

    pub fn iter(&self, scope: CalendarScope) -> impl Iterator<Item = &Window> + '_ {
        (0..self.len(scope)).map(move |i| self.window(scope, i))
    }

    /// All-days index of a trading-scope window.
    pub fn to_all_days(&self, trading_index: usize) -> usize {
        self.trading_to_all[trading_index]
    }

    /// Trading-scope index of an all-days window, if it falls on a weekday.
    pub fn to_trading(&self, all_index: usize) -> Option<usize> {
        self.all_to_trading[all_index]
    }

    /// Index (in `scope`) of the window lagging trading window `trading_index`.
    ///
    /// For `TradingDays` the lag skips the weekend (Monday slot 1 lags to
    /// Friday's last slot); for `AllDays` it is the immediately preceding
    /// calendar window (Sunday's last slot for Monday slot 1). Returns `None`
    /// at the start of the sample, where no lag exists.
    pub fn lag_window(&self, trading_index: usize, scope: CalendarScope) -> Option<usize> {
        match scope {
            CalendarScope::TradingDays => trading_index.checked_sub(1),
            CalendarScope::AllDays => self.trading_to_all[trading_index].checked_sub(1),
        }
    }

    /// Scope-local index of the window containing `timestamp`, if any.
    pub fn locate(&self, scope: CalendarScope, timestamp: NaiveDateTime) -> Option<usize> {
        if self.windows.is_empty() {
            return None;
        }
        let first = &self.windows[0];
        if timestamp < first.start {
            return None;
        }
        let hours = timestamp.signed_duration_since(first.start).num_hours();
        let all_index = usize::try_from(hours / i64::from(self.window_hours)).ok()?;
        if all_index >= self.windows.len() {
            return None;
        }
        debug_assert!(
            self.windows[all_index].start <= timestamp && timestamp < self.windows[all_index].end
        );
        match scope {
            CalendarScope::AllDays => Some(all_index),
            CalendarScope::TradingDays => self.all_to_trading[all_index],
        }
    }
}

/// One optional value per grid window in a given scope. Missing values are
/// explicit and never imputed.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowSeries {
    scope: CalendarScope,
    values: Vec<Option<f64>>,
}

impl WindowSeries {
    pub fn new(grid: &WindowGrid, scope: CalendarScope, values: Vec<Option<f64>>) -> Result<Self> {
        let expected = grid.len(scope);
        if values.len() != expected {
            return Err(Error::LengthMismatch {
                scope: scope.label(),
                expected,
                got: values.len(),
            });
        }
        Ok(WindowSeries { scope, values })
    }

    pub fn missing(grid: &WindowGrid, scope: CalendarScope) -> Self {
        WindowSeries {
            scope,
            values: vec![None; grid.len(scope)],
        }
    }

    /// Length-preserving rebuild for transforms that already hold a series of
    /// the right length; skips the grid check.
    pub(crate) fn from_parts(scope: CalendarScope, values: Vec<Option<f64>>) -> Self {
        WindowSeries { scope, values }
    }

    pub fn from_fn(
        grid: &WindowGrid,
        scope: CalendarScope,
        mut f: impl FnMut(usize, &Window) -> Option<f64>,
    ) -> Self {
        let values = (0..grid.len(scope))
            .map(|i| f(i, grid.window(scope, i)))
            .collect();
        WindowSeries { scope, values }
    }

    pub fn scope(&self) -> CalendarScope {
        self.scope
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<f64> {
        self.values.get(index).copied().flatten()
    }

    pub fn set(&mut self, index: usize, value: Option<f64>) {
        self.values[index] = value;
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn present_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    /// Elementwise map over present values; missing propagates.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        WindowSeries {
            scope: self.scope,
            values: self.values.iter().map(|v| v.map(&f)).collect(),
        }
    }

    pub fn iter_present(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|x| (i, x)))
    }
}
