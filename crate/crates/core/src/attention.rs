//! Search-volume attention: batch clamping, rescale-and-chain, window
//! averages, and category indices.
//!
//! The vendor serves hourly search-volume indices as integers on a 1..100
//! scale, normalized so each downloaded batch has its own maximum at 100 and
//! at most 270 observations. Long series are assembled from overlapping
//! batches: per-hour ratios `later / earlier` are computed on the overlap,
//! the earlier series is rescaled by the *maximum* ratio (integer rounding
//! biases individual ratios downward, most severely for small indices), the
//! overlap keeps the later batch's values, and the later tail is appended.
//! Chained values are real-valued after the first rescale; the vendor's
//! rounding is not re-imposed.

use chrono::{Duration, NaiveDateTime};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::windowing::{CalendarScope, WindowGrid, WindowSeries};

/// Vendor cap on observations per batch.
pub const MAX_BATCH_LEN: usize = 270;

/// Default batch span in days.
pub const DEFAULT_BATCH_SPAN_DAYS: u32 = 4;

/// Default overlap between consecutive batches, in hours (one day).
pub const DEFAULT_OVERLAP_HOURS: usize = 24;

/// Trailing window of the smoothed attention regressor: six windows, one
/// trading day on the default grid.
pub const MA_WINDOW: usize = 6;

/// Attention category an index belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    GeneralMarket,
    Ruble,
    RussianEconomy,
}

impl Category {
    pub const ALL: [Category; 3] = [
        Category::GeneralMarket,
        Category::Ruble,
        Category::RussianEconomy,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Category::GeneralMarket => "general_market",
            Category::Ruble => "ruble",
            Category::RussianEconomy => "russian_economy",
        }
    }
}

/// Default search-term sets per category.
pub fn default_terms(category: Category) -> &'static [&'static str] {
    match category {
        Category::GeneralMarket => &[
            "S&P 500",
            "VIX",
            "stock market",
            "FX market",
            "dow jones",
            "nasdaq",
            "nyse",
        ],
        Category::Ruble => &[
            "ruble",
            "usd rub",
            "eur rub",
            "btc rub",
            "Russian central bank",
            "Russian interest rate",
        ],
        Category::RussianEconomy => &[
            "economic sanctions",
            "Vnesheconombank",
            "Promsvyazbank",
            "VTB Bank",
            "Sberbank",
            "Alfa Bank",
            "Rossiya Bank",
            "SWFIT Russia",
            "asset freeze",
            "Nord Stream 2",
            "export controls",
            "Moscow stock exchange",
            "currency control",
            "fx reserves",
            "Maersk Russia",
            "British Petroleum Russia",
            "Ikea Russia",
            "Apple Russia",
            "Disney Russia",
            "Equinor Russia",
            "Exxon Russia",
            "Shell Russia",
            "Mastercard Russia",
            "Boeing Russia",
            "Airbus Russia",
            "American Express Russia",
            "Dell Russia",
            "Ford Russia",
            "Google Russia",
            "Airbnb Russia",
            "Meta Russia",
            "HM Russia",
            "McDonalds Russia",
            "Nike Russia",
            "Visa Russia",
        ],
    }
}

/// One downloaded batch: consecutive hourly integer indices after clamping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawBatch {
    term: String,
    start: NaiveDateTime,
    values: Vec<u32>,
}

impl RawBatch {
    /// Validates a raw download and clamps zeros up to 1. Values outside
    /// 0..=100, empty or over-long batches, and batches without the vendor's
    /// 100-normalization are rejected.
    pub fn clamp(term: impl Into<String>, start: NaiveDateTime, raw: Vec<u32>) -> Result<Self> {
        let term = term.into();
        if raw.is_empty() {
            return Err(Error::EmptyBatch { term });
        }
        if raw.len() > MAX_BATCH_LEN {
            return Err(Error::BatchTooLong {
                term,
                got: raw.len(),
                max: MAX_BATCH_LEN,
            });
        }
        if let Some(&bad) = raw.iter().find(|&&v| v > 100) {
            return Err(Error::BatchValueOutOfRange { term, value: bad });
        }
        if !raw.contains(&100) {
            return Err(Error::UnnormalizedBatch { term });
        }
        let values = raw.into_iter().map(|v| v.max(1)).collect();
        Ok(RawBatch { term, start, values })
    }

    pub fn term(&self) -> &str {
        &self.term
    }

    pub fn start(&self) -> NaiveDateTime {
        self.start
    }

    /// Exclusive end: one hour past the last observation.
    pub fn end(&self) -> NaiveDateTime {
        self.start + Duration::hours(self.values.len() as i64)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn hour(&self, index: usize) -> NaiveDateTime {
        self.start + Duration::hours(index as i64)
    }
}

impl From<&RawBatch> for ChainedSeries {
    fn from(batch: &RawBatch) -> Self {
        ChainedSeries {
            term: batch.term.clone(),
            start: batch.start,
            values: batch.values.iter().map(|&v| f64::from(v)).collect(),
        }
    }
}

/// A gapless hourly series of positive reals, the result of chaining one or
/// more batches.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainedSeries {
    term: String,
    start: NaiveDateTime,
    values: Vec<f64>,
}

impl ChainedSeries {
    pub fn new(term: impl Into<String>, start: NaiveDateTime, values: Vec<f64>) -> Result<Self> {
        let term = term.into();
        if values.is_empty() {
            return Err(Error::EmptyBatch { term });
        }
        for (i, &v) in values.iter().enumerate() {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::NonPositiveChainedValue {
                    term,
                    timestamp: start + Duration::hours(i as i64),
                });
            }
        }
        Ok(ChainedSeries { term, start, values })
    }

    pub fn term(&self) -> &str {
        &self.term
    }

    pub fn start(&self) -> NaiveDateTime {
        self.start
    }

    pub fn end(&self) -> NaiveDateTime {
        self.start + Duration::hours(self.values.len() as i64)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn hour(&self, index: usize) -> NaiveDateTime {
        self.start + Duration::hours(index as i64)
    }

    /// Value at an hourly timestamp inside the span, if aligned to the hour.
    pub fn value_at(&self, ts: NaiveDateTime) -> Option<f64> {
        let hours = ts.signed_duration_since(self.start).num_hours();
        if ts != self.start + Duration::hours(hours) {
            return None;
        }
        usize::try_from(hours).ok().and_then(|i| self.values.get(i).copied())
    }
}

/// Chains a later batch onto an earlier series (see module docs for the
/// rescaling rule). Fails if the spans share no hourly timestamp.
pub fn chain_pair(earlier: &ChainedSeries, later: &RawBatch) -> Result<ChainedSeries> {
    chain_series(earlier, &ChainedSeries::from(later))
}

/// Real-valued core of [`chain_pair`]; also the entry point for chaining
/// already-rescaled series.
pub fn chain_series(earlier: &ChainedSeries, later: &ChainedSeries) -> Result<ChainedSeries> {
    let overlap_start = earlier.start.max(later.start);
    let overlap_end = earlier.end().min(later.end());
    if overlap_start >= overlap_end {
        return Err(Error::EmptyOverlap {
            earlier_start: earlier.start,
            earlier_end: earlier.end(),
            later_start: later.start,
            later_end: later.end(),
        });
    }
    let overlap_hours = overlap_end.signed_duration_since(overlap_start).num_hours() as usize;
    let mut constant = f64::NEG_INFINITY;
    for k in 0..overlap_hours {
        let ts = overlap_start + Duration::hours(k as i64);
        let e = earlier.value_at(ts).expect("overlap inside earlier span");
        let l = later.value_at(ts).expect("overlap inside later span");
        constant = constant.max(l / e);
    }

    let start = earlier.start.min(later.start);
    let end = earlier.end().max(later.end());
    let total = end.signed_duration_since(start).num_hours() as usize;
    let mut values = Vec::with_capacity(total);
    for k in 0..total {
        let ts = start + Duration::hours(k as i64);
        // The later batch wins wherever it is defined; elsewhere the earlier
        // series is rescaled onto the later batch's scale.
        let v = match later.value_at(ts) {
            Some(l) => l,
            None => constant * earlier.value_at(ts).expect("union span covered"),
        };
        values.push(v);
    }
    ChainedSeries::new(earlier.term.clone(), start, values)
}

/// Left fold of [`chain_pair`] over batches sorted by start time. Each
/// consecutive pair must overlap exactly `overlap_hours`.
pub fn chain_all(batches: &[RawBatch], overlap_hours: usize) -> Result<ChainedSeries> {
    let first = batches.first().ok_or_else(|| Error::EmptyBatch {
        term: String::from("<no batches>"),
    })?;
    for (i, pair) in batches.windows(2).enumerate() {
        if pair[1].start < pair[0].start {
            return Err(Error::UnsortedBatches {
                term: first.term.clone(),
                position: i + 1,
            });
        }
        let got = pair[0]
            .end()
            .signed_duration_since(pair[1].start)
            .num_hours()
            .max(0) as usize;
        let got = got.min(pair[1].len());
        if got != overlap_hours {
            return Err(Error::MisalignedBatches {
                term: first.term.clone(),
                first_index: i,
                second_index: i + 1,
                expected: overlap_hours,
                got,
            });
        }
    }
    let mut acc = ChainedSeries::from(first);
    for later in &batches[1..] {
        acc = chain_pair(&acc, later)?;
    }
    Ok(acc)
}

/// Arithmetic mean of the hourly values inside each all-days window. Windows
/// with some hours missing average over the available ones; windows with no
/// coverage are missing.
pub fn window_average(grid: &WindowGrid, series: &ChainedSeries) -> WindowSeries {
    WindowSeries::from_fn(grid, CalendarScope::AllDays, |_, window| {
        let mut sum = 0.0;
        let mut count = 0usize;
        let mut ts = window.start;
        while ts < window.end {
            if let Some(v) = series.value_at(ts) {
                sum += v;
                count += 1;
            }
            ts += Duration::hours(1);
        }
        (count > 0).then(|| sum / count as f64)
    })
}

/// Equal-weighted mean across member term series, per window. A window is
/// missing unless every member is present, keeping the index comparable
/// across windows.
pub fn aggregate_category(
    grid: &WindowGrid,
    category: Category,
    members: &[WindowSeries],
) -> Result<WindowSeries> {
    if members.is_empty() {
        return Err(Error::EmptyCategory(category.label().to_string()));
    }
    for member in members {
        if member.len() != grid.len(CalendarScope::AllDays) {
            return Err(Error::LengthMismatch {
                scope: CalendarScope::AllDays.label(),
                expected: grid.len(CalendarScope::AllDays),
                got: member.len(),
            });
        }
    }
    let n = grid.len(CalendarScope::AllDays);
    let values = (0..n)
        .map(|i| {
            let mut sum = 0.0;
            for member in members {
                sum += member.get(i)?;
            }
            Some(sum / members.len() as f64)
        })
        .collect();
    WindowSeries::new(grid, CalendarScope::AllDays, values)
}

/// Natural log of a category index; present values must be positive.
pub fn log_attention(index: &WindowSeries) -> Result<WindowSeries> {
    for (i, v) in index.iter_present() {
        if v <= 0.0 {
            return Err(Error::NonPositiveSeriesValue { index: i, value: v });
        }
    }
    Ok(index.map(f64::ln))
}

/// Log of the trailing six-window moving average of a category index — a
/// one-day smoothing on the default grid. Windows without six consecutive
/// present values are missing.
pub fn ma6_log_attention(index: &WindowSeries) -> Result<WindowSeries> {
    for (i, v) in index.iter_present() {
        if v <= 0.0 {
            return Err(Error::NonPositiveSeriesValue { index: i, value: v });
        }
    }
    let values = (0..index.len())
        .map(|i| {
            if i + 1 < MA_WINDOW {
                return None;
            }
            let mut sum = 0.0;
            for k in 0..MA_WINDOW {
                sum += index.get(i - k)?;
            }
            Some((sum / MA_WINDOW as f64).ln())
        })
        .collect();
    Ok(WindowSeries::from_parts(index.scope(), values))
}
