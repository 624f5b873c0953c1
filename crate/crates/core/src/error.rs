//! Crate-wide error type.
//!
//! Every failure carries enough context to name the offending input (line,
//! timestamp, column label, batch pair). [`Error::kind`] classifies errors as
//! validation vs. numerical so binaries can map them onto exit codes.

use chrono::{NaiveDate, NaiveDateTime};
use thiserror::Error;

/// Broad failure class. Validation covers malformed or insufficient input;
/// numerical covers failures of the estimation machinery itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    // ---- windowing ----
    #[error("window length must be one of 2, 3, 4 or 6 hours, got {0}")]
    InvalidWindowHours(u32),
    #[error("date range is reversed: {start} is after {end}")]
    ReversedDateRange { start: NaiveDate, end: NaiveDate },
    #[error("series has {got} values but the grid has {expected} windows in {scope} scope")]
    LengthMismatch {
        scope: &'static str,
        expected: usize,
        got: usize,
    },

    // ---- price / quote series ----
    #[error("non-positive price {value} at {timestamp}")]
    NonPositivePrice { value: f64, timestamp: NaiveDateTime },
    #[error("non-positive quote {value} at {timestamp}")]
    NonPositiveQuote { value: f64, timestamp: NaiveDateTime },
    #[error("timestamps not strictly increasing at position {position}")]
    UnorderedTimestamps { position: usize },
    #[error("non-finite value {value} at position {position}")]
    NonFiniteValue { value: f64, position: usize },
    #[error("need at least 2 prices in a window, got {got}")]
    InsufficientPrices { got: usize },
    #[error("series value at index {index} is not positive: {value}")]
    NonPositiveSeriesValue { index: usize, value: f64 },
    #[error("series value at index {index} is negative: {value}")]
    NegativeVariance { index: usize, value: f64 },
    #[error("unknown maturity label {0:?} (expected one of 1d, 1w, 2w, 3w, 1m, 3m)")]
    UnknownMaturity(String),

    // ---- attention batches ----
    #[error("search volume index {value} for term {term:?} is outside 0..=100")]
    BatchValueOutOfRange { term: String, value: u32 },
    #[error("batch for term {term:?} has {got} observations, the vendor maximum is {max}")]
    BatchTooLong { term: String, got: usize, max: usize },
    #[error("batch for term {term:?} is empty")]
    EmptyBatch { term: String },
    #[error("batch for term {term:?} has no value equal to 100 (vendor normalization missing)")]
    UnnormalizedBatch { term: String },
    #[error(
        "batches do not overlap: earlier spans {earlier_start}..{earlier_end}, \
         later spans {later_start}..{later_end}"
    )]
    EmptyOverlap {
        earlier_start: NaiveDateTime,
        earlier_end: NaiveDateTime,
        later_start: NaiveDateTime,
        later_end: NaiveDateTime,
    },
    #[error(
        "batches {first_index} and {second_index} for term {term:?} overlap {got}h, \
         expected exactly {expected}h"
    )]
    MisalignedBatches {
        term: String,
        first_index: usize,
        second_index: usize,
        expected: usize,
        got: usize,
    },
    #[error("batches for term {term:?} are not sorted by start time at position {position}")]
    UnsortedBatches { term: String, position: usize },
    #[error("category {0:?} has no member series")]
    EmptyCategory(String),
    #[error("chained series for term {term:?} has a non-positive value at {timestamp}")]
    NonPositiveChainedValue { term: String, timestamp: NaiveDateTime },

    // ---- model / design ----
    #[error("regressor column {label:?} has no usable observations")]
    AllMissingColumn { label: String },
    #[error("series for {label:?} must be on the {expected} calendar scope")]
    WrongScope {
        label: String,
        expected: &'static str,
    },
    #[error("design has {rows} rows but {cols} columns; need rows > columns")]
    TooFewRows { rows: usize, cols: usize },
    #[error("design matrix is rank deficient; collinear columns: {}", columns.join(", "))]
    RankDeficient { columns: Vec<String> },
    #[error("unknown model number {0} (expected 1..=7)")]
    UnknownModelNumber(u8),

    // ---- inference ----
    #[error("series too short for {what}: need at least {needed}, got {got}")]
    SeriesTooShort {
        what: &'static str,
        needed: usize,
        got: usize,
    },
    #[error("residual series is degenerate (zero variance proxy at lag {lag})")]
    DegenerateResiduals { lag: usize },
    #[error("bootstrap replication {replication} could not produce a full-rank design after {attempts} redraws")]
    BootstrapRedrawExhausted { replication: usize, attempts: usize },
    #[error("invalid bootstrap configuration: {0}")]
    InvalidBootstrapConfig(String),

    // ---- diagnostics / simulation ----
    #[error("autoregressive recursion is explosive in seasonal slot {slot}: |{coefficient}| >= 1")]
    ExplosiveConfig { slot: u8, coefficient: f64 },
    #[error("AR(1) persistence {0} is outside (-1, 1)")]
    InvalidPersistence(f64),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::RankDeficient { .. }
            | Error::DegenerateResiduals { .. }
            | Error::BootstrapRedrawExhausted { .. } => ErrorKind::Numerical,
            _ => ErrorKind::Validation,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
