//! File ingestion: CSV readers with row-level error reporting.
//!
//! All timestamps are UTC. Accepted forms: RFC 3339 with a `Z` or `+00:00`
//! offset, or a bare `YYYY-MM-DDTHH:MM:SS` / `YYYY-MM-DD HH:MM:SS` treated
//! as UTC. Non-zero offsets are rejected.

use std::path::Path;

use chrono::{DateTime, NaiveDateTime};

use intravol::attention::RawBatch;
use intravol::implied::{IvQuoteSeries, Maturity};
use intravol::variance::PriceSeries;
use intravol::windowing::{CalendarScope, WindowGrid, WindowSeries};

use crate::error::{CliError, Result};

pub fn parse_timestamp(raw: &str) -> std::result::Result<NaiveDateTime, String> {
    if let Ok(dt) = DateTime::parse_from_rfc3339(raw) {
        if dt.offset().local_minus_utc() != 0 {
            return Err(format!("timestamp {raw:?} must be UTC"));
        }
        return Ok(dt.naive_utc());
    }
    NaiveDateTime::parse_from_str(raw, "%Y-%m-%dT%H:%M:%S")
        .or_else(|_| NaiveDateTime::parse_from_str(raw, "%Y-%m-%d %H:%M:%S"))
        .map_err(|_| format!("unrecognized timestamp {raw:?}"))
}

pub fn format_timestamp(ts: NaiveDateTime) -> String {
    ts.format("%Y-%m-%dT%H:%M:%SZ").to_string()
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> CliError {
    CliError::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

struct CsvRows {
    rows: Vec<(usize, Vec<String>)>,
}

fn read_csv(path: &Path, expected_headers: &[&str]) -> Result<CsvRows> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Parse {
            path: path.to_path_buf(),
            line: 0,
            message: e.to_string(),
        })?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| parse_error(path, 1, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if headers != expected_headers {
        return Err(parse_error(
            path,
            1,
            format!("expected header {expected_headers:?}, got {headers:?}"),
        ));
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2; // 1-based, after the header
        let record = record.map_err(|e| parse_error(path, line, e.to_string()))?;
        rows.push((line, record.iter().map(str::to_string).collect()));
    }
    Ok(CsvRows { rows })
}

/// `timestamp_utc,price` at a fixed intraday cadence.
pub fn read_prices(path: &Path) -> Result<PriceSeries> {
    let csv = read_csv(path, &["timestamp_utc", "price"])?;
    let mut timestamps = Vec::with_capacity(csv.rows.len());
    let mut prices = Vec::with_capacity(csv.rows.len());
    for (line, fields) in &csv.rows {
        let ts = parse_timestamp(&fields[0]).map_err(|m| parse_error(path, *line, m))?;
        let price: f64 = fields[1]
            .parse()
            .map_err(|_| parse_error(path, *line, format!("bad price {:?}", fields[1])))?;
        if price <= 0.0 || !price.is_finite() {
            return Err(parse_error(path, *line, format!("non-positive price {price}")));
        }
        if timestamps.last().is_some_and(|&prev| prev >= ts) {
            return Err(parse_error(path, *line, "timestamps must be strictly increasing"));
        }
        timestamps.push(ts);
        prices.push(price);
    }
    Ok(PriceSeries::new(timestamps, prices)?)
}

/// `timestamp_utc,maturity,quote`; only rows with the requested maturity are
/// kept.
pub fn read_iv(path: &Path, maturity: Maturity) -> Result<IvQuoteSeries> {
    let csv = read_csv(path, &["timestamp_utc", "maturity", "quote"])?;
    let mut timestamps = Vec::new();
    let mut quotes = Vec::new();
    for (line, fields) in &csv.rows {
        let row_maturity =
            Maturity::parse(&fields[1]).map_err(|e| parse_error(path, *line, e.to_string()))?;
        if row_maturity != maturity {
            continue;
        }
        let ts = parse_timestamp(&fields[0]).map_err(|m| parse_error(path, *line, m))?;
        let quote: f64 = fields[2]
            .parse()
            .map_err(|_| parse_error(path, *line, format!("bad quote {:?}", fields[2])))?;
        if quote <= 0.0 || !quote.is_finite() {
            return Err(parse_error(path, *line, format!("non-positive quote {quote}")));
        }
        if timestamps.last().is_some_and(|&prev| prev >= ts) {
            return Err(parse_error(path, *line, "timestamps must be strictly increasing"));
        }
        timestamps.push(ts);
        quotes.push(quote);
    }
    Ok(IvQuoteSeries::new(timestamps, quotes, maturity)?)
}

/// One batch file: `term,timestamp_utc,value` with consecutive hourly rows,
/// a single term per file, integer values in 0..=100.
pub fn read_batch(path: &Path, expected_term: &str) -> Result<RawBatch> {
    let csv = read_csv(path, &["term", "timestamp_utc", "value"])?;
    if csv.rows.is_empty() {
        return Err(parse_error(path, 2, "batch file has no rows"));
    }
    let mut start = None;
    let mut values = Vec::with_capacity(csv.rows.len());
    for (i, (line, fields)) in csv.rows.iter().enumerate() {
        if fields[0] != expected_term {
            return Err(parse_error(
                path,
                *line,
                format!("expected term {expected_term:?}, found {:?}", fields[0]),
            ));
        }
        let ts = parse_timestamp(&fields[1]).map_err(|m| parse_error(path, *line, m))?;
        match start {
            None => start = Some(ts),
            Some(first) => {
                let expected = first + chrono::Duration::hours(i as i64);
                if ts != expected {
                    return Err(parse_error(
                        path,
                        *line,
                        format!("expected hourly timestamp {expected}, got {ts}"),
                    ));
                }
            }
        }
        let value: u32 = fields[2]
            .parse()
            .map_err(|_| parse_error(path, *line, format!("bad search volume {:?}", fields[2])))?;
        if value > 100 {
            return Err(parse_error(path, *line, format!("search volume {value} outside 0..=100")));
        }
        values.push(value);
    }
    Ok(RawBatch::clamp(
        expected_term,
        start.expect("non-empty batch"),
        values,
    )?)
}

/// `start_utc,value` keyed by window start; empty value means missing. Every
/// in-scope grid window must appear exactly once, in order.
pub fn read_window_series(
    path: &Path,
    grid: &WindowGrid,
    scope: CalendarScope,
) -> Result<WindowSeries> {
    let csv = read_csv(path, &["start_utc", "value"])?;
    if csv.rows.len() != grid.len(scope) {
        return Err(parse_error(
            path,
            1,
            format!(
                "expected {} rows for the {} scope, found {}",
                grid.len(scope),
                scope.label(),
                csv.rows.len()
            ),
        ));
    }
    let mut values = Vec::with_capacity(csv.rows.len());
    for (index, (line, fields)) in csv.rows.iter().enumerate() {
        let ts = parse_timestamp(&fields[0]).map_err(|m| parse_error(path, *line, m))?;
        let expected = grid.window(scope, index).start;
        if ts != expected {
            return Err(parse_error(
                path,
                *line,
                format!("expected window start {expected}, got {ts}"),
            ));
        }
        if fields[1].is_empty() {
            values.push(None);
        } else {
            let v: f64 = fields[1]
                .parse()
                .map_err(|_| parse_error(path, *line, format!("bad value {:?}", fields[1])))?;
            values.push(Some(v));
        }
    }
    Ok(WindowSeries::new(grid, scope, values)?)
}

/// Writes a window series in the `start_utc,value` format read back by
/// [`read_window_series`].
pub fn write_window_series(
    path: &Path,
    grid: &WindowGrid,
    scope: CalendarScope,
    series: &WindowSeries,
) -> Result<()> {
    let mut out = String::from("start_utc,value\n");
    for (index, value) in series.values().iter().enumerate() {
        let start = grid.window(scope, index).start;
        match value {
            Some(v) => out.push_str(&format!("{},{}\n", format_timestamp(start), v)),
            None => out.push_str(&format!("{},\n", format_timestamp(start))),
        }
    }
    std::fs::write(path, out).map_err(CliError::io(path))?;
    Ok(())
}

/// A plain value series for `diagnose`: either `value` rows or
/// `start_utc,value` / `timestamp_utc,value` rows; missing values skipped.
pub fn read_value_series(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    let mut values = Vec::new();
    for (i, raw_line) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw_line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let field = trimmed.rsplit(',').next().unwrap_or(trimmed).trim();
        if i == 0 && field.parse::<f64>().is_err() {
            continue; // header
        }
        if field.is_empty() {
            continue;
        }
        let v: f64 = field
            .parse()
            .map_err(|_| parse_error(path, line, format!("bad value {field:?}")))?;
        values.push(v);
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn well_formed_price_file_parses() {
        let f = write_temp(
            "timestamp_utc,price\n\
             2021-12-01T00:00:00Z,73.25\n\
             2021-12-01T00:05:00Z,73.30\n\
             2021-12-01T00:10:00Z,73.28\n",
        );
        let series = read_prices(f.path()).unwrap();
        assert_eq!(series.len(), 3);
        assert_eq!(series.prices()[1], 73.30);
    }

    #[test]
    fn negative_price_names_the_line() {
        let f = write_temp(
            "timestamp_utc,price\n\
             2021-12-01T00:00:00Z,73.25\n\
             2021-12-01T00:05:00Z,-1.0\n",
        );
        match read_prices(f.path()) {
            Err(CliError::Parse { line, message, .. }) => {
                assert_eq!(line, 3);
                assert!(message.contains("non-positive"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn non_utc_offset_is_rejected() {
        let f = write_temp(
            "timestamp_utc,price\n\
             2021-12-01T00:00:00+03:00,73.25\n",
        );
        match read_prices(f.path()) {
            Err(CliError::Parse { line: 2, message, .. }) => assert!(message.contains("UTC")),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn iv_reader_filters_maturity() {
        let f = write_temp(
            "timestamp_utc,maturity,quote\n\
             2021-12-01T00:00:00Z,1m,22.5\n\
             2021-12-01T00:00:00Z,3m,21.0\n\
             2021-12-01T00:05:00Z,1m,22.7\n",
        );
        let series = read_iv(f.path(), Maturity::OneMonth).unwrap();
        assert_eq!(series.len(), 2);
        assert_eq!(series.quotes(), &[22.5, 22.7]);
    }

    #[test]
    fn batch_reader_checks_hourly_cadence_and_term() {
        let good = write_temp(
            "term,timestamp_utc,value\n\
             vix,2021-12-01T00:00:00Z,0\n\
             vix,2021-12-01T01:00:00Z,50\n\
             vix,2021-12-01T02:00:00Z,100\n",
        );
        let batch = read_batch(good.path(), "vix").unwrap();
        assert_eq!(batch.values(), &[1, 50, 100]);

        let gap = write_temp(
            "term,timestamp_utc,value\n\
             vix,2021-12-01T00:00:00Z,100\n\
             vix,2021-12-01T02:00:00Z,50\n",
        );
        assert!(matches!(
            read_batch(gap.path(), "vix"),
            Err(CliError::Parse { line: 3, .. })
        ));

        let wrong_term = write_temp(
            "term,timestamp_utc,value\n\
             spx,2021-12-01T00:00:00Z,100\n",
        );
        assert!(read_batch(wrong_term.path(), "vix").is_err());
    }

    #[test]
    fn window_series_round_trips() {
        let grid = WindowGrid::build(
            chrono::NaiveDate::from_ymd_opt(2022, 2, 21).unwrap(),
            chrono::NaiveDate::from_ymd_opt(2022, 2, 21).unwrap(),
            4,
        )
        .unwrap();
        let series = WindowSeries::new(
            &grid,
            CalendarScope::TradingDays,
            vec![Some(1.5), None, Some(-0.25), Some(3.0), None, Some(0.125)],
        )
        .unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        write_window_series(f.path(), &grid, CalendarScope::TradingDays, &series).unwrap();
        let back = read_window_series(f.path(), &grid, CalendarScope::TradingDays).unwrap();
        assert_eq!(series, back);
    }

    #[test]
    fn value_series_accepts_plain_and_csv_layouts() {
        let plain = write_temp("0.5\n-0.25\n1.0\n");
        assert_eq!(read_value_series(plain.path()).unwrap(), vec![0.5, -0.25, 1.0]);
        let csv = write_temp("start_utc,value\n2022-01-01T00:00:00Z,0.5\n2022-01-01T04:00:00Z,1.5\n");
        assert_eq!(read_value_series(csv.path()).unwrap(), vec![0.5, 1.5]);
    }
}
