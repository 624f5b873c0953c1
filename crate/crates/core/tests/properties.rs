//! Cross-module invariants, checked on generated inputs.

use chrono::{Duration, NaiveDate, NaiveDateTime};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use intravol::attention::{
    aggregate_category, chain_all, chain_series, window_average, Category, ChainedSeries, RawBatch,
};
use intravol::implied::{diff_log_iv, log_iv, window_iv};
use intravol::variance::realized_variance;
use intravol::windowing::{CalendarScope, WindowGrid, WindowSeries};

fn hour0() -> NaiveDateTime {
    NaiveDate::from_ymd_opt(2022, 1, 3)
        .unwrap()
        .and_hms_opt(0, 0, 0)
        .unwrap()
}

// ---------------------------------------------------------------------------
// windowing
// ---------------------------------------------------------------------------

proptest! {
    #[test]
    fn window_containing_timestamp_spans_it(
        day_offset in 0i64..60,
        minute in 0i64..(60 * 24),
        hours in prop::sample::select(vec![2u32, 3, 4, 6]),
    ) {
        let grid = WindowGrid::build(
            NaiveDate::from_ymd_opt(2022, 1, 1).unwrap(),
            NaiveDate::from_ymd_opt(2022, 3, 1).unwrap(),
            hours,
        ).unwrap();
        let ts = hour0() + Duration::days(day_offset) + Duration::minutes(minute);
        if let Some(idx) = grid.locate(CalendarScope::AllDays, ts) {
            let w = grid.window(CalendarScope::AllDays, idx);
            prop_assert!(w.start <= ts && ts < w.end);
        }
        if let Some(idx) = grid.locate(CalendarScope::TradingDays, ts) {
            let w = grid.window(CalendarScope::TradingDays, idx);
            prop_assert!(w.start <= ts && ts < w.end);
        }
    }

    #[test]
    fn lag_is_defined_and_strictly_earlier(t in 1usize..400) {
        let grid = WindowGrid::build(
            NaiveDate::from_ymd_opt(2021, 12, 1).unwrap(),
            NaiveDate::from_ymd_opt(2022, 3, 7).unwrap(),
            4,
        ).unwrap();
        prop_assume!(t < grid.len(CalendarScope::TradingDays));
        let response = grid.window(CalendarScope::TradingDays, t).start;
        let lag_t = grid.lag_window(t, CalendarScope::TradingDays).unwrap();
        prop_assert!(grid.window(CalendarScope::TradingDays, lag_t).start < response);
        let lag_a = grid.lag_window(t, CalendarScope::AllDays).unwrap();
        prop_assert!(grid.window(CalendarScope::AllDays, lag_a).start < response);
    }
}

// ---------------------------------------------------------------------------
// variance
// ---------------------------------------------------------------------------

fn price_path() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.90f64..1.10, 3..48).prop_map(|steps| {
        let mut price = 85.0;
        let mut path = vec![price];
        for s in steps {
            price *= s;
            path.push(price);
        }
        path
    })
}

proptest! {
    #[test]
    fn rv_is_invariant_to_inversion_and_scaling(path in price_path(), scale in 0.01f64..100.0) {
        let base = realized_variance(&path, 6).unwrap();
        let inverted: Vec<f64> = path.iter().map(|p| 1.0 / p).collect();
        let scaled: Vec<f64> = path.iter().map(|p| p * scale).collect();
        let inv = realized_variance(&inverted, 6).unwrap();
        let sc = realized_variance(&scaled, 6).unwrap();
        prop_assert!((inv - base).abs() <= 1e-12 * base.abs().max(1e-300));
        prop_assert!((sc - base).abs() <= 1e-12 * base.abs().max(1e-300));
    }

    #[test]
    fn rv_concatenates_across_interior_splits(path in price_path(), split_seed in any::<u32>()) {
        // Splitting at an interior sample (shared boundary price) makes the
        // two sub-sums add up to the full sum.
        prop_assume!(path.len() >= 4);
        let split = 1 + (split_seed as usize) % (path.len() - 2);
        let full = realized_variance(&path, 6).unwrap();
        let left = realized_variance(&path[..=split], 6).unwrap();
        let right = realized_variance(&path[split..], 6).unwrap();
        prop_assert!((left + right - full).abs() <= 1e-10 * full.abs().max(1e-300));
    }
}

// ---------------------------------------------------------------------------
// implied
// ---------------------------------------------------------------------------

proptest! {
    #[test]
    fn window_iv_dominates_squared_mean(quotes in prop::collection::vec(0.1f64..80.0, 1..48)) {
        let iv = window_iv(&quotes).unwrap();
        let mean = quotes.iter().sum::<f64>() / quotes.len() as f64;
        prop_assert!(iv >= mean * mean - 1e-9 * iv.abs());
    }

    #[test]
    fn diff_then_cumsum_reconstructs_log_levels(
        raw in prop::collection::vec(1.0f64..400.0, 6..60),
    ) {
        let grid_days = (raw.len() + 5) / 6;
        let start = NaiveDate::from_ymd_opt(2022, 1, 3).unwrap(); // Monday
        let end = start + Duration::days(grid_days as i64 - 1);
        let grid = WindowGrid::build(start, end, 4).unwrap();
        prop_assume!(grid.len(CalendarScope::TradingDays) >= raw.len());
        let mut values: Vec<Option<f64>> = raw.iter().copied().map(Some).collect();
        values.resize(grid.len(CalendarScope::TradingDays), None);
        let series = WindowSeries::new(&grid, CalendarScope::TradingDays, values).unwrap();
        let logs = log_iv(&series).unwrap();
        let diffs = diff_log_iv(&logs);
        let mut level = logs.get(0).unwrap();
        for i in 1..raw.len() {
            level += diffs.get(i).unwrap();
            prop_assert!((level - logs.get(i).unwrap()).abs() < 1e-12);
        }
    }
}

// ---------------------------------------------------------------------------
// attention: chaining invariants
// ---------------------------------------------------------------------------

/// Overlapping positive real-valued hourly segments for scale tests.
fn real_segments() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (2usize..4).prop_flat_map(|n| {
        prop::collection::vec(prop::collection::vec(0.5f64..120.0, 6..12), n)
    })
}

fn to_series(segments: &[Vec<f64>], overlap: usize) -> Vec<ChainedSeries> {
    let mut out = Vec::new();
    let mut start = hour0();
    for (i, seg) in segments.iter().enumerate() {
        out.push(ChainedSeries::new(format!("t{i}"), start, seg.clone()).unwrap());
        start += Duration::hours(seg.len() as i64 - overlap as i64);
    }
    out
}

fn fold_chain(series: &[ChainedSeries]) -> ChainedSeries {
    let mut acc = series[0].clone();
    for later in &series[1..] {
        acc = chain_series(&acc, later).unwrap();
    }
    acc
}

proptest! {
    #[test]
    fn chaining_scale_invariance(segments in real_segments(), c in 0.05f64..20.0, pick in any::<u32>()) {
        let overlap = 3;
        prop_assume!(segments.iter().all(|s| s.len() > overlap));
        let series = to_series(&segments, overlap);
        let base = fold_chain(&series);

        let k = (pick as usize) % series.len();
        let mut scaled = series.clone();
        scaled[k] = ChainedSeries::new(
            scaled[k].term().to_string(),
            scaled[k].start(),
            scaled[k].values().iter().map(|v| v * c).collect(),
        ).unwrap();
        let rescaled = fold_chain(&scaled);

        prop_assert_eq!(base.len(), rescaled.len());
        // The whole output moves by one global factor (c when the last
        // segment was scaled, 1 otherwise): all elementwise ratios agree.
        let factor = rescaled.values()[0] / base.values()[0];
        for (a, b) in base.values().iter().zip(rescaled.values()) {
            prop_assert!((b / a - factor).abs() <= 1e-9 * factor.abs());
        }
        // And the log series shifts by a constant.
        let shift = factor.ln();
        for (a, b) in base.values().iter().zip(rescaled.values()) {
            prop_assert!((b.ln() - a.ln() - shift).abs() <= 1e-9);
        }
    }

    #[test]
    fn chain_preserves_internal_ratios(segments in real_segments()) {
        let overlap = 3;
        prop_assume!(segments.iter().all(|s| s.len() > overlap));
        let series = to_series(&segments, overlap);
        let earlier = &series[0];
        let later = &series[1];
        let chained = chain_series(earlier, later).unwrap();

        // Later values are copied verbatim, so its internal ratios are
        // bit-identical.
        let offset = later.start().signed_duration_since(chained.start()).num_hours() as usize;
        for i in 1..later.len() {
            let a = chained.values()[offset + i] / chained.values()[offset + i - 1];
            let b = later.values()[i] / later.values()[i - 1];
            prop_assert_eq!(a, b);
        }
        // The earlier head is scaled by one constant, so its internal ratios
        // survive up to rounding.
        for i in 1..offset {
            let a = chained.values()[i] / chained.values()[i - 1];
            let b = earlier.values()[i] / earlier.values()[i - 1];
            prop_assert!((a - b).abs() <= 1e-12 * b.abs());
        }
    }

    #[test]
    fn rescaling_constant_is_max_ratio_and_attained(segments in real_segments()) {
        let overlap = 3;
        prop_assume!(segments.iter().all(|s| s.len() > overlap));
        let series = to_series(&segments, overlap);
        let earlier = &series[0];
        let later = &series[1];
        let chained = chain_series(earlier, later).unwrap();

        // Recover the constant from the scaled head and compare against the
        // overlap ratios.
        let constant = chained.values()[0] / earlier.values()[0];
        let head = earlier.len() - overlap;
        let ratios: Vec<f64> = (0..overlap)
            .map(|k| later.values()[k] / earlier.values()[head + k])
            .collect();
        for r in &ratios {
            prop_assert!(constant >= r - 1e-12 * r.abs());
        }
        prop_assert!(ratios.iter().any(|r| (constant - r).abs() <= 1e-12 * r.abs()));
    }
}

// ---------------------------------------------------------------------------
// attention: exact rational oracle for integer batches
// ---------------------------------------------------------------------------

fn ratio(v: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Exact-arithmetic mirror of the rescale-and-chain rule.
fn oracle_chain(batches: &[(usize, Vec<u32>)]) -> Vec<BigRational> {
    let (start0, first) = &batches[0];
    let mut acc_start = *start0;
    let mut acc: Vec<BigRational> = first.iter().map(|&v| ratio(v.max(1))).collect();
    for (later_start, later_raw) in &batches[1..] {
        let later: Vec<BigRational> = later_raw.iter().map(|&v| ratio(v.max(1))).collect();
        let overlap_begin = *later_start;
        let constant = later
            .iter()
            .enumerate()
            .filter_map(|(k, l)| {
                let acc_idx = overlap_begin + k;
                if acc_idx >= acc_start && acc_idx < acc_start + acc.len() {
                    Some(l / &acc[acc_idx - acc_start])
                } else {
                    None
                }
            })
            .max()
            .expect("overlap non-empty");
        let end = (acc_start + acc.len()).max(later_start + later.len());
        let mut next = Vec::with_capacity(end - acc_start);
        for idx in acc_start..end {
            if idx >= *later_start && idx < later_start + later.len() {
                next.push(later[idx - later_start].clone());
            } else {
                next.push(&acc[idx - acc_start] * &constant);
            }
        }
        acc = next;
        acc_start = acc_start.min(*later_start);
    }
    acc
}

fn integer_batches() -> impl Strategy<Value = Vec<Vec<u32>>> {
    (2usize..5).prop_flat_map(|n| {
        prop::collection::vec(
            (prop::collection::vec(0u32..=100, 8..16), 0usize..8)
                .prop_map(|(mut values, pos)| {
                    let at = pos % values.len();
                    values[at] = 100;
                    values
                }),
            n,
        )
    })
}

proptest! {
    #[test]
    fn chain_all_matches_exact_rational_oracle(batch_values in integer_batches()) {
        let overlap = 4usize;
        prop_assume!(batch_values.iter().all(|b| b.len() > overlap));

        let mut raw = Vec::new();
        let mut offsets = Vec::new();
        let mut offset = 0usize;
        for (i, values) in batch_values.iter().enumerate() {
            raw.push(RawBatch::clamp(
                "term",
                hour0() + Duration::hours(offset as i64),
                values.clone(),
            ).unwrap());
            offsets.push((offset, values.clone()));
            if i + 1 < batch_values.len() {
                offset += values.len() - overlap;
            }
        }

        let chained = chain_all(&raw, overlap).unwrap();
        let oracle = oracle_chain(&offsets);
        prop_assert_eq!(chained.len(), oracle.len());
        for (got, exact) in chained.values().iter().zip(&oracle) {
            let num: f64 = exact.numer().to_string().parse().unwrap();
            let den: f64 = exact.denom().to_string().parse().unwrap();
            let want = num / den;
            prop_assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0));
        }
    }
}

// ---------------------------------------------------------------------------
// attention: aggregation
// ---------------------------------------------------------------------------

proptest! {
    #[test]
    fn category_aggregation_is_permutation_invariant(
        values in prop::collection::vec(prop::collection::vec(0.5f64..50.0, 12), 2..5),
        swap in any::<(u32, u32)>(),
    ) {
        let grid = WindowGrid::build(
            NaiveDate::from_ymd_opt(2022, 1, 3).unwrap(),
            NaiveDate::from_ymd_opt(2022, 1, 4).unwrap(),
            4,
        ).unwrap();
        let members: Vec<WindowSeries> = values
            .iter()
            .map(|vs| WindowSeries::new(&grid, CalendarScope::AllDays, vs.iter().copied().map(Some).collect()).unwrap())
            .collect();
        let mut permuted = members.clone();
        let i = (swap.0 as usize) % permuted.len();
        let j = (swap.1 as usize) % permuted.len();
        permuted.swap(i, j);

        let a = aggregate_category(&grid, Category::Ruble, &members).unwrap();
        let b = aggregate_category(&grid, Category::Ruble, &permuted).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!((x.unwrap() - y.unwrap()).abs() <= 1e-12);
        }
    }

    #[test]
    fn window_average_and_aggregation_commute(
        values in prop::collection::vec(prop::collection::vec(0.5f64..50.0, 24), 2..4),
    ) {
        // Same hour coverage for every term, one full day: averaging hours
        // then terms equals averaging terms then hours.
        let grid = WindowGrid::build(
            NaiveDate::from_ymd_opt(2022, 1, 3).unwrap(),
            NaiveDate::from_ymd_opt(2022, 1, 3).unwrap(),
            4,
        ).unwrap();
        let per_term: Vec<WindowSeries> = values
            .iter()
            .map(|vs| window_average(&grid, &ChainedSeries::new("t", hour0(), vs.clone()).unwrap()))
            .collect();
        let avg_then_agg = aggregate_category(&grid, Category::Ruble, &per_term).unwrap();

        let n_terms = values.len();
        let hourly_mean: Vec<f64> = (0..24)
            .map(|h| values.iter().map(|vs| vs[h]).sum::<f64>() / n_terms as f64)
            .collect();
        let agg_then_avg = window_average(
            &grid,
            &ChainedSeries::new("mean", hour0(), hourly_mean).unwrap(),
        );

        for (x, y) in avg_then_agg.values().iter().zip(agg_then_avg.values()) {
            prop_assert!((x.unwrap() - y.unwrap()).abs() <= 1e-12);
        }
    }
}
