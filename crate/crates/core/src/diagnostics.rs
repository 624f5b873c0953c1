//! Descriptive statistics and the seeded synthetic data generator.

use chrono::{NaiveDate, NaiveDateTime};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::windowing::{CalendarScope, WindowGrid, WindowSeries};

/// Lags reported alongside the moments.
pub const AUTOCORR_LAGS: [usize; 3] = [1, 6, 30];

/// An annotated extremum: the value plus the window it occurred in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub value: f64,
    pub date: NaiveDate,
    pub start: NaiveDateTime,
}

/// One row of a descriptive-statistics table.
///
/// Kurtosis is non-excess (Gaussian = 3); skewness and kurtosis are the
/// bias-uncorrected moment ratios and are reported missing for constant
/// series. Autocorrelations are computed on the in-scope sequence of present
/// values, ignoring calendar gaps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptiveRow {
    pub label: String,
    pub count: usize,
    pub mean: f64,
    pub sd: f64,
    pub min: Extremum,
    pub max: Extremum,
    pub skewness: Option<f64>,
    pub kurtosis: Option<f64>,
    pub rho1: Option<f64>,
    pub rho6: Option<f64>,
    pub rho30: Option<f64>,
}

fn autocorrelation(values: &[f64], lag: usize) -> Option<f64> {
    let n = values.len();
    if lag >= n {
        return None;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let denom: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    if denom <= 0.0 {
        return None;
    }
    let num: f64 = values[lag..]
        .iter()
        .zip(values)
        .map(|(a, b)| (a - mean) * (b - mean))
        .sum();
    Some(num / denom)
}

/// Moments, annotated extremes, and autocorrelations of a window series.
///
/// Requires at least 31 present values so the lag-30 autocorrelation is
/// defined.
pub fn describe(grid: &WindowGrid, series: &WindowSeries, label: &str) -> Result<DescriptiveRow> {
    let present: Vec<(usize, f64)> = series.iter_present().collect();
    let n = present.len();
    if n < 31 {
        return Err(Error::SeriesTooShort {
            what: "descriptive statistics",
            needed: 31,
            got: n,
        });
    }
    let values: Vec<f64> = present.iter().map(|&(_, v)| v).collect();
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let m2 = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / nf;
    let m3 = values.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / nf;
    let m4 = values.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / nf;
    let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0)).sqrt();
    let (skewness, kurtosis) = if m2 > 0.0 {
        (Some(m3 / m2.powf(1.5)), Some(m4 / (m2 * m2)))
    } else {
        (None, None)
    };

    let locate = |target: fn(&(usize, f64), &(usize, f64)) -> std::cmp::Ordering| -> Extremum {
        let &(idx, value) = present
            .iter()
            .min_by(|a, b| target(a, b))
            .expect("non-empty present set");
        let window = grid.window(series.scope(), idx);
        Extremum {
            value,
            date: window.date,
            start: window.start,
        }
    };
    let min = locate(|a, b| a.1.partial_cmp(&b.1).expect("finite values"));
    let max = locate(|a, b| b.1.partial_cmp(&a.1).expect("finite values"));

    Ok(DescriptiveRow {
        label: label.to_string(),
        count: n,
        mean,
        sd,
        min,
        max,
        skewness,
        kurtosis,
        rho1: autocorrelation(&values, AUTOCORR_LAGS[0]),
        rho6: autocorrelation(&values, AUTOCORR_LAGS[1]),
        rho30: autocorrelation(&values, AUTOCORR_LAGS[2]),
    })
}

/// Log-AR(1) process parameters for an exogenous series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ar1Params {
    pub mean: f64,
    pub phi: f64,
    pub sd: f64,
}

impl Ar1Params {
    fn validate(&self) -> Result<()> {
        if self.phi.abs() >= 1.0 {
            return Err(Error::InvalidPersistence(self.phi));
        }
        Ok(())
    }

    /// Deterministic-given-rng sample path of length `n`, started at the
    /// stationary distribution.
    fn path(&self, n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut out = Vec::with_capacity(n);
        let stationary_sd = self.sd / (1.0 - self.phi * self.phi).sqrt();
        let first: f64 = StandardNormal.sample(rng);
        let mut prev = self.mean + stationary_sd * first;
        out.push(prev);
        for _ in 1..n {
            let eps: f64 = StandardNormal.sample(rng);
            prev = self.mean + self.phi * (prev - self.mean) + self.sd * eps;
            out.push(prev);
        }
        out
    }
}

/// True coefficients of the generating recursion, one per design column of
/// the full specification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthCoefficients {
    pub intercept: f64,
    pub rv_lag: f64,
    /// Seasonal interaction per window-of-day slot 1..w-1 (baseline slot w).
    pub seasonal: Vec<f64>,
    /// Onset-day interaction per calendar day.
    pub onset: Vec<(NaiveDate, f64)>,
    /// General-market, ruble, economy attention elasticities.
    pub attention: [f64; 3],
    pub iv_diff: f64,
    pub iv_level: f64,
}

/// Full configuration of the synthetic data generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub start_date: NaiveDate,
    pub end_date: NaiveDate,
    pub window_hours: u32,
    pub coefficients: SynthCoefficients,
    /// Innovation SD of the response recursion.
    pub noise_sd: f64,
    /// Log implied-variance process (trading scope).
    pub iv: Ar1Params,
    /// Log attention processes (all-days scope): general market, ruble,
    /// economy.
    pub attention: [Ar1Params; 3],
    pub seed: u64,
}

impl Default for SynthConfig {
    /// Magnitudes echo the published sample: persistence 0.3 with seasonal
    /// damping in [-0.2, 0], near-unit-root implied volatility around mean 6,
    /// attention processes matched to the reported moments.
    fn default() -> Self {
        SynthConfig {
            start_date: NaiveDate::from_ymd_opt(2021, 12, 1).expect("valid date"),
            end_date: NaiveDate::from_ymd_opt(2022, 3, 7).expect("valid date"),
            window_hours: 4,
            coefficients: SynthCoefficients {
                intercept: -1.68,
                rv_lag: 0.3,
                seasonal: vec![-0.16, -0.05, -0.08, -0.03, -0.20],
                onset: vec![
                    (NaiveDate::from_ymd_opt(2022, 2, 21).expect("valid"), 0.02),
                    (NaiveDate::from_ymd_opt(2022, 2, 22).expect("valid"), -0.02),
                    (NaiveDate::from_ymd_opt(2022, 2, 23).expect("valid"), -0.06),
                    (NaiveDate::from_ymd_opt(2022, 2, 24).expect("valid"), 0.07),
                    (NaiveDate::from_ymd_opt(2022, 2, 25).expect("valid"), 0.04),
                    (NaiveDate::from_ymd_opt(2022, 2, 28).expect("valid"), 0.11),
                ],
                attention: [0.13, 0.04, 0.03],
                iv_diff: 0.61,
                iv_level: 0.9,
            },
            noise_sd: 0.95,
            iv: Ar1Params {
                mean: 6.0,
                phi: 0.98,
                sd: 0.08,
            },
            attention: [
                Ar1Params {
                    mean: 3.16,
                    phi: 0.80,
                    sd: 0.35,
                },
                Ar1Params {
                    mean: 1.28,
                    phi: 0.92,
                    sd: 0.45,
                },
                Ar1Params {
                    mean: 1.96,
                    phi: 0.66,
                    sd: 0.59,
                },
            ],
            seed: 42,
        }
    }
}

/// Synthetic dataset: log series on the grid plus the generating truth,
/// labeled identically to the full specification's design columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthDataset {
    pub grid: WindowGrid,
    pub ln_rv: WindowSeries,
    pub ln_iv: WindowSeries,
    pub ln_general: WindowSeries,
    pub ln_ruble: WindowSeries,
    pub ln_economy: WindowSeries,
    pub truth: Vec<(String, f64)>,
}

// Named RNG substreams off the master seed.
const STREAM_GENERAL: u64 = 1;
const STREAM_RUBLE: u64 = 2;
const STREAM_ECONOMY: u64 = 3;
const STREAM_IV: u64 = 4;
const STREAM_RESPONSE: u64 = 5;

fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Generates a full synthetic dataset from the recursion the model estimates.
///
/// Bit-reproducible given the seed. Rejects configurations whose effective
/// lag-one coefficient reaches 1 in magnitude in any seasonal slot.
pub fn simulate(config: &SynthConfig) -> Result<SynthDataset> {
    let grid = WindowGrid::build(config.start_date, config.end_date, config.window_hours)?;
    let w = grid.windows_per_day() as usize;
    if config.coefficients.seasonal.len() != w - 1 {
        return Err(Error::LengthMismatch {
            scope: "seasonal coefficients",
            expected: w - 1,
            got: config.coefficients.seasonal.len(),
        });
    }
    for slot in 1..=w {
        let seasonal = if slot < w {
            config.coefficients.seasonal[slot - 1]
        } else {
            0.0
        };
        let effective = config.coefficients.rv_lag + seasonal;
        if effective.abs() >= 1.0 {
            return Err(Error::ExplosiveConfig {
                slot: slot as u8,
                coefficient: effective,
            });
        }
    }
    config.iv.validate()?;
    for params in &config.attention {
        params.validate()?;
    }

    let n_all = grid.len(CalendarScope::AllDays);
    let n_trading = grid.len(CalendarScope::TradingDays);

    let attention_paths: Vec<Vec<f64>> = [STREAM_GENERAL, STREAM_RUBLE, STREAM_ECONOMY]
        .iter()
        .zip(&config.attention)
        .map(|(&stream, params)| params.path(n_all, &mut substream(config.seed, stream)))
        .collect();
    let ln_iv_path = config
        .iv
        .path(n_trading, &mut substream(config.seed, STREAM_IV));

    let coef = &config.coefficients;
    let mut response_rng = substream(config.seed, STREAM_RESPONSE);
    let attention_mean_term: f64 = coef
        .attention
        .iter()
        .zip(&config.attention)
        .map(|(c, p)| c * p.mean)
        .sum();
    // Baseline-slot fixed point with regressors at their process means.
    let fixed_point = (coef.intercept + attention_mean_term + coef.iv_level * config.iv.mean)
        / (1.0 - coef.rv_lag);

    let mut ln_rv_path = Vec::with_capacity(n_trading);
    if n_trading > 0 {
        ln_rv_path.push(fixed_point);
    }
    for t in 1..n_trading {
        let window = grid.window(CalendarScope::TradingDays, t);
        let slot = window.slot as usize;
        let seasonal = if slot < w { coef.seasonal[slot - 1] } else { 0.0 };
        let onset = coef
            .onset
            .iter()
            .find(|(date, _)| *date == window.date)
            .map(|(_, lambda)| *lambda)
            .unwrap_or(0.0);
        let effective = coef.rv_lag + seasonal + onset;

        let all_lag = grid
            .lag_window(t, CalendarScope::AllDays)
            .expect("t >= 1 has a calendar lag");
        let attention_term: f64 = coef
            .attention
            .iter()
            .zip(&attention_paths)
            .map(|(c, path)| c * path[all_lag])
            .sum();
        let iv_lag = ln_iv_path[t - 1];
        let iv_diff = if t >= 2 { iv_lag - ln_iv_path[t - 2] } else { 0.0 };

        let eps: f64 = StandardNormal.sample(&mut response_rng);
        let value = coef.intercept
            + effective * ln_rv_path[t - 1]
            + attention_term
            + coef.iv_diff * iv_diff
            + coef.iv_level * iv_lag
            + config.noise_sd * eps;
        ln_rv_path.push(value);
    }

    let wrap_trading = |path: Vec<f64>| {
        WindowSeries::new(
            &grid,
            CalendarScope::TradingDays,
            path.into_iter().map(Some).collect(),
        )
        .expect("path length matches grid")
    };
    let wrap_all = |path: &[f64]| {
        WindowSeries::new(
            &grid,
            CalendarScope::AllDays,
            path.iter().copied().map(Some).collect(),
        )
        .expect("path length matches grid")
    };

    let mut truth = vec![
        ("Constant".to_string(), coef.intercept),
        ("ln RV[t-1]".to_string(), coef.rv_lag),
    ];
    for (j, gamma) in coef.seasonal.iter().enumerate() {
        truth.push((format!("ln RV[t-1] x I(j={})", j + 1), *gamma));
    }
    for (date, lambda) in &coef.onset {
        truth.push((format!("ln RV[t-1] x I(q={date})"), *lambda));
    }
    truth.push(("ln G[t-1]".to_string(), coef.attention[0]));
    truth.push(("ln R[t-1]".to_string(), coef.attention[1]));
    truth.push(("ln E[t-1]".to_string(), coef.attention[2]));
    truth.push(("dln IV[t-1]".to_string(), coef.iv_diff));
    truth.push(("ln IV[t-1]".to_string(), coef.iv_level));

    Ok(SynthDataset {
        ln_rv: wrap_trading(ln_rv_path),
        ln_iv: wrap_trading(ln_iv_path),
        ln_general: wrap_all(&attention_paths[0]),
        ln_ruble: wrap_all(&attention_paths[1]),
        ln_economy: wrap_all(&attention_paths[2]),
        grid,
        truth,
    })
}

impl SynthDataset {
    /// Design inputs borrowing this dataset's series.
    pub fn design_inputs(&self) -> crate::model::DesignInputs<'_> {
        crate::model::DesignInputs {
            ln_rv: &self.ln_rv,
            ln_iv: Some(&self.ln_iv),
            dln_iv: None,
            ln_general: Some(&self.ln_general),
            ln_ruble: Some(&self.ln_ruble),
            ln_economy: Some(&self.ln_economy),
        }
    }
}
