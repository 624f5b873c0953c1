//! End-to-end orchestration: ingest files, build series, fit models, attach
//! inference, and emit the report bundle.
//!
//! All randomness flows from the single master seed in the configuration;
//! each (pair, model) fit draws its bootstrap seed from a deterministic
//! substream, so two runs with the same config produce byte-identical
//! bundles. Emission never records wall-clock time.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use intravol::attention::{
    aggregate_category, chain_all, log_attention, ma6_log_attention, window_average, Category,
};
use intravol::diagnostics::{describe, DescriptiveRow};
use intravol::implied::{diff_log_iv, iv_series, log_iv, Maturity};
use intravol::inference::{
    auto_portmanteau, stationary_bootstrap_pvalues, BootstrapConfig, SerialTestResult,
};
use intravol::model::{
    build_design, build_designs_common, nested_r2_check, ols_fit, DesignInputs, DesignMatrix,
    ModelSpec, NestingCheck,
};
use intravol::variance::{log_rv, rv_series, RvOptions};
use intravol::windowing::{CalendarScope, WindowGrid, WindowSeries};

use crate::config::{AttentionConfig, PairConfig, PairInput, PipelineConfig};
use crate::error::{CliError, Result};
use crate::ingest::{read_batch, read_iv, read_prices, read_window_series};
use crate::report::{coefficients_csv, render_descriptive_table, render_fit_table, FitReport};

/// Log attention indices ready for design construction.
#[derive(Debug, Clone)]
pub struct PreparedAttention {
    pub ln_general: WindowSeries,
    pub ln_ruble: WindowSeries,
    pub ln_economy: WindowSeries,
}

/// One pair's log series ready for design construction.
#[derive(Debug, Clone)]
pub struct PreparedPair {
    pub name: String,
    pub ln_rv: WindowSeries,
    pub ln_iv: WindowSeries,
    pub dln_iv: WindowSeries,
    /// Windows whose realized variance was zero and could not be logged.
    pub zero_rv_windows: usize,
}

/// splitmix64; used to derive per-(pair, model) bootstrap seeds from the
/// master seed.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, pair_index: usize, model_index: usize) -> u64 {
    splitmix64(master ^ ((pair_index as u64 + 1) << 32) ^ (model_index as u64 + 1))
}

pub fn prepare_attention(
    grid: &WindowGrid,
    config: &AttentionConfig,
    ma6: bool,
) -> Result<PreparedAttention> {
    match config {
        AttentionConfig::Series {
            ln_general,
            ln_ruble,
            ln_economy,
        } => {
            let read = |path: &PathBuf| -> Result<WindowSeries> {
                let series = read_window_series(path, grid, CalendarScope::AllDays)?;
                if ma6 {
                    // The stored series is logged; smooth the levels.
                    Ok(ma6_log_attention(&series.map(f64::exp))?)
                } else {
                    Ok(series)
                }
            };
            Ok(PreparedAttention {
                ln_general: read(ln_general)?,
                ln_ruble: read(ln_ruble)?,
                ln_economy: read(ln_economy)?,
            })
        }
        AttentionConfig::Manifest {
            manifest,
            overlap_hours,
        } => {
            let parsed = crate::config::load_manifest(manifest)?;
            let mut indices: BTreeMap<Category, WindowSeries> = BTreeMap::new();
            for category in Category::ALL {
                let terms = parsed.get(&category).ok_or_else(|| CliError::Manifest {
                    path: manifest.clone(),
                    message: format!("missing category {:?}", category.label()),
                })?;
                let mut members = Vec::new();
                for (term, files) in terms {
                    let mut batches = Vec::with_capacity(files.len());
                    for file in files {
                        batches.push(read_batch(file, term)?);
                    }
                    let chained = chain_all(&batches, *overlap_hours)?;
                    members.push(window_average(grid, &chained));
                }
                let index = aggregate_category(grid, category, &members)?;
                let logged = if ma6 {
                    ma6_log_attention(&index)?
                } else {
                    log_attention(&index)?
                };
                indices.insert(category, logged);
            }
            Ok(PreparedAttention {
                ln_general: indices.remove(&Category::GeneralMarket).expect("inserted"),
                ln_ruble: indices.remove(&Category::Ruble).expect("inserted"),
                ln_economy: indices.remove(&Category::RussianEconomy).expect("inserted"),
            })
        }
    }
}

pub fn prepare_pair(
    grid: &WindowGrid,
    pair: &PairConfig,
    options: &crate::config::PipelineOptions,
) -> Result<PreparedPair> {
    let (ln_rv, ln_iv, zero_rv_windows) = match &pair.input {
        PairInput::Raw {
            prices,
            iv_quotes,
            iv_maturity,
        } => {
            let price_series = read_prices(prices)?;
            let rv = rv_series(
                grid,
                &price_series,
                &RvOptions {
                    sample_minutes: options.sample_minutes,
                    min_coverage: options.min_coverage,
                },
            );
            let logged = log_rv(&rv)?;
            let maturity = Maturity::parse(iv_maturity)?;
            let quotes = read_iv(iv_quotes, maturity)?;
            let iv = iv_series(grid, &quotes);
            (logged.series, log_iv(&iv)?, logged.zero_windows.len())
        }
        PairInput::Series { ln_rv, ln_iv } => (
            read_window_series(ln_rv, grid, CalendarScope::TradingDays)?,
            read_window_series(ln_iv, grid, CalendarScope::TradingDays)?,
            0,
        ),
    };
    let dln_iv = diff_log_iv(&ln_iv);
    Ok(PreparedPair {
        name: pair.name.clone(),
        ln_rv,
        ln_iv,
        dln_iv,
        zero_rv_windows,
    })
}

/// Fits every requested specification for one pair and attaches inference.
pub fn fit_pair(
    grid: &WindowGrid,
    pair: &PreparedPair,
    attention: Option<&PreparedAttention>,
    specs: &[ModelSpec],
    inference: &crate::config::InferenceConfig,
    common_rows: bool,
    pair_index: usize,
) -> Result<(Vec<FitReport>, NestingCheck)> {
    let inputs = DesignInputs {
        ln_rv: &pair.ln_rv,
        ln_iv: Some(&pair.ln_iv),
        dln_iv: Some(&pair.dln_iv),
        ln_general: attention.map(|a| &a.ln_general),
        ln_ruble: attention.map(|a| &a.ln_ruble),
        ln_economy: attention.map(|a| &a.ln_economy),
    };
    let designs: Vec<DesignMatrix> = if common_rows {
        build_designs_common(grid, &inputs, specs)?
    } else {
        specs
            .iter()
            .map(|spec| build_design(grid, &inputs, spec))
            .collect::<intravol::Result<_>>()?
    };

    let mut reports = Vec::with_capacity(specs.len());
    let mut fits = Vec::with_capacity(specs.len());
    for (model_index, (spec, design)) in specs.iter().zip(&designs).enumerate() {
        let fit = ols_fit(design)?;
        let bootstrap_config = BootstrapConfig {
            replications: inference.replications,
            seed: derive_seed(inference.seed, pair_index, model_index),
            expected_block_length: inference.block_length,
        };
        let bootstrap = stationary_bootstrap_pvalues(design, &fit, &bootstrap_config)?;
        let serial: SerialTestResult = auto_portmanteau(&fit.residuals, inference.max_lag)?;
        reports.push(FitReport::assemble(
            &pair.name, &spec.label, design, &fit, &bootstrap, serial,
        ));
        fits.push(fit);
    }
    let nesting = nested_r2_check(specs, &fits);
    Ok((reports, nesting))
}

#[derive(Debug, Serialize)]
struct PairMetadata {
    name: String,
    rows_used: BTreeMap<String, usize>,
    dropped_windows: BTreeMap<String, usize>,
    zero_rv_windows: usize,
}

#[derive(Debug, Serialize)]
struct RunMetadata<'a> {
    seed: u64,
    replications: usize,
    max_lag: usize,
    block_length_override: Option<f64>,
    grid: &'a crate::config::GridConfig,
    options: &'a crate::config::PipelineOptions,
    models: Vec<String>,
    pairs: Vec<PairMetadata>,
    conventions: BTreeMap<&'static str, String>,
}

fn conventions() -> BTreeMap<&'static str, String> {
    let mut map = BTreeMap::new();
    map.insert("bootstrap_scheme", "pairs stationary bootstrap".to_string());
    map.insert("block_length_target", "response series".to_string());
    map.insert(
        "p_value",
        "two-sided, centered bootstrap distribution, count/B".to_string(),
    );
    map.insert("significance_levels", "10%, 5%, 1% (a, b, c)".to_string());
    map.insert("kurtosis", "non-excess moment ratio".to_string());
    map.insert("skewness", "bias-uncorrected moment ratio".to_string());
    map.insert("annualization", "252 trading days x windows per day".to_string());
    map.insert("rv_window_boundary", "window-crossing returns excluded".to_string());
    map.insert("iv_stale_rule", "carry last quote within the same day".to_string());
    map.insert("chain_overlap_values", "later batch kept on overlap".to_string());
    map
}

/// Everything a pipeline run produced, for callers that want the values
/// rather than the files.
pub struct RunOutput {
    pub output_dir: PathBuf,
    pub reports: Vec<Vec<FitReport>>,
    pub nestings: Vec<NestingCheck>,
    pub descriptives: Vec<DescriptiveRow>,
    pub tables: Vec<String>,
}

fn write(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).map_err(CliError::io(path))
}

fn json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable report types");
    text.push('\n');
    text
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
        .collect()
}

/// Runs the configured pipeline: descriptive statistics when
/// `with_descriptives`, model fits when the model list is non-empty, and a
/// run-metadata file. Returns the in-memory outputs after writing the
/// bundle.
pub fn run_pipeline(config: &PipelineConfig, with_descriptives: bool) -> Result<RunOutput> {
    let grid = WindowGrid::build(
        config.grid.start_date,
        config.grid.end_date,
        config.grid.window_hours,
    )?;
    let specs = config.resolved_models()?;
    let attention = config
        .attention
        .as_ref()
        .map(|a| prepare_attention(&grid, a, config.options.attention_ma6))
        .transpose()?;

    let pairs: Vec<PreparedPair> = config
        .pairs
        .iter()
        .map(|p| prepare_pair(&grid, p, &config.options))
        .collect::<Result<_>>()?;

    std::fs::create_dir_all(&config.output_dir).map_err(CliError::io(&config.output_dir))?;

    // Descriptive rows: per pair ln RV / ln IV / dln IV, then attention.
    let mut descriptives = Vec::new();
    if with_descriptives {
        for pair in &pairs {
            descriptives.push(describe(&grid, &pair.ln_rv, &format!("{} ln RV", pair.name))?);
            descriptives.push(describe(&grid, &pair.ln_iv, &format!("{} ln IV", pair.name))?);
            descriptives.push(describe(&grid, &pair.dln_iv, &format!("{} dln IV", pair.name))?);
        }
        if let Some(att) = &attention {
            descriptives.push(describe(&grid, &att.ln_general, "ln G (general market)")?);
            descriptives.push(describe(&grid, &att.ln_ruble, "ln R (ruble)")?);
            descriptives.push(describe(&grid, &att.ln_economy, "ln E (economy)")?);
        }
        write(
            &config.output_dir.join("descriptive.csv"),
            &crate::report::descriptive_csv(&descriptives),
        )?;
        write(
            &config.output_dir.join("descriptive.txt"),
            &render_descriptive_table(&descriptives),
        )?;
    }

    let mut reports = Vec::new();
    let mut nestings = Vec::new();
    let mut tables = Vec::new();
    let mut pair_metadata = Vec::new();
    for (pair_index, pair) in pairs.iter().enumerate() {
        if specs.is_empty() {
            pair_metadata.push(PairMetadata {
                name: pair.name.clone(),
                rows_used: BTreeMap::new(),
                dropped_windows: BTreeMap::new(),
                zero_rv_windows: pair.zero_rv_windows,
            });
            continue;
        }
        let (pair_reports, nesting) = fit_pair(
            &grid,
            pair,
            attention.as_ref(),
            &specs,
            &config.inference,
            config.options.common_rows,
            pair_index,
        )?;

        let pair_dir = config.output_dir.join(sanitize(&pair.name));
        let fits_dir = pair_dir.join("fits");
        std::fs::create_dir_all(&fits_dir).map_err(CliError::io(&fits_dir))?;
        for report in &pair_reports {
            write(
                &fits_dir.join(format!("{}.json", sanitize(&report.model))),
                &json(report),
            )?;
        }
        let table = render_fit_table(&pair.name, &pair_reports);
        write(&pair_dir.join("table.txt"), &table)?;
        write(
            &pair_dir.join("coefficients.csv"),
            &coefficients_csv(&pair_reports),
        )?;
        write(&pair_dir.join("nesting.json"), &json(&nesting))?;

        pair_metadata.push(PairMetadata {
            name: pair.name.clone(),
            rows_used: pair_reports
                .iter()
                .map(|r| (r.model.clone(), r.rows_used))
                .collect(),
            dropped_windows: pair_reports
                .iter()
                .map(|r| (r.model.clone(), r.dropped_windows))
                .collect(),
            zero_rv_windows: pair.zero_rv_windows,
        });
        tables.push(table);
        reports.push(pair_reports);
        nestings.push(nesting);
    }

    let metadata = RunMetadata {
        seed: config.inference.seed,
        replications: config.inference.replications,
        max_lag: config.inference.max_lag,
        block_length_override: config.inference.block_length,
        grid: &config.grid,
        options: &config.options,
        models: specs.iter().map(|s| s.label.clone()).collect(),
        pairs: pair_metadata,
        conventions: conventions(),
    };
    write(&config.output_dir.join("run_metadata.json"), &json(&metadata))?;

    Ok(RunOutput {
        output_dir: config.output_dir.clone(),
        reports,
        nestings,
        descriptives,
        tables,
    })
}
