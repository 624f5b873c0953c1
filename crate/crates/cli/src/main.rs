//! Command-line interface. Exit codes: 0 success, 1 validation error,
//! 2 numerical failure.

use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{Parser, Subcommand};

use intravol::attention::DEFAULT_OVERLAP_HOURS;
use intravol::implied::{diff_log_iv, Maturity};
use intravol::inference::{auto_block_length, auto_portmanteau, DEFAULT_MAX_LAG};
use intravol::variance::{log_rv, rv_series, RvOptions};
use intravol::windowing::{CalendarScope, WindowGrid, WindowSeries, DEFAULT_WINDOW_HOURS};

use intravol_cli::config::{AttentionConfig, PipelineConfig};
use intravol_cli::error::{CliError, Result};
use intravol_cli::ingest::{format_timestamp, read_iv, read_prices, read_value_series};
use intravol_cli::pipeline::{prepare_attention, run_pipeline};
use intravol_cli::synth::write_synthetic_bundle;

#[derive(Parser)]
#[command(
    name = "intravol",
    version,
    about = "Intraday volatility measures, attention indices, and log-log volatility regressions"
)]
struct Cli {
    /// Pipeline configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Window length override in hours (2, 3, 4 or 6).
    #[arg(long, global = true)]
    window_hours: Option<u32>,
    /// Bootstrap replication count override.
    #[arg(long, global = true)]
    bootstrap_reps: Option<usize>,
    /// Output file or directory, depending on the subcommand.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Show the window grid implied by a date range.
    Grid {
        #[arg(long)]
        start: Option<NaiveDate>,
        #[arg(long)]
        end: Option<NaiveDate>,
    },
    /// Realized variance per window from a 5-minute price file.
    Rv {
        #[arg(long)]
        prices: PathBuf,
        #[arg(long)]
        start: Option<NaiveDate>,
        #[arg(long)]
        end: Option<NaiveDate>,
    },
    /// Window-averaged implied variance from a quote file.
    Iv {
        #[arg(long)]
        quotes: PathBuf,
        #[arg(long, default_value = "1m")]
        maturity: String,
        #[arg(long)]
        start: Option<NaiveDate>,
        #[arg(long)]
        end: Option<NaiveDate>,
    },
    /// Chain search-volume batches into log category indices.
    Attention {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value_t = DEFAULT_OVERLAP_HOURS)]
        overlap_hours: usize,
        /// Smooth with the six-window trailing mean before logging.
        #[arg(long)]
        ma6: bool,
        #[arg(long)]
        start: Option<NaiveDate>,
        #[arg(long)]
        end: Option<NaiveDate>,
    },
    /// Fit the configured models (no descriptive tables).
    Fit,
    /// Serial-dependence test and block-length selection for a series file.
    Diagnose {
        #[arg(long)]
        series: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_LAG)]
        max_lag: usize,
    },
    /// Descriptive statistics for the configured inputs.
    Describe,
    /// Generate a synthetic dataset bundle with known coefficients.
    Simulate {
        /// Generator configuration (JSON); defaults are used when absent.
        #[arg(long)]
        synth_config: Option<PathBuf>,
    },
    /// Full report bundle: descriptives, fits, metadata.
    Report,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn load_config(cli: &Cli) -> Result<PipelineConfig> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("this subcommand requires --config".into()))?;
    let mut config = PipelineConfig::load(path)?;
    if let Some(seed) = cli.seed {
        config.inference.seed = seed;
    }
    if let Some(hours) = cli.window_hours {
        config.grid.window_hours = hours;
    }
    if let Some(reps) = cli.bootstrap_reps {
        config.inference.replications = reps;
    }
    if let Some(out) = &cli.out {
        config.output_dir = out.clone();
    }
    Ok(config)
}

fn resolve_grid(cli: &Cli, start: Option<NaiveDate>, end: Option<NaiveDate>) -> Result<WindowGrid> {
    let (start_date, end_date, hours) = match (start, end) {
        (Some(s), Some(e)) => (s, e, cli.window_hours.unwrap_or(DEFAULT_WINDOW_HOURS)),
        _ => {
            let path = cli.config.as_ref().ok_or_else(|| {
                CliError::Config("provide --start and --end, or --config with a grid".into())
            })?;
            let config = PipelineConfig::load(path)?;
            (
                config.grid.start_date,
                config.grid.end_date,
                cli.window_hours.unwrap_or(config.grid.window_hours),
            )
        }
    };
    Ok(WindowGrid::build(start_date, end_date, hours)?)
}

fn emit(cli: &Cli, content: &str) -> Result<()> {
    match &cli.out {
        Some(path) => {
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent).map_err(CliError::io(parent))?;
                }
            }
            std::fs::write(path, content).map_err(CliError::io(path))
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn series_csv(
    grid: &WindowGrid,
    scope: CalendarScope,
    headers: &[&str],
    series: &[&WindowSeries],
) -> String {
    let mut out = String::from("start_utc");
    for h in headers {
        out.push(',');
        out.push_str(h);
    }
    out.push('\n');
    for index in 0..grid.len(scope) {
        out.push_str(&format_timestamp(grid.window(scope, index).start));
        for s in series {
            out.push(',');
            if let Some(v) = s.get(index) {
                out.push_str(&v.to_string());
            }
        }
        out.push('\n');
    }
    out
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Grid { start, end } => {
            let grid = resolve_grid(&cli, *start, *end)?;
            let trading = grid.len(CalendarScope::TradingDays);
            let all = grid.len(CalendarScope::AllDays);
            let mut out = String::new();
            out.push_str(&format!(
                "grid {} .. {} at {}h windows ({} per day)\n",
                grid.start_date(),
                grid.end_date(),
                grid.window_hours(),
                grid.windows_per_day()
            ));
            out.push_str(&format!("trading windows: {trading}\nall-days windows: {all}\n"));
            if trading > 0 {
                let first = grid.window(CalendarScope::TradingDays, 0);
                let last = grid.window(CalendarScope::TradingDays, trading - 1);
                out.push_str(&format!(
                    "first trading window: {} slot {}\nlast trading window:  {} slot {}\n",
                    format_timestamp(first.start),
                    first.slot,
                    format_timestamp(last.start),
                    last.slot
                ));
            }
            emit(&cli, &out)
        }
        Command::Rv { prices, start, end } => {
            let grid = resolve_grid(&cli, *start, *end)?;
            let price_series = read_prices(prices)?;
            let rv = rv_series(&grid, &price_series, &RvOptions::default());
            let logged = log_rv(&rv)?;
            let csv = series_csv(
                &grid,
                CalendarScope::TradingDays,
                &["rv", "ln_rv"],
                &[&rv, &logged.series],
            );
            emit(&cli, &csv)
        }
        Command::Iv {
            quotes,
            maturity,
            start,
            end,
        } => {
            let grid = resolve_grid(&cli, *start, *end)?;
            let maturity = Maturity::parse(maturity)?;
            let quote_series = read_iv(quotes, maturity)?;
            let iv = intravol::implied::iv_series(&grid, &quote_series);
            let ln = intravol::implied::log_iv(&iv)?;
            let dln = diff_log_iv(&ln);
            let csv = series_csv(
                &grid,
                CalendarScope::TradingDays,
                &["iv", "ln_iv", "dln_iv"],
                &[&iv, &ln, &dln],
            );
            emit(&cli, &csv)
        }
        Command::Attention {
            manifest,
            overlap_hours,
            ma6,
            start,
            end,
        } => {
            let grid = resolve_grid(&cli, *start, *end)?;
            let attention = prepare_attention(
                &grid,
                &AttentionConfig::Manifest {
                    manifest: manifest.clone(),
                    overlap_hours: *overlap_hours,
                },
                *ma6,
            )?;
            let csv = series_csv(
                &grid,
                CalendarScope::AllDays,
                &["ln_general", "ln_ruble", "ln_economy"],
                &[&attention.ln_general, &attention.ln_ruble, &attention.ln_economy],
            );
            emit(&cli, &csv)
        }
        Command::Fit => {
            let config = load_config(&cli)?;
            if config.models.is_empty() {
                return Err(CliError::Config("fit requires a non-empty model list".into()));
            }
            let output = run_pipeline(&config, false)?;
            for table in &output.tables {
                println!("{table}");
            }
            println!("bundle written to {}", output.output_dir.display());
            Ok(())
        }
        Command::Diagnose { series, max_lag } => {
            let values = read_value_series(series)?;
            let serial = auto_portmanteau(&values, *max_lag)?;
            let block = auto_block_length(&values)?;
            let mut out = String::new();
            out.push_str(&format!(
                "serial dependence: Q = {:.4} at lag {} (max {}), p-value = {:.4}\n",
                serial.statistic, serial.lag, serial.max_lag, serial.p_value
            ));
            out.push_str(&format!(
                "stationary-bootstrap expected block length: {:.3}{}\n",
                block.value,
                if block.degenerate { " (degenerate series)" } else { "" }
            ));
            emit(&cli, &out)
        }
        Command::Describe => {
            let config = load_config(&cli)?;
            let mut config = config;
            config.models.clear(); // descriptive statistics only
            let output = run_pipeline(&config, true)?;
            print!(
                "{}",
                intravol_cli::report::render_descriptive_table(&output.descriptives)
            );
            println!("bundle written to {}", output.output_dir.display());
            Ok(())
        }
        Command::Simulate { synth_config } => {
            let mut config = match synth_config {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
                    serde_json::from_str(&text).map_err(|e| CliError::Parse {
                        path: path.clone(),
                        line: e.line(),
                        message: e.to_string(),
                    })?
                }
                None => intravol::diagnostics::SynthConfig::default(),
            };
            if let Some(seed) = cli.seed {
                config.seed = seed;
            }
            if let Some(hours) = cli.window_hours {
                config.window_hours = hours;
            }
            let dir = cli
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from("synthetic"));
            let data = write_synthetic_bundle(&config, &dir)?;
            println!(
                "synthetic bundle written to {} ({} trading windows, seed {})",
                dir.display(),
                data.grid.len(CalendarScope::TradingDays),
                config.seed
            );
            println!("run it with: intravol --config {}/pipeline.json report", dir.display());
            Ok(())
        }
        Command::Report => {
            let config = load_config(&cli)?;
            let output = run_pipeline(&config, true)?;
            for table in &output.tables {
                println!("{table}");
            }
            println!("bundle written to {}", output.output_dir.display());
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
