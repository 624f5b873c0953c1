//! Writes a synthetic dataset as a pipeline-consumable bundle.

use std::path::{Path, PathBuf};

use intravol::diagnostics::{simulate, SynthConfig, SynthDataset};
use intravol::windowing::CalendarScope;

use crate::config::{
    AttentionConfig, GridConfig, InferenceConfig, ModelChoice, PairConfig, PairInput,
    PipelineConfig, PipelineOptions,
};
use crate::error::{CliError, Result};
use crate::ingest::write_window_series;

/// Simulates a dataset and writes it under `dir` together with the true
/// coefficients and a ready-to-run pipeline configuration.
pub fn write_synthetic_bundle(config: &SynthConfig, dir: &Path) -> Result<SynthDataset> {
    std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    let data = simulate(config)?;
    let grid = &data.grid;

    write_window_series(&dir.join("ln_rv.csv"), grid, CalendarScope::TradingDays, &data.ln_rv)?;
    write_window_series(&dir.join("ln_iv.csv"), grid, CalendarScope::TradingDays, &data.ln_iv)?;
    write_window_series(
        &dir.join("ln_general.csv"),
        grid,
        CalendarScope::AllDays,
        &data.ln_general,
    )?;
    write_window_series(&dir.join("ln_ruble.csv"), grid, CalendarScope::AllDays, &data.ln_ruble)?;
    write_window_series(
        &dir.join("ln_economy.csv"),
        grid,
        CalendarScope::AllDays,
        &data.ln_economy,
    )?;

    let truth: Vec<serde_json::Value> = data
        .truth
        .iter()
        .map(|(label, value)| serde_json::json!({ "label": label, "value": value }))
        .collect();
    let mut truth_text =
        serde_json::to_string_pretty(&serde_json::json!({ "seed": config.seed, "coefficients": truth }))
            .expect("serializable truth");
    truth_text.push('\n');
    std::fs::write(dir.join("truth.json"), truth_text).map_err(CliError::io(dir.join("truth.json")))?;

    let synth_text = serde_json::to_string_pretty(config).expect("serializable synth config");
    std::fs::write(dir.join("synth_config.json"), synth_text + "\n")
        .map_err(CliError::io(dir.join("synth_config.json")))?;

    let pipeline = PipelineConfig {
        grid: GridConfig {
            start_date: config.start_date,
            end_date: config.end_date,
            window_hours: config.window_hours,
        },
        pairs: vec![PairConfig {
            name: "SYNTH".to_string(),
            input: PairInput::Series {
                ln_rv: PathBuf::from("ln_rv.csv"),
                ln_iv: PathBuf::from("ln_iv.csv"),
            },
        }],
        attention: Some(AttentionConfig::Series {
            ln_general: PathBuf::from("ln_general.csv"),
            ln_ruble: PathBuf::from("ln_ruble.csv"),
            ln_economy: PathBuf::from("ln_economy.csv"),
        }),
        models: (1..=7).map(ModelChoice::Number).collect(),
        inference: InferenceConfig {
            seed: config.seed,
            ..InferenceConfig::default()
        },
        options: PipelineOptions::default(),
        output_dir: PathBuf::from("out"),
    };
    let pipeline_text = serde_json::to_string_pretty(&pipeline).expect("serializable config");
    std::fs::write(dir.join("pipeline.json"), pipeline_text + "\n")
        .map_err(CliError::io(dir.join("pipeline.json")))?;

    Ok(data)
}
