//! Pipeline configuration: one JSON file driving grid, inputs, models,
//! inference, and output.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use intravol::attention::Category;
use intravol::inference::{DEFAULT_MAX_LAG, DEFAULT_REPLICATIONS};
use intravol::model::ModelSpec;
use intravol::variance::{DEFAULT_MIN_COVERAGE, DEFAULT_SAMPLE_MINUTES};
use intravol::windowing::DEFAULT_WINDOW_HOURS;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub start_date: NaiveDate,
    pub end_date: NaiveDate,
    #[serde(default = "default_window_hours")]
    pub window_hours: u32,
}

fn default_window_hours() -> u32 {
    DEFAULT_WINDOW_HOURS
}

/// Where one currency pair's series come from: raw market files or
/// precomputed window series (as written by `simulate`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PairInput {
    Raw {
        prices: PathBuf,
        iv_quotes: PathBuf,
        #[serde(default = "default_maturity")]
        iv_maturity: String,
    },
    Series { ln_rv: PathBuf, ln_iv: PathBuf },
}

fn default_maturity() -> String {
    "1m".to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairConfig {
    pub name: String,
    #[serde(flatten)]
    pub input: PairInput,
}

/// Attention inputs: a batch manifest to chain, or precomputed log category
/// series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AttentionConfig {
    Manifest {
        manifest: PathBuf,
        #[serde(default = "default_overlap_hours")]
        overlap_hours: usize,
    },
    Series {
        ln_general: PathBuf,
        ln_ruble: PathBuf,
        ln_economy: PathBuf,
    },
}

fn default_overlap_hours() -> usize {
    intravol::attention::DEFAULT_OVERLAP_HOURS
}

/// A model request: a canonical number 1..=7 or a full specification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelChoice {
    Number(u8),
    Spec(ModelSpec),
}

impl ModelChoice {
    pub fn resolve(&self) -> Result<ModelSpec> {
        match self {
            ModelChoice::Number(n) => Ok(ModelSpec::numbered(*n)?),
            ModelChoice::Spec(spec) => Ok(spec.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InferenceConfig {
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default)]
    pub seed: u64,
    /// Expected block length override; selected automatically when absent.
    #[serde(default)]
    pub block_length: Option<f64>,
    #[serde(default = "default_max_lag")]
    pub max_lag: usize,
}

fn default_replications() -> usize {
    DEFAULT_REPLICATIONS
}

fn default_max_lag() -> usize {
    DEFAULT_MAX_LAG
}

impl Default for InferenceConfig {
    fn default() -> Self {
        InferenceConfig {
            replications: DEFAULT_REPLICATIONS,
            seed: 0,
            block_length: None,
            max_lag: DEFAULT_MAX_LAG,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineOptions {
    /// Restrict every model to the common usable row set, keeping nested
    /// R-squared comparisons meaningful.
    #[serde(default = "default_true")]
    pub common_rows: bool,
    /// Replace log attention with the log of its six-window trailing mean.
    #[serde(default)]
    pub attention_ma6: bool,
    #[serde(default = "default_sample_minutes")]
    pub sample_minutes: u32,
    #[serde(default = "default_min_coverage")]
    pub min_coverage: f64,
}

fn default_true() -> bool {
    true
}

fn default_sample_minutes() -> u32 {
    DEFAULT_SAMPLE_MINUTES
}

fn default_min_coverage() -> f64 {
    DEFAULT_MIN_COVERAGE
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            common_rows: true,
            attention_ma6: false,
            sample_minutes: DEFAULT_SAMPLE_MINUTES,
            min_coverage: DEFAULT_MIN_COVERAGE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub grid: GridConfig,
    #[serde(default)]
    pub pairs: Vec<PairConfig>,
    #[serde(default)]
    pub attention: Option<AttentionConfig>,
    #[serde(default)]
    pub models: Vec<ModelChoice>,
    #[serde(default)]
    pub inference: InferenceConfig,
    #[serde(default)]
    pub options: PipelineOptions,
    pub output_dir: PathBuf,
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        let mut config: PipelineConfig = serde_json::from_str(&text).map_err(|e| CliError::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })?;
        // Paths inside the config are relative to the config file.
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        config.rebase(base);
        config.validate()?;
        Ok(config)
    }

    fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&p);
            }
        };
        for pair in &mut self.pairs {
            match &mut pair.input {
                PairInput::Raw { prices, iv_quotes, .. } => {
                    fix(prices);
                    fix(iv_quotes);
                }
                PairInput::Series { ln_rv, ln_iv } => {
                    fix(ln_rv);
                    fix(ln_iv);
                }
            }
        }
        match &mut self.attention {
            Some(AttentionConfig::Manifest { manifest, .. }) => fix(manifest),
            Some(AttentionConfig::Series {
                ln_general,
                ln_ruble,
                ln_economy,
            }) => {
                fix(ln_general);
                fix(ln_ruble);
                fix(ln_economy);
            }
            None => {}
        }
        fix(&mut self.output_dir);
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.start_date > self.grid.end_date {
            return Err(CliError::Config(format!(
                "grid start {} is after end {}",
                self.grid.start_date, self.grid.end_date
            )));
        }
        let needs_attention = self
            .models
            .iter()
            .map(ModelChoice::resolve)
            .collect::<Result<Vec<_>>>()?
            .iter()
            .any(|m| m.attention);
        if needs_attention && self.attention.is_none() {
            return Err(CliError::Config(
                "a requested model uses attention regressors but no attention input is configured"
                    .into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.options.min_coverage) {
            return Err(CliError::Config(format!(
                "min_coverage must be in [0, 1], got {}",
                self.options.min_coverage
            )));
        }
        Ok(())
    }

    pub fn resolved_models(&self) -> Result<Vec<ModelSpec>> {
        self.models.iter().map(ModelChoice::resolve).collect()
    }
}

/// Batch manifest: category -> term -> ordered batch files.
pub type BatchManifest = BTreeMap<Category, BTreeMap<String, Vec<PathBuf>>>;

pub fn load_manifest(path: &Path) -> Result<BatchManifest> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    let mut manifest: BatchManifest = serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        message: e.to_string(),
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    for terms in manifest.values_mut() {
        for files in terms.values_mut() {
            for file in files.iter_mut() {
                if file.is_relative() {
                    *file = base.join(&file);
                }
            }
        }
    }
    for (category, terms) in &manifest {
        if terms.is_empty() {
            return Err(CliError::Manifest {
                path: path.to_path_buf(),
                message: format!("category {:?} has no terms", category.label()),
            });
        }
    }
    Ok(manifest)
}
