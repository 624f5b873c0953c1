//! Pipeline library behind the `intravol` command-line interface:
//! configuration, file ingestion, orchestration, and report emission.

pub mod config;
pub mod error;
pub mod ingest;
pub mod pipeline;
pub mod report;
pub mod synth;

pub use config::PipelineConfig;
pub use error::{CliError, Result};
pub use pipeline::{run_pipeline, RunOutput};
