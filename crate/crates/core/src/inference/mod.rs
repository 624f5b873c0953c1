//! Resampling-based inference and residual diagnostics.
//!
//! Coefficient significance comes from a pairs (row-level) stationary
//! bootstrap: rows of the design are resampled jointly in blocks whose
//! lengths are geometric with a data-driven expected value, preserving the
//! weak dependence between windows. Residual serial dependence is checked
//! with a heteroskedasticity-robust automatic portmanteau test.

mod block_length;
mod bootstrap;
mod portmanteau;

pub use block_length::{auto_block_length, BlockLength};
pub use bootstrap::{
    significance_stars, stationary_block_indices, stationary_bootstrap_pvalues, BootstrapConfig,
    BootstrapResult, DEFAULT_REPLICATIONS, SIGNIFICANCE_LEVELS,
};
pub use portmanteau::{auto_portmanteau, SerialTestResult, DEFAULT_MAX_LAG, PORTMANTEAU_PILOT_Q};
