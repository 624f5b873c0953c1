//! Pairs stationary bootstrap for OLS coefficient significance.
//!
//! Each replication resamples whole (response, regressor-row) pairs: block
//! start points are uniform over the rows, block lengths are geometric with
//! the configured mean, and indexing wraps around the sample end. The model
//! is refit per replication and two-sided p-values come from the centered
//! bootstrap distribution of each estimate:
//!
//! ```text
//! p_j = (1/B) * #{ b : |beta*_jb - beta_j| >= |beta_j| }
//! ```
//!
//! Replication `b` draws from an independent, deterministically derived RNG
//! substream, so results are bit-identical regardless of execution order or
//! thread count.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::inference::auto_block_length;
use crate::model::{ls_coefficients, DesignMatrix, OlsFit};

/// Default bootstrap replication count.
pub const DEFAULT_REPLICATIONS: usize = 4999;

/// Significance thresholds for the star convention (10%, 5%, 1%).
pub const SIGNIFICANCE_LEVELS: [f64; 3] = [0.10, 0.05, 0.01];

/// Redraw attempts per replication before giving up on a full-rank resample.
const MAX_REDRAWS_PER_REPLICATION: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BootstrapConfig {
    pub replications: usize,
    pub seed: u64,
    /// Expected block length; selected automatically from the response
    /// series when absent.
    pub expected_block_length: Option<f64>,
}

impl BootstrapConfig {
    pub fn new(seed: u64) -> Self {
        BootstrapConfig {
            replications: DEFAULT_REPLICATIONS,
            seed,
            expected_block_length: None,
        }
    }
}

/// Bootstrap p-values plus the resampling metadata needed to reproduce them.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BootstrapResult {
    pub p_values: Vec<f64>,
    /// Standard deviation of each coefficient's bootstrap distribution.
    pub standard_errors: Vec<f64>,
    pub expected_block_length: f64,
    pub block_length_auto: bool,
    pub replications: usize,
    pub seed: u64,
    /// Rank-deficient resamples that were redrawn.
    pub redraws: usize,
    /// Set when redraws exceeded 10% of the replication count.
    pub excessive_redraws: bool,
}

/// Significance stars for a p-value: `c` at 1%, `b` at 5%, `a` at 10%.
pub fn significance_stars(p_value: f64) -> &'static str {
    if p_value < SIGNIFICANCE_LEVELS[2] {
        "c"
    } else if p_value < SIGNIFICANCE_LEVELS[1] {
        "b"
    } else if p_value < SIGNIFICANCE_LEVELS[0] {
        "a"
    } else {
        ""
    }
}

/// Stationary-bootstrap row indices: length-`n` resample with uniform block
/// starts, geometric block lengths of mean `expected_block_length`, and
/// wraparound.
pub fn stationary_block_indices(
    n: usize,
    expected_block_length: f64,
    rng: &mut impl Rng,
) -> Vec<usize> {
    debug_assert!(n > 0);
    let p = (1.0 / expected_block_length.max(1.0)).clamp(f64::MIN_POSITIVE, 1.0);
    let mut indices = Vec::with_capacity(n);
    while indices.len() < n {
        let start = rng.random_range(0..n);
        // Inverse-transform geometric on {1, 2, ...} with mean 1/p.
        let u: f64 = rng.random();
        let length = if p >= 1.0 {
            1
        } else {
            1 + ((1.0 - u).ln() / (1.0 - p).ln()).floor() as usize
        };
        let length = length.min(n - indices.len());
        for k in 0..length {
            indices.push((start + k) % n);
        }
    }
    indices
}

fn resample(design: &DesignMatrix, indices: &[usize]) -> (DMatrix<f64>, DVector<f64>) {
    let k = design.n_cols();
    let a = DMatrix::from_fn(indices.len(), k, |i, j| design.columns[j][indices[i]]);
    let y = DVector::from_fn(indices.len(), |i, _| design.response[indices[i]]);
    (a, y)
}

/// Two-sided bootstrap p-values for every coefficient of a fitted design.
pub fn stationary_bootstrap_pvalues(
    design: &DesignMatrix,
    fit: &OlsFit,
    config: &BootstrapConfig,
) -> Result<BootstrapResult> {
    if config.replications == 0 {
        return Err(Error::InvalidBootstrapConfig(
            "replication count must be at least 1".into(),
        ));
    }
    if let Some(b) = config.expected_block_length {
        if !(b.is_finite() && b >= 1.0) {
            return Err(Error::InvalidBootstrapConfig(format!(
                "expected block length must be >= 1, got {b}"
            )));
        }
    }
    let n = design.n_rows();
    let k = design.n_cols();
    if n == 0 || fit.coefficients.len() != k {
        return Err(Error::InvalidBootstrapConfig(
            "fit does not match design".into(),
        ));
    }

    // Block length target: the response series carries the persistence the
    // blocks must preserve.
    let (block_length, auto) = match config.expected_block_length {
        Some(b) => (b, false),
        None => (auto_block_length(&design.response)?.value, true),
    };

    let replicate = |rep: usize| -> std::result::Result<(Vec<f64>, usize), Error> {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(rep as u64 + 1);
        for attempt in 0..MAX_REDRAWS_PER_REPLICATION {
            let indices = stationary_block_indices(n, block_length, &mut rng);
            let (a, y) = resample(design, &indices);
            if let Some(beta) = ls_coefficients(a, &y) {
                return Ok((beta.iter().copied().collect(), attempt));
            }
        }
        Err(Error::BootstrapRedrawExhausted {
            replication: rep,
            attempts: MAX_REDRAWS_PER_REPLICATION,
        })
    };

    let outcomes: Vec<(Vec<f64>, usize)> = (0..config.replications)
        .into_par_iter()
        .map(replicate)
        .collect::<std::result::Result<_, _>>()?;

    let redraws: usize = outcomes.iter().map(|(_, r)| r).sum();
    let b = config.replications as f64;
    let mut p_values = Vec::with_capacity(k);
    let mut standard_errors = Vec::with_capacity(k);
    for j in 0..k {
        let center = fit.coefficients[j];
        let mut exceed = 0usize;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for (beta, _) in &outcomes {
            let dev = beta[j] - center;
            if dev.abs() >= center.abs() {
                exceed += 1;
            }
            sum += beta[j];
            sum_sq += beta[j] * beta[j];
        }
        p_values.push(exceed as f64 / b);
        let mean = sum / b;
        let var = (sum_sq / b - mean * mean).max(0.0);
        standard_errors.push(var.sqrt());
    }

    Ok(BootstrapResult {
        p_values,
        standard_errors,
        expected_block_length: block_length,
        block_length_auto: auto,
        replications: config.replications,
        seed: config.seed,
        redraws,
        excessive_redraws: (redraws as f64) > 0.1 * b,
    })
}
