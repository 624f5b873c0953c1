//! Least-squares fitting via column-pivoted QR, with rank and conditioning
//! diagnostics.

use nalgebra::{DMatrix, DVector, RowDVector};

use crate::error::{Error, Result};
use crate::model::{DesignMatrix, ModelSpec};

/// Condition estimates above this trigger a warning in the fit.
pub const CONDITION_WARN_THRESHOLD: f64 = 1e8;

/// Relative tolerance on R's diagonal for declaring rank deficiency.
const RANK_TOLERANCE: f64 = 1e-10;

/// Coefficients and fit statistics for one estimated specification.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct OlsFit {
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    pub fitted: Vec<f64>,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    /// Ratio of the largest to smallest |R_ii| of the pivoted QR factor.
    pub condition: f64,
    pub condition_warning: bool,
    pub rows: usize,
    pub cols: usize,
}

/// Solves min ||A b - y|| by column-pivoted QR.
///
/// Returns the coefficient vector and a condition estimate, or the original
/// indices of the columns pivoted out when A is rank deficient.
fn ls_solve(
    a: DMatrix<f64>,
    y: &DVector<f64>,
) -> std::result::Result<(DVector<f64>, f64), Vec<usize>> {
    let k = a.ncols();
    let qr = a.col_piv_qr();
    let r = qr.r();
    let diag: Vec<f64> = (0..k).map(|i| r[(i, i)].abs()).collect();
    let dmax = diag.iter().copied().fold(0.0, f64::max);
    let deficient: Vec<usize> = (0..k).filter(|&i| diag[i] <= RANK_TOLERANCE * dmax).collect();
    if dmax == 0.0 || !deficient.is_empty() {
        // Map pivoted positions back to original column indices.
        let mut order = RowDVector::from_iterator(k, 0..k);
        qr.p().permute_columns(&mut order);
        let mut original: Vec<usize> = deficient.iter().map(|&pos| order[pos]).collect();
        original.sort_unstable();
        return Err(original);
    }
    let dmin = diag.iter().copied().fold(f64::INFINITY, f64::min);

    let mut qty = y.clone();
    qr.q_tr_mul(&mut qty);
    let rhs = qty.rows(0, k).into_owned();
    let mut beta = r
        .solve_upper_triangular(&rhs)
        .expect("full-rank triangular solve");
    qr.p().inv_permute_rows(&mut beta);
    Ok((beta, dmax / dmin))
}

/// Lean coefficient-only solve for resampling loops; `None` when the
/// resampled design is rank deficient.
pub(crate) fn ls_coefficients(a: DMatrix<f64>, y: &DVector<f64>) -> Option<DVector<f64>> {
    ls_solve(a, y).ok().map(|(beta, _)| beta)
}

/// Ordinary least squares on a design matrix.
pub fn ols_fit(design: &DesignMatrix) -> Result<OlsFit> {
    let n = design.n_rows();
    let k = design.n_cols();
    if n <= k {
        return Err(Error::TooFewRows { rows: n, cols: k });
    }
    let a = design.to_matrix();
    let y = DVector::from_column_slice(&design.response);
    let (beta, condition) = ls_solve(a.clone(), &y).map_err(|deficient| Error::RankDeficient {
        columns: deficient.iter().map(|&j| design.labels[j].clone()).collect(),
    })?;
    let fitted = &a * &beta;
    let residuals = &y - &fitted;
    let ssr = residuals.norm_squared();
    let ybar = y.mean();
    let sst: f64 = y.iter().map(|v| (v - ybar) * (v - ybar)).sum();
    let r_squared = if sst > 0.0 {
        (1.0 - ssr / sst).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let adj_r_squared = 1.0 - (1.0 - r_squared) * (n as f64 - 1.0) / ((n - k) as f64);
    Ok(OlsFit {
        coefficients: beta.iter().copied().collect(),
        residuals: residuals.iter().copied().collect(),
        fitted: fitted.iter().copied().collect(),
        r_squared,
        adj_r_squared,
        condition,
        condition_warning: condition > CONDITION_WARN_THRESHOLD,
        rows: n,
        cols: k,
    })
}

/// One nested pair in an R-squared ordering report.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct NestingPair {
    pub smaller: String,
    pub larger: String,
    pub smaller_r2: f64,
    pub larger_r2: f64,
    pub smaller_rows: usize,
    pub larger_rows: usize,
    pub monotone: bool,
}

/// R-squared monotonicity report across every strictly nested pair of the
/// fitted specifications. Violations indicate row-set mismatches rather than
/// estimation errors.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct NestingCheck {
    pub pairs: Vec<NestingPair>,
    pub all_monotone: bool,
}

pub fn nested_r2_check(specs: &[ModelSpec], fits: &[OlsFit]) -> NestingCheck {
    let mut pairs = Vec::new();
    for (i, small) in specs.iter().enumerate() {
        for (j, large) in specs.iter().enumerate() {
            if i != j && small.is_strictly_nested_in(large) {
                let monotone = fits[j].r_squared >= fits[i].r_squared;
                pairs.push(NestingPair {
                    smaller: small.label.clone(),
                    larger: large.label.clone(),
                    smaller_r2: fits[i].r_squared,
                    larger_r2: fits[j].r_squared,
                    smaller_rows: fits[i].rows,
                    larger_rows: fits[j].rows,
                    monotone,
                });
            }
        }
    }
    let all_monotone = pairs.iter().all(|p| p.monotone);
    NestingCheck { pairs, all_monotone }
}
