//! Design-matrix construction with lag alignment and row bookkeeping.

use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::windowing::{CalendarScope, WindowGrid, WindowSeries};

/// Trailing windows entering the five-period average-volatility regressor.
const V5_WINDOW: usize = 5;

/// Input series for design construction. Realized and implied series live on
/// the trading scope, attention indices on the all-days scope.
#[derive(Debug, Clone, Copy)]
pub struct DesignInputs<'a> {
    pub ln_rv: &'a WindowSeries,
    pub ln_iv: Option<&'a WindowSeries>,
    pub dln_iv: Option<&'a WindowSeries>,
    pub ln_general: Option<&'a WindowSeries>,
    pub ln_ruble: Option<&'a WindowSeries>,
    pub ln_economy: Option<&'a WindowSeries>,
}

/// Materialized regression data. `rows[i]` is the trading-scope index of the
/// response window behind row `i`, so every number is traceable back to the
/// grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    pub labels: Vec<String>,
    pub rows: Vec<usize>,
    pub response: Vec<f64>,
    /// Column-major regressors; `columns[j].len() == rows.len()`.
    pub columns: Vec<Vec<f64>>,
    /// Trading windows dropped because the response or a regressor was
    /// missing.
    pub dropped: usize,
}

impl DesignMatrix {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.labels.len()
    }

    pub(crate) fn to_matrix(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.n_rows(), self.n_cols(), |i, j| self.columns[j][i])
    }

    /// A copy with only the rows at `indices` (positions into `rows`).
    pub fn select_rows(&self, indices: &[usize]) -> DesignMatrix {
        DesignMatrix {
            labels: self.labels.clone(),
            rows: indices.iter().map(|&i| self.rows[i]).collect(),
            response: indices.iter().map(|&i| self.response[i]).collect(),
            columns: self
                .columns
                .iter()
                .map(|c| indices.iter().map(|&i| c[i]).collect())
                .collect(),
            dropped: self.dropped,
        }
    }
}

pub(crate) fn design_labels(grid: &WindowGrid, spec: &ModelSpec) -> Vec<String> {
    let w = grid.windows_per_day();
    let mut labels = vec!["Constant".to_string(), "ln RV[t-1]".to_string()];
    for j in 1..w {
        labels.push(format!("ln RV[t-1] x I(j={j})"));
    }
    for day in &spec.onset_days {
        labels.push(format!("ln RV[t-1] x I(q={day})"));
    }
    if spec.attention {
        labels.push("ln G[t-1]".to_string());
        labels.push("ln R[t-1]".to_string());
        labels.push("ln E[t-1]".to_string());
    }
    if spec.iv_diff {
        labels.push("dln IV[t-1]".to_string());
    }
    if spec.iv_level {
        labels.push("ln IV[t-1]".to_string());
    }
    if spec.v5bar {
        labels.push("ln V5[t-1]".to_string());
    }
    labels
}

fn require<'a>(
    series: Option<&'a WindowSeries>,
    label: &str,
    scope: CalendarScope,
) -> Result<&'a WindowSeries> {
    let series = series.ok_or_else(|| Error::AllMissingColumn {
        label: label.to_string(),
    })?;
    if series.scope() != scope {
        return Err(Error::WrongScope {
            label: label.to_string(),
            expected: scope.label(),
        });
    }
    if series.present_count() == 0 {
        return Err(Error::AllMissingColumn {
            label: label.to_string(),
        });
    }
    Ok(series)
}

fn validate_inputs(inputs: &DesignInputs, spec: &ModelSpec) -> Result<()> {
    require(Some(inputs.ln_rv), "ln RV", CalendarScope::TradingDays)?;
    if spec.attention {
        require(inputs.ln_general, "ln G[t-1]", CalendarScope::AllDays)?;
        require(inputs.ln_ruble, "ln R[t-1]", CalendarScope::AllDays)?;
        require(inputs.ln_economy, "ln E[t-1]", CalendarScope::AllDays)?;
    }
    if spec.iv_diff {
        require(inputs.dln_iv, "dln IV[t-1]", CalendarScope::TradingDays)?;
    }
    if spec.iv_level {
        require(inputs.ln_iv, "ln IV[t-1]", CalendarScope::TradingDays)?;
    }
    Ok(())
}

/// One design row for response window `t`, or `None` when the response or a
/// required regressor is missing.
fn design_row(
    grid: &WindowGrid,
    inputs: &DesignInputs,
    spec: &ModelSpec,
    t: usize,
) -> Option<(f64, Vec<f64>)> {
    let response = inputs.ln_rv.get(t)?;
    let lag_t = grid.lag_window(t, CalendarScope::TradingDays)?;
    let lnv1 = inputs.ln_rv.get(lag_t)?;
    let window = grid.window(CalendarScope::TradingDays, t);
    let w = grid.windows_per_day() as usize;

    let mut row = Vec::with_capacity(2 + w - 1 + spec.onset_days.len() + 6);
    row.push(1.0);
    row.push(lnv1);
    for j in 1..w {
        row.push(if window.slot as usize == j { lnv1 } else { 0.0 });
    }
    for day in &spec.onset_days {
        row.push(if window.date == *day { lnv1 } else { 0.0 });
    }
    if spec.attention {
        let all_lag = grid.lag_window(t, CalendarScope::AllDays)?;
        row.push(inputs.ln_general?.get(all_lag)?);
        row.push(inputs.ln_ruble?.get(all_lag)?);
        row.push(inputs.ln_economy?.get(all_lag)?);
    }
    if spec.iv_diff {
        row.push(inputs.dln_iv?.get(lag_t)?);
    }
    if spec.iv_level {
        row.push(inputs.ln_iv?.get(lag_t)?);
    }
    if spec.v5bar {
        let mut sum = 0.0;
        for k in 1..=V5_WINDOW {
            sum += inputs.ln_rv.get(t.checked_sub(k)?)?.exp();
        }
        row.push((sum / V5_WINDOW as f64).ln());
    }
    Some((response, row))
}

fn assemble(
    grid: &WindowGrid,
    inputs: &DesignInputs,
    spec: &ModelSpec,
    keep: impl Fn(usize) -> bool,
) -> DesignMatrix {
    let labels = design_labels(grid, spec);
    let mut rows = Vec::new();
    let mut response = Vec::new();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); labels.len()];
    let mut dropped = 0usize;
    for t in 0..grid.len(CalendarScope::TradingDays) {
        match design_row(grid, inputs, spec, t) {
            Some((y, row)) if keep(t) => {
                debug_assert_eq!(row.len(), labels.len());
                rows.push(t);
                response.push(y);
                for (column, value) in columns.iter_mut().zip(row) {
                    column.push(value);
                }
            }
            _ => dropped += 1,
        }
    }
    DesignMatrix {
        labels,
        rows,
        response,
        columns,
        dropped,
    }
}

/// Builds the design for one specification, keeping every trading window
/// whose response and regressors are all present.
pub fn build_design(
    grid: &WindowGrid,
    inputs: &DesignInputs,
    spec: &ModelSpec,
) -> Result<DesignMatrix> {
    validate_inputs(inputs, spec)?;
    Ok(assemble(grid, inputs, spec, |_| true))
}

/// Builds designs for several specifications on their common row set (the
/// intersection of per-spec usable rows), so nested fits are comparable.
pub fn build_designs_common(
    grid: &WindowGrid,
    inputs: &DesignInputs,
    specs: &[ModelSpec],
) -> Result<Vec<DesignMatrix>> {
    for spec in specs {
        validate_inputs(inputs, spec)?;
    }
    let n = grid.len(CalendarScope::TradingDays);
    let mut usable = vec![true; n];
    for spec in specs {
        for (t, flag) in usable.iter_mut().enumerate() {
            if *flag && design_row(grid, inputs, spec, t).is_none() {
                *flag = false;
            }
        }
    }
    Ok(specs
        .iter()
        .map(|spec| assemble(grid, inputs, spec, |t| usable[t]))
        .collect())
}
