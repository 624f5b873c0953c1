//! Report types and emission: JSON fit reports, aligned-text tables in the
//! panel layout (A autoregressive, B implied volatility, C attention,
//! D seasonality, E onset, F diagnostics), and CSV descriptives.

use serde::{Deserialize, Serialize};

use intravol::diagnostics::DescriptiveRow;
use intravol::inference::{significance_stars, SerialTestResult};
use intravol::model::{DesignMatrix, OlsFit};

use crate::ingest::format_timestamp;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientReport {
    pub label: String,
    pub estimate: f64,
    pub p_value: f64,
    pub stars: String,
    pub standard_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapMeta {
    pub seed: u64,
    pub replications: usize,
    pub expected_block_length: f64,
    pub block_length_auto: bool,
    pub redraws: usize,
    pub excessive_redraws: bool,
    /// Resampling scheme actually used, recorded so alternates can be
    /// compared.
    pub scheme: String,
    /// Series the block-length selector was applied to.
    pub block_length_target: String,
}

/// Everything reported about one fitted specification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub pair: String,
    pub model: String,
    pub coefficients: Vec<CoefficientReport>,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    pub rows_used: usize,
    pub columns: usize,
    pub dropped_windows: usize,
    pub condition: f64,
    pub condition_warning: bool,
    pub serial_dependence: SerialTestResult,
    pub bootstrap: BootstrapMeta,
    pub residuals: Vec<f64>,
}

impl FitReport {
    pub fn assemble(
        pair: &str,
        model: &str,
        design: &DesignMatrix,
        fit: &OlsFit,
        bootstrap: &intravol::inference::BootstrapResult,
        serial: SerialTestResult,
    ) -> FitReport {
        let coefficients = design
            .labels
            .iter()
            .zip(&fit.coefficients)
            .zip(bootstrap.p_values.iter().zip(&bootstrap.standard_errors))
            .map(|((label, estimate), (p, se))| CoefficientReport {
                label: label.clone(),
                estimate: *estimate,
                p_value: *p,
                stars: significance_stars(*p).to_string(),
                standard_error: *se,
            })
            .collect();
        FitReport {
            pair: pair.to_string(),
            model: model.to_string(),
            coefficients,
            r_squared: fit.r_squared,
            adj_r_squared: fit.adj_r_squared,
            rows_used: fit.rows,
            columns: fit.cols,
            dropped_windows: design.dropped,
            condition: fit.condition,
            condition_warning: fit.condition_warning,
            serial_dependence: serial,
            bootstrap: BootstrapMeta {
                seed: bootstrap.seed,
                replications: bootstrap.replications,
                expected_block_length: bootstrap.expected_block_length,
                block_length_auto: bootstrap.block_length_auto,
                redraws: bootstrap.redraws,
                excessive_redraws: bootstrap.excessive_redraws,
                scheme: "pairs_stationary".to_string(),
                block_length_target: "response".to_string(),
            },
            residuals: fit.residuals.clone(),
        }
    }

    fn coefficient(&self, label: &str) -> Option<&CoefficientReport> {
        self.coefficients.iter().find(|c| c.label == label)
    }
}

/// Panel grouping of a column label.
fn panel_of(label: &str) -> usize {
    if label == "Constant" || label == "ln RV[t-1]" || label == "ln V5[t-1]" {
        0 // A: autoregressive terms
    } else if label.starts_with("dln IV") || label.starts_with("ln IV") {
        1 // B: implied volatility measures
    } else if label.starts_with("ln G") || label.starts_with("ln R[") || label.starts_with("ln E") {
        2 // C: attention measures
    } else if label.contains("I(j=") {
        3 // D: intraday seasonality
    } else {
        4 // E: onset days
    }
}

const PANEL_TITLES: [&str; 5] = [
    "Panel A: Auto-regressive term",
    "Panel B: Implied volatility measures",
    "Panel C: Attention measures",
    "Panel D: Control variables - intraday seasonality",
    "Panel E: Control variables - onset days",
];

/// Renders fitted models side by side as an aligned text table.
pub fn render_fit_table(pair: &str, reports: &[FitReport]) -> String {
    let mut labels: Vec<String> = Vec::new();
    for report in reports {
        for c in &report.coefficients {
            if !labels.iter().any(|l| l == &c.label) {
                labels.push(c.label.clone());
            }
        }
    }
    labels.sort_by_key(|l| panel_of(l));

    let name_width = labels
        .iter()
        .map(String::len)
        .chain(PANEL_TITLES.iter().map(|t| t.len()))
        .chain(["Serial dependence (pval)".len()].into_iter())
        .max()
        .unwrap_or(24)
        + 2;
    let col_width = reports
        .iter()
        .map(|r| r.model.len() + 2)
        .max()
        .unwrap_or(10)
        .max(12);

    let mut out = String::new();
    out.push_str(&format!("Volatility model for {pair}\n"));
    out.push_str(&"=".repeat(name_width + col_width * reports.len()));
    out.push('\n');
    out.push_str(&format!("{:name_width$}", ""));
    for report in reports {
        out.push_str(&format!("{:>col_width$}", report.model));
    }
    out.push('\n');

    let mut current_panel = usize::MAX;
    for label in &labels {
        let panel = panel_of(label);
        if panel != current_panel {
            current_panel = panel;
            out.push_str(&format!("{}\n", PANEL_TITLES[panel]));
        }
        out.push_str(&format!("{label:name_width$}"));
        for report in reports {
            match report.coefficient(label) {
                Some(c) => {
                    let cell = format!("{:.3}{}", c.estimate, pad_stars(&c.stars));
                    out.push_str(&format!("{cell:>col_width$}"));
                }
                None => out.push_str(&format!("{:>col_width$}", ".")),
            }
        }
        out.push('\n');
    }

    out.push_str("Panel F: Model diagnostics\n");
    let mut diag_row = |name: &str, f: &dyn Fn(&FitReport) -> String| {
        out.push_str(&format!("{name:name_width$}"));
        for report in reports {
            out.push_str(&format!("{:>col_width$}", f(report)));
        }
        out.push('\n');
    };
    diag_row("Serial dependence (pval)", &|r| {
        format!("{:.2}", r.serial_dependence.p_value)
    });
    diag_row("R^2", &|r| format!("{:.1}%", 100.0 * r.r_squared));
    diag_row("adjusted R^2", &|r| format!("{:.1}%", 100.0 * r.adj_r_squared));
    diag_row("Rows", &|r| r.rows_used.to_string());
    out.push_str(
        "Notes: a, b, c denote 10%, 5%, and 1% significance (stationary bootstrap).\n",
    );
    out
}

fn pad_stars(stars: &str) -> String {
    if stars.is_empty() {
        "  ".to_string()
    } else {
        format!(" {stars}")
    }
}

/// Long-form CSV of every coefficient across models.
pub fn coefficients_csv(reports: &[FitReport]) -> String {
    let mut out = String::from("pair,model,label,estimate,standard_error,p_value,stars\n");
    for report in reports {
        for c in &report.coefficients {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                report.pair, report.model, c.label, c.estimate, c.standard_error, c.p_value, c.stars
            ));
        }
    }
    out
}

/// Aligned text rendering of descriptive rows.
pub fn render_descriptive_table(rows: &[DescriptiveRow]) -> String {
    let mut out = String::new();
    let name_width = rows.iter().map(|r| r.label.len()).max().unwrap_or(8).max(8) + 2;
    out.push_str(&format!(
        "{:name_width$}{:>9}{:>9}{:>10} {:<20}{:>10} {:<20}{:>8}{:>8}{:>7}{:>7}{:>7}\n",
        "Series", "Mean", "SD", "Min", "Date/Hour", "Max", "Date/Hour", "Skew", "Kurt", "rho1",
        "rho6", "rho30"
    ));
    let opt = |v: Option<f64>, width: usize, precision: usize| -> String {
        match v {
            Some(x) => format!("{x:>width$.precision$}"),
            None => format!("{:>width$}", "."),
        }
    };
    for row in rows {
        out.push_str(&format!(
            "{:name_width$}{:>9.2}{:>9.2}{:>10.2} {:<20}{:>10.2} {:<20}{}{}{}{}{}\n",
            row.label,
            row.mean,
            row.sd,
            row.min.value,
            format!("{} {}", row.min.date.format("%d-%b-%y"), row.min.start.format("%H:%M")),
            row.max.value,
            format!("{} {}", row.max.date.format("%d-%b-%y"), row.max.start.format("%H:%M")),
            opt(row.skewness, 8, 2),
            opt(row.kurtosis, 8, 2),
            opt(row.rho1, 7, 2),
            opt(row.rho6, 7, 2),
            opt(row.rho30, 7, 2),
        ));
    }
    out.push_str("Notes: kurtosis is non-excess; skewness and kurtosis are moment ratios;\n");
    out.push_str("autocorrelations are computed on the in-scope sequence ignoring calendar gaps.\n");
    out
}

/// CSV form of descriptive rows.
pub fn descriptive_csv(rows: &[DescriptiveRow]) -> String {
    let mut out = String::from(
        "label,count,mean,sd,min,min_date,min_start,max,max_date,max_start,skewness,kurtosis,rho1,rho6,rho30\n",
    );
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.label,
            r.count,
            r.mean,
            r.sd,
            r.min.value,
            r.min.date,
            format_timestamp(r.min.start),
            r.max.value,
            r.max.date,
            format_timestamp(r.max.start),
            opt(r.skewness),
            opt(r.kurtosis),
            opt(r.rho1),
            opt(r.rho6),
            opt(r.rho30),
        ));
    }
    out
}
