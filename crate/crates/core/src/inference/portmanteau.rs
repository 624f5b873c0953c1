//! Heteroskedasticity-robust automatic portmanteau test for residual serial
//! dependence.
//!
//! For centered residuals the robustified squared autocorrelation at lag j is
//! `rho~_j^2 = gamma_j^2 / tau_j` with
//!
//! ```text
//! gamma_j = (n-j)^-1 sum_t  a_t a_{t-j}
//! tau_j   = (n-j)^-1 sum_t  a_t^2 a_{t-j}^2
//! ```
//!
//! The cumulative statistic `Q_p = n * sum_{j<=p} rho~_j^2` is maximized over
//! a penalty that switches between a log-n (BIC-like) and a constant-2
//! (AIC-like) term depending on whether `sqrt(n) * max_j |rho~_j|` exceeds
//! `sqrt(q * ln n)`, pilot constant q = 2.4. The selected statistic is
//! compared against chi-square with one degree of freedom.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Default maximum candidate lag: 30 windows, one trading week on the
/// default grid.
pub const DEFAULT_MAX_LAG: usize = 30;

/// Pilot constant of the penalty switching rule.
pub const PORTMANTEAU_PILOT_Q: f64 = 2.4;

/// Outcome of the automatic portmanteau test.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SerialTestResult {
    pub statistic: f64,
    /// Data-driven lag at which the penalized statistic peaks.
    pub lag: usize,
    pub max_lag: usize,
    pub p_value: f64,
}

/// Runs the automatic portmanteau test on a residual series.
///
/// Requires `residuals.len() > max_lag + 10`.
pub fn auto_portmanteau(residuals: &[f64], max_lag: usize) -> Result<SerialTestResult> {
    let n = residuals.len();
    if max_lag == 0 {
        return Err(Error::InvalidBootstrapConfig(
            "portmanteau max lag must be at least 1".into(),
        ));
    }
    if n <= max_lag + 10 {
        return Err(Error::SeriesTooShort {
            what: "portmanteau test",
            needed: max_lag + 11,
            got: n,
        });
    }
    for (i, &v) in residuals.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFiniteValue { value: v, position: i });
        }
    }

    let nf = n as f64;
    let mean = residuals.iter().sum::<f64>() / nf;
    let a: Vec<f64> = residuals.iter().map(|v| v - mean).collect();

    // rho~_j^2 for j = 1..=max_lag (index 0 unused).
    let mut rho_sq = vec![0.0; max_lag + 1];
    for j in 1..=max_lag {
        let mut gamma = 0.0;
        let mut tau = 0.0;
        for t in j..n {
            gamma += a[t] * a[t - j];
            tau += a[t] * a[t] * a[t - j] * a[t - j];
        }
        let denom = (n - j) as f64;
        gamma /= denom;
        tau /= denom;
        if tau <= 0.0 {
            return Err(Error::DegenerateResiduals { lag: j });
        }
        rho_sq[j] = gamma * gamma / tau;
    }

    let max_abs_rho = rho_sq.iter().map(|v| v.sqrt()).fold(0.0, f64::max);
    let bic_regime = nf.sqrt() * max_abs_rho <= (PORTMANTEAU_PILOT_Q * nf.ln()).sqrt();
    let penalty = |p: usize| -> f64 {
        if bic_regime {
            p as f64 * nf.ln()
        } else {
            2.0 * p as f64
        }
    };

    let mut best_lag = 1;
    let mut best_objective = f64::NEG_INFINITY;
    let mut cumulative = 0.0;
    for p in 1..=max_lag {
        cumulative += rho_sq[p];
        let objective = nf * cumulative - penalty(p);
        if objective > best_objective {
            best_objective = objective;
            best_lag = p;
        }
    }
    let statistic: f64 = nf * rho_sq[1..=best_lag].iter().sum::<f64>();
    let chi = ChiSquared::new(1.0).expect("one degree of freedom");
    Ok(SerialTestResult {
        statistic,
        lag: best_lag,
        max_lag,
        p_value: 1.0 - chi.cdf(statistic),
    })
}
