//! Model specifications, design matrices, and OLS fitting.
//!
//! The modeled regression explains next-window log realized variance with
//! its own lag, lag interactions with window-of-day and onset-day dummies,
//! and optional lagged attention and implied-volatility regressors:
//!
//! ```text
//! ln V_t = b0 + b1 ln V_{t-1}
//!        + ln V_{t-1} * sum_j gamma_j I_t(j)      (j = 1..w-1, baseline j = w)
//!        + ln V_{t-1} * sum_q lambda_q I_t(q)     (onset days)
//!        + eta_1 ln G_{t-1} + eta_2 ln R_{t-1} + eta_3 ln E_{t-1}
//!        + pi_1 dln IV_{t-1} + pi_2 ln IV_{t-1} + e_t
//! ```
//!
//! Models 1-7 are flag combinations over the optional blocks; Model 1 keeps
//! only the autoregressive core, Model 7 turns everything on.

mod design;
mod ols;

pub use design::{build_design, build_designs_common, DesignInputs, DesignMatrix};
pub use ols::{
    nested_r2_check, ols_fit, NestingCheck, NestingPair, OlsFit, CONDITION_WARN_THRESHOLD,
};
pub(crate) use ols::ls_coefficients;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Declarative choice of regressors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub label: String,
    /// Lagged log attention indices (general market, ruble, economy).
    #[serde(default)]
    pub attention: bool,
    /// Lagged first difference of log implied variance.
    #[serde(default)]
    pub iv_diff: bool,
    /// Lagged log implied variance level.
    #[serde(default)]
    pub iv_level: bool,
    /// Log of the five-window trailing mean of realized variance.
    #[serde(default)]
    pub v5bar: bool,
    /// Onset-day dummies, interacted with the lagged response.
    #[serde(default = "ModelSpec::default_onset_days")]
    pub onset_days: Vec<NaiveDate>,
}

impl ModelSpec {
    /// The onset trading days: 21-25 and 28 February 2022.
    pub fn default_onset_days() -> Vec<NaiveDate> {
        [21, 22, 23, 24, 25, 28]
            .into_iter()
            .map(|d| NaiveDate::from_ymd_opt(2022, 2, d).expect("valid onset date"))
            .collect()
    }

    /// The canonical specifications 1..=7.
    pub fn numbered(n: u8) -> Result<Self> {
        let (attention, iv_diff, iv_level) = match n {
            1 => (false, false, false),
            2 => (true, false, false),
            3 => (false, true, false),
            4 => (true, true, false),
            5 => (false, false, true),
            6 => (true, false, true),
            7 => (true, true, true),
            other => return Err(Error::UnknownModelNumber(other)),
        };
        Ok(ModelSpec {
            label: format!("Model {n}"),
            attention,
            iv_diff,
            iv_level,
            v5bar: false,
            onset_days: Self::default_onset_days(),
        })
    }

    pub fn all_numbered() -> Vec<Self> {
        (1..=7).map(|n| Self::numbered(n).expect("1..=7 valid")).collect()
    }

    /// True when `self`'s regressor set is a strict subset of `other`'s.
    pub fn is_strictly_nested_in(&self, other: &ModelSpec) -> bool {
        let le = |a: bool, b: bool| !a || b;
        self.onset_days == other.onset_days
            && le(self.attention, other.attention)
            && le(self.iv_diff, other.iv_diff)
            && le(self.iv_level, other.iv_level)
            && le(self.v5bar, other.v5bar)
            && (self.attention, self.iv_diff, self.iv_level, self.v5bar)
                != (other.attention, other.iv_diff, other.iv_level, other.v5bar)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_one_is_all_flags_off() {
        let m1 = ModelSpec::numbered(1).unwrap();
        assert!(!m1.attention && !m1.iv_diff && !m1.iv_level && !m1.v5bar);
        assert_eq!(m1.onset_days.len(), 6);
    }

    #[test]
    fn nesting_chains_hold() {
        let m: Vec<ModelSpec> = ModelSpec::all_numbered();
        let nested = |a: usize, b: usize| m[a - 1].is_strictly_nested_in(&m[b - 1]);
        for (a, b) in [(1, 2), (2, 4), (4, 7), (1, 3), (3, 4), (1, 5), (5, 6), (6, 7)] {
            assert!(nested(a, b), "expected Model {a} nested in Model {b}");
        }
        assert!(!nested(2, 3)); // attention vs iv_diff: not comparable
        assert!(!nested(7, 1));
        assert!(!m[0].is_strictly_nested_in(&m[0]));
    }

    #[test]
    fn unknown_model_number_is_rejected() {
        assert!(matches!(ModelSpec::numbered(8), Err(Error::UnknownModelNumber(8))));
        assert!(matches!(ModelSpec::numbered(0), Err(Error::UnknownModelNumber(0))));
    }

    #[test]
    fn spec_round_trips_through_json() {
        let spec = ModelSpec::numbered(7).unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        let back: ModelSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(spec, back);
    }
}
