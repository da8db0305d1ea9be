//! First-moment formulas, thresholds and asymptotic predictions.
//!
//! Everything is evaluated in the log domain with `f64`. The [`exact`]
//! submodule recomputes the same quantities in exact rational arithmetic and
//! in 256-bit floating point for cross-checking.

mod asymptotic;
mod augmented;
pub mod exact;
mod first;
mod logvalue;
mod report;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use asymptotic::{
    expected_tree4, frieze_estimate, kx_minus_kz_asymptotic, mu, regime_label, rm_asymptotic, rz_asymptotic,
    ss_ell, ss_ladder, upper_bound_diagnostic, xi_band, xi_center, Regime, UpperBoundDiagnostic,
};
pub use augmented::{f_value, k_z, k_z_scan, ln_f, log_expected_augmented, r_m, KzScan};
pub use first::{k_x, k_x_scan, log_expected_independent_sets, log_expected_maximal_sets};
pub use logvalue::LogValue;
pub use report::{MomentReport, RmEntry, XiReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MomentError {
    #[error("n must be at least 2, got {0}")]
    TooFewVertices(usize),
    #[error("probability {0} outside its allowed range")]
    Probability(f64),
    #[error("epsilon must be positive and finite, got {0}")]
    Epsilon(f64),
    #[error("threshold must be finite or minus infinity, got {0}")]
    Threshold(f64),
    #[error("k = {k} outside 0..={n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("r = {r} invalid for k = {k}, n = {n} (need r <= k and k + r <= n)")]
    ROutOfRange { k: usize, r: usize, n: usize },
    #[error("no k satisfies the {0} threshold")]
    Empty(&'static str),
    #[error("{0}")]
    Domain(&'static str),
}

/// How far threshold scans over `k` run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanMode {
    /// Stop at the first `k` past the maximum whose value is more than
    /// [`SCAN_CAP_NATS`] below the threshold.
    #[default]
    Capped,
    /// Every `k` in `0..=n`.
    Full,
}

/// Distance below the threshold, in nats, at which capped scans stop.
pub const SCAN_CAP_NATS: f64 = 200.0;

/// One analysis instance: `n`, `p`, `epsilon` and the two log-domain
/// thresholds (defaults `2 epsilon ln n` for `k_x`, `epsilon ln n` for `k_z`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamPoint {
    pub n: usize,
    pub p: f64,
    pub epsilon: f64,
    pub kx_threshold: f64,
    pub kz_threshold: f64,
}

impl ParamPoint {
    /// Point with the default `epsilon` and thresholds. Needs `n >= 2` and
    /// `0 < p < 1`.
    pub fn new(n: usize, p: f64) -> Result<Self, MomentError> {
        if n < 2 {
            return Err(MomentError::TooFewVertices(n));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(MomentError::Probability(p));
        }
        Self::with_defaults(n, p, default_epsilon(n, p))
    }

    /// Replaces `epsilon` and resets both thresholds to its defaults.
    pub fn with_epsilon(self, epsilon: f64) -> Result<Self, MomentError> {
        Self::with_defaults(self.n, self.p, epsilon)
    }

    pub fn with_kx_threshold(mut self, ln_threshold: f64) -> Result<Self, MomentError> {
        self.kx_threshold = check_threshold(ln_threshold)?;
        Ok(self)
    }

    pub fn with_kz_threshold(mut self, ln_threshold: f64) -> Result<Self, MomentError> {
        self.kz_threshold = check_threshold(ln_threshold)?;
        Ok(self)
    }

    /// The variant with `k_x` defined by `E[X_k] > 1`.
    pub fn with_unit_kx_threshold(mut self) -> Self {
        self.kx_threshold = 0.0;
        self
    }

    fn with_defaults(n: usize, p: f64, epsilon: f64) -> Result<Self, MomentError> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(MomentError::Epsilon(epsilon));
        }
        let ln_n = (n as f64).ln();
        Ok(ParamPoint {
            n,
            p,
            epsilon,
            kx_threshold: 2.0 * epsilon * ln_n,
            kz_threshold: epsilon * ln_n,
        })
    }
}

/// `max(0.02, 2/3 + ln p / ln n)`: the largest `epsilon` with
/// `p >= n^(-2/3 + epsilon)`, floored at 0.02.
pub fn default_epsilon(n: usize, p: f64) -> f64 {
    (2.0 / 3.0 + p.ln() / (n as f64).ln()).max(0.02)
}

fn check_threshold(t: f64) -> Result<f64, MomentError> {
    if t.is_finite() || t == f64::NEG_INFINITY {
        Ok(t)
    } else {
        Err(MomentError::Threshold(t))
    }
}

pub(crate) fn check_p(p: f64) -> Result<(), MomentError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(MomentError::Probability(p))
    }
}

/// `count * ln_q`, treating `0 * -inf` as 0.
#[inline]
pub(crate) fn times(count: f64, ln_q: f64) -> f64 {
    if count == 0.0 {
        0.0
    } else {
        count * ln_q
    }
}

pub(crate) fn ln_factorial(x: usize) -> f64 {
    statrs::function::factorial::ln_factorial(x as u64)
}

pub(crate) fn ln_binomial(n: usize, k: usize) -> f64 {
    statrs::function::factorial::ln_binomial(n as u64, k as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let pt = ParamPoint::new(1000, 1000f64.powf(-0.6)).unwrap();
        assert!((pt.epsilon - (2.0 / 3.0 - 0.6)).abs() < 1e-12);
        assert!((pt.kx_threshold - 2.0 * pt.epsilon * 1000f64.ln()).abs() < 1e-12);
        assert!((pt.kz_threshold - pt.epsilon * 1000f64.ln()).abs() < 1e-12);
        // below n^(-2/3) the floor applies
        assert_eq!(ParamPoint::new(1000, 1e-3).unwrap().epsilon, 0.02);
        assert_eq!(ParamPoint::new(1000, 0.5).unwrap().with_unit_kx_threshold().kx_threshold, 0.0);
    }

    #[test]
    fn validation() {
        assert_eq!(ParamPoint::new(1, 0.5), Err(MomentError::TooFewVertices(1)));
        assert_eq!(ParamPoint::new(10, 0.0), Err(MomentError::Probability(0.0)));
        assert_eq!(ParamPoint::new(10, 1.0), Err(MomentError::Probability(1.0)));
        assert!(ParamPoint::new(10, f64::NAN).is_err());
        let pt = ParamPoint::new(10, 0.5).unwrap();
        assert!(pt.with_epsilon(0.0).is_err());
        assert!(pt.with_kx_threshold(f64::NAN).is_err());
        assert!(pt.with_kx_threshold(f64::INFINITY).is_err());
        assert!(pt.with_kz_threshold(f64::NEG_INFINITY).is_ok());
    }
}
