//! Monte Carlo experiments over sampled graphs.
//!
//! Trials run on the current rayon pool with per-trial seeds from
//! [`trial_seed`](crate::sampler::trial_seed). Results are merged in trial
//! order with integer arithmetic, so output does not depend on the number of
//! threads.

mod concentration;
mod ladder;
mod mc;
mod output;
mod trees;

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::moments::MomentError;
use crate::sampler::SampleError;
use crate::solver::Budget;

pub use concentration::{concentration_run, ConcentrationSummary};
pub use ladder::{ladder_run, LadderReport, RungSummary};
pub use mc::{moment_mc_check, McEntry, MomentMcReport};
pub use output::{write_csv, write_json, CsvRows};
pub use trees::{decomposition_check, DecompositionSummary};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("at least one trial is required")]
    NoTrials,
    #[error("{failures} of {trials} trials exhausted the solver budget (limit 1%)")]
    TooManyFailures { failures: u64, trials: u64 },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Moment(#[from] MomentError),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Trial count, master seed and per-solve budget shared by the experiments.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialPlan {
    pub trials: u64,
    pub seed: u64,
    pub budget: Budget,
}

impl TrialPlan {
    pub fn new(trials: u64, seed: u64) -> Self {
        TrialPlan {
            trials,
            seed,
            budget: Budget::default(),
        }
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        self.budget = budget;
        self
    }

    fn check(&self) -> Result<(), ExperimentError> {
        if self.trials == 0 {
            Err(ExperimentError::NoTrials)
        } else {
            Ok(())
        }
    }

    fn check_failures(&self, failures: u64) -> Result<(), ExperimentError> {
        // more than 1% aborts
        if failures * 100 > self.trials {
            return Err(ExperimentError::TooManyFailures {
                failures,
                trials: self.trials,
            });
        }
        Ok(())
    }
}

/// One sampled graph. `elapsed` is wall-clock and never serialised.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub seed: u64,
    /// `None` when the solver budget ran out.
    pub alpha: Option<usize>,
    pub alpha_hat: Option<usize>,
    pub t: Option<usize>,
    pub star_count: Option<usize>,
    /// Independence number of the graph left after removing the 4-vertex
    /// tree components.
    pub alpha_remainder: Option<usize>,
    pub decomposition_residual: Option<i64>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl TrialRecord {
    fn new(trial_index: u64, seed: u64) -> Self {
        TrialRecord {
            trial_index,
            seed,
            alpha: None,
            alpha_hat: None,
            t: None,
            star_count: None,
            alpha_remainder: None,
            decomposition_residual: None,
            elapsed: Duration::ZERO,
        }
    }
}

/// Lower empirical quantile: the smallest value with at least a `q` share of
/// the sorted sample at or below it.
pub(crate) fn quantile(sorted: &[usize], q: f64) -> Option<usize> {
    if sorted.is_empty() {
        return None;
    }
    let rank = (q * sorted.len() as f64).ceil().max(1.0) as usize;
    Some(sorted[rank.min(sorted.len()) - 1])
}

/// Mean and standard error from integer sums.
pub(crate) fn mean_se(count: u64, sum: u128, sum_sq: u128) -> (f64, f64) {
    let c = count as f64;
    let mean = sum as f64 / c;
    if count < 2 {
        return (mean, 0.0);
    }
    // exact integer numerator of the sample variance
    let num = count as u128 * sum_sq - sum * sum;
    let var = num as f64 / (c * (c - 1.0));
    (mean, (var / c).sqrt())
}

/// `(observed - expected) / se`; zero spread gives 0 on agreement and an
/// infinity otherwise.
pub(crate) fn z_score(observed: f64, expected: f64, se: f64) -> f64 {
    let d = observed - expected;
    if se > 0.0 {
        d / se
    } else if d.abs() <= 1e-12 * expected.abs().max(1.0) {
        0.0
    } else {
        d.signum() * f64::INFINITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles() {
        let v = [1, 2, 3, 4];
        assert_eq!(quantile(&v, 0.5), Some(2));
        assert_eq!(quantile(&v, 0.05), Some(1));
        assert_eq!(quantile(&v, 0.95), Some(4));
        assert_eq!(quantile(&v, 0.0), Some(1));
        assert_eq!(quantile(&[7], 0.5), Some(7));
        assert_eq!(quantile(&[], 0.5), None);
    }

    #[test]
    fn moments_from_sums() {
        // 1, 2, 3: mean 2, variance 1
        let (m, se) = mean_se(3, 6, 14);
        assert_eq!(m, 2.0);
        assert!((se - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_se(1, 5, 25), (5.0, 0.0));
        assert_eq!(z_score(3.0, 3.0, 0.0), 0.0);
        assert_eq!(z_score(3.0, 2.0, 0.0), f64::INFINITY);
        assert_eq!(z_score(3.0, 2.0, 0.5), 2.0);
    }

    #[test]
    fn failure_limit() {
        let plan = TrialPlan::new(200, 0);
        assert!(plan.check_failures(2).is_ok());
        assert!(plan.check_failures(3).is_err());
        assert!(TrialPlan::new(0, 0).check().is_err());
    }
}
