use rayon::prelude::*;
use serde::Serialize;

use super::{mean_se, z_score, ExperimentError, TrialPlan};
use crate::augmented::count_augmented;
use crate::moments::{log_expected_augmented, log_expected_independent_sets, log_expected_maximal_sets};
use crate::sampler::{sample_gnp, trial_seed};
use crate::solver::{count_independent_sets, count_maximal_independent_sets};

/// Largest `n` accepted by [`moment_mc_check`].
pub const MC_MAX_N: usize = 12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McEntry {
    /// `X_k`, `Y_k` or `Z_k,r`.
    pub statistic: String,
    pub mean: f64,
    pub std_error: f64,
    pub expected: f64,
    pub z: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentMcReport {
    pub n: usize,
    pub p: f64,
    pub k: usize,
    pub r: usize,
    pub plan: TrialPlan,
    pub entries: Vec<McEntry>,
}

#[derive(Clone, Copy, Default)]
struct Sums([(u128, u128); 3]);

impl Sums {
    fn add(mut self, other: Sums) -> Sums {
        for (a, b) in self.0.iter_mut().zip(other.0) {
            a.0 += b.0;
            a.1 += b.1;
        }
        self
    }
}

/// Monte Carlo means of the counts of independent `k`-sets, maximal
/// independent `k`-sets and augmented sets of order `k` with `r` edges,
/// against the closed forms.
pub fn moment_mc_check(n: usize, p: f64, k: usize, r: usize, plan: &TrialPlan) -> Result<MomentMcReport, ExperimentError> {
    plan.check()?;
    if n > MC_MAX_N {
        return Err(ExperimentError::Invalid(format!("n = {n} exceeds {MC_MAX_N}")));
    }
    let expected = [
        log_expected_independent_sets(n, p, k)?.value(),
        log_expected_maximal_sets(n, p, k)?.value(),
        log_expected_augmented(n, p, k, r)?.value(),
    ];
    let sums = (0..plan.trials)
        .into_par_iter()
        .map(|i| -> Result<Sums, ExperimentError> {
            let g = sample_gnp(n, p, trial_seed(plan.seed, i))?;
            let counts = [
                count_independent_sets(&g, k).map_err(|e| ExperimentError::Invalid(e.to_string()))?,
                count_maximal_independent_sets(&g, k).map_err(|e| ExperimentError::Invalid(e.to_string()))?,
                count_augmented(&g, k, r).map_err(|e| ExperimentError::Invalid(e.to_string()))?,
            ];
            let mut s = Sums::default();
            for (slot, c) in s.0.iter_mut().zip(counts) {
                let c = u128::try_from(&c).expect("counts on at most 12 vertices are small");
                *slot = (c, c * c);
            }
            Ok(s)
        })
        .try_reduce(Sums::default, |a, b| Ok(a.add(b)))?;
    let names = [format!("X_{k}"), format!("Y_{k}"), format!("Z_{k},{r}")];
    let entries = names
        .into_iter()
        .zip(sums.0)
        .zip(expected)
        .map(|((statistic, (s, sq)), expected)| {
            let (mean, std_error) = mean_se(plan.trials, s, sq);
            McEntry {
                statistic,
                mean,
                std_error,
                expected,
                z: z_score(mean, expected, std_error),
            }
        })
        .collect();
    Ok(MomentMcReport {
        n,
        p,
        k,
        r,
        plan: *plan,
        entries,
    })
}
