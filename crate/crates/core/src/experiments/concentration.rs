use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::{quantile, ExperimentError, TrialPlan, TrialRecord};
use crate::moments::{k_x, k_z, ParamPoint};
use crate::sampler::{sample_gnp, trial_seed};
use crate::solver::Solver;

/// Distribution of `alpha(G(n, p))` over sampled graphs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConcentrationSummary {
    pub n: usize,
    pub p: f64,
    pub plan: TrialPlan,
    /// `alpha -> count` over the solved trials.
    pub histogram: BTreeMap<usize, u64>,
    /// Most frequent value, smallest on ties.
    pub mode: Option<usize>,
    /// Lower median.
    pub median_alpha: Option<usize>,
    pub predicted_window: Option<[usize; 2]>,
    pub mass_in_predicted_window: Option<f64>,
    /// `max - min + 1` over the observed values.
    pub support_width: usize,
    /// Largest share of the solved trials on two adjacent values, and the
    /// lower of those values.
    pub best_two_mass: f64,
    pub best_two_start: Option<usize>,
    /// `k_x` with threshold 1.
    pub k_x_unit: Option<usize>,
    pub failures: u64,
    pub records: Vec<TrialRecord>,
}

/// Samples `plan.trials` graphs from `G(n, p)` and solves each exactly. The
/// predicted window comes from `point` when given, otherwise from the default
/// point for `(n, p)` when one exists.
pub fn concentration_run(
    n: usize,
    p: f64,
    point: Option<&ParamPoint>,
    plan: &TrialPlan,
) -> Result<ConcentrationSummary, ExperimentError> {
    plan.check()?;
    if !(0.0..=1.0).contains(&p) {
        return Err(crate::sampler::SampleError::Probability(p).into());
    }
    let point = match point {
        Some(pt) => Some(*pt),
        None => ParamPoint::new(n, p).ok(),
    };
    let solver = Solver::new(plan.budget);
    let records = (0..plan.trials)
        .into_par_iter()
        .map(|i| {
            let seed = trial_seed(plan.seed, i);
            let start = Instant::now();
            let g = sample_gnp(n, p, seed)?;
            let mut rec = TrialRecord::new(i, seed);
            rec.alpha = solver.solve(&g).ok().map(|r| r.alpha);
            rec.elapsed = start.elapsed();
            Ok(rec)
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    let failures = records.iter().filter(|r| r.alpha.is_none()).count() as u64;
    plan.check_failures(failures)?;

    let mut values: Vec<usize> = records.iter().filter_map(|r| r.alpha).collect();
    values.sort_unstable();
    let mut histogram = BTreeMap::new();
    for &a in &values {
        *histogram.entry(a).or_insert(0u64) += 1;
    }
    let solved = values.len() as f64;
    let mode = histogram.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0))).map(|(&v, _)| v);
    let support_width = match (values.first(), values.last()) {
        (Some(lo), Some(hi)) => hi - lo + 1,
        _ => 0,
    };
    let mut best_two = (0u64, None);
    for (&v, &c) in &histogram {
        let pair = c + histogram.get(&(v + 1)).copied().unwrap_or(0);
        if pair > best_two.0 {
            best_two = (pair, Some(v));
        }
    }
    let predicted_window = point.and_then(|pt| k_z(&pt).ok()).map(|(kz, _)| [kz, kz + 1]);
    let mass_in_predicted_window = predicted_window.filter(|_| solved > 0.0).map(|[a, b]| {
        let hits = histogram.get(&a).unwrap_or(&0) + histogram.get(&b).unwrap_or(&0);
        hits as f64 / solved
    });
    let k_x_unit = point.and_then(|pt| k_x(&pt.with_unit_kx_threshold()).ok());
    Ok(ConcentrationSummary {
        n,
        p,
        plan: *plan,
        mode,
        median_alpha: quantile(&values, 0.5),
        histogram,
        predicted_window,
        mass_in_predicted_window,
        support_width,
        best_two_mass: if solved > 0.0 { best_two.0 as f64 / solved } else { 0.0 },
        best_two_start: best_two.1,
        k_x_unit,
        failures,
        records,
    })
}
