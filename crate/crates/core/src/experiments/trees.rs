use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::{mean_se, z_score, ExperimentError, TrialPlan, TrialRecord};
use crate::graph::tree4_decompose;
use crate::moments::expected_tree4;
use crate::sampler::{sample_gnp, trial_seed};
use crate::solver::Solver;

/// Results of the tree-component decomposition check at `p = c/n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecompositionSummary {
    pub n: usize,
    pub c: f64,
    pub plan: TrialPlan,
    pub failures: u64,
    /// Trials whose residual is not 0.
    pub nonzero_residuals: u64,
    pub mean_t: f64,
    pub se_t: f64,
    pub expected_t: f64,
    pub z_t: f64,
    pub total_trees: u64,
    pub total_stars: u64,
    pub star_fraction: Option<f64>,
    pub se_star_fraction: Option<f64>,
    pub z_star_fraction: Option<f64>,
    pub records: Vec<TrialRecord>,
}

/// For each sampled graph, checks
/// `alpha(G) = alpha(H) + (n - v_H)/2 + B`, where `H` is what remains after
/// removing the 4-vertex tree components and `B` counts the stars among them.
pub fn decomposition_check(n: usize, c: f64, plan: &TrialPlan) -> Result<DecompositionSummary, ExperimentError> {
    plan.check()?;
    if n == 0 || !(c >= 0.0 && c <= n as f64) {
        return Err(ExperimentError::Invalid(format!("c = {c} needs 0 <= c <= n")));
    }
    let p = c / n as f64;
    let solver = Solver::new(plan.budget);
    let records = (0..plan.trials)
        .into_par_iter()
        .map(|i| {
            let seed = trial_seed(plan.seed, i);
            let start = Instant::now();
            let g = sample_gnp(n, p, seed)?;
            let d = tree4_decompose(&g);
            let mut rec = TrialRecord::new(i, seed);
            rec.t = Some(d.t());
            rec.star_count = Some(d.star_count);
            let (h, _) = g.induced_subgraph(&d.remainder).expect("remainder lies in the graph");
            if let (Ok(a), Ok(ah)) = (solver.solve(&g), solver.solve(&h)) {
                let removed = (n - d.remainder.len()) as i64;
                rec.alpha = Some(a.alpha);
                rec.alpha_remainder = Some(ah.alpha);
                rec.decomposition_residual = Some(a.alpha as i64 - (ah.alpha as i64 + removed / 2 + d.star_count as i64));
            }
            rec.elapsed = start.elapsed();
            Ok(rec)
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    let failures = records.iter().filter(|r| r.alpha.is_none()).count() as u64;
    plan.check_failures(failures)?;

    let nonzero_residuals = records.iter().filter(|r| r.decomposition_residual.is_some_and(|x| x != 0)).count() as u64;
    let (mut sum, mut sum_sq, mut stars) = (0u128, 0u128, 0u64);
    for r in &records {
        let t = r.t.unwrap_or(0) as u128;
        sum += t;
        sum_sq += t * t;
        stars += r.star_count.unwrap_or(0) as u64;
    }
    let (mean_t, se_t) = mean_se(plan.trials, sum, sum_sq);
    let expected_t = expected_tree4(n, p);
    let total_trees = sum as u64;
    let star_fraction = (total_trees > 0).then(|| stars as f64 / total_trees as f64);
    // each tree is a star with probability 1/4, independently
    let se_star = (total_trees > 0).then(|| (0.25 * 0.75 / total_trees as f64).sqrt());
    Ok(DecompositionSummary {
        n,
        c,
        plan: *plan,
        failures,
        nonzero_residuals,
        mean_t,
        se_t,
        expected_t,
        z_t: z_score(mean_t, expected_t, se_t),
        total_trees,
        total_stars: stars,
        star_fraction,
        se_star_fraction: se_star,
        z_star_fraction: star_fraction.zip(se_star).map(|(f, se)| z_score(f, 0.25, se)),
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residuals_vanish() {
        for c in [0.5, 1.0, 3.0] {
            let s = decomposition_check(120, c, &TrialPlan::new(40, 5)).unwrap();
            assert_eq!(s.failures, 0);
            assert_eq!(s.nonzero_residuals, 0);
            assert!(s.records.iter().all(|r| r.decomposition_residual == Some(0)));
        }
    }

    #[test]
    fn empty_graph_has_no_trees() {
        let s = decomposition_check(50, 0.0, &TrialPlan::new(5, 1)).unwrap();
        assert_eq!(s.total_trees, 0);
        assert_eq!(s.star_fraction, None);
        assert_eq!(s.z_t, 0.0);
        assert!(s.records.iter().all(|r| r.alpha == Some(50)));
    }

    #[test]
    fn rejects_bad_c() {
        assert!(decomposition_check(10, -1.0, &TrialPlan::new(5, 1)).is_err());
        assert!(decomposition_check(10, 11.0, &TrialPlan::new(5, 1)).is_err());
    }
}
