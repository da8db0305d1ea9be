use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use super::{quantile, ExperimentError, TrialPlan};
use crate::graph::VertexSet;
use crate::moments::{ss_ell, ss_ladder};
use crate::sampler::{trial_seed, CoupledSample};
use crate::solver::{Budget, SolveError, Solver};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RungSummary {
    pub rung: usize,
    pub p_i: f64,
    pub solved: u64,
    pub median: Option<usize>,
    pub q05: Option<usize>,
    pub q95: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LadderReport {
    pub n: usize,
    pub p: f64,
    pub plan: TrialPlan,
    pub allowance_secs: Option<f64>,
    pub rungs: Vec<f64>,
    /// Index of the last rung.
    pub z: usize,
    pub z_at_most_n_sqrt_p: bool,
    pub ell: f64,
    pub z_times_ell: f64,
    /// `ln(np) / p`.
    pub leading_drift: f64,
    pub trials_started: u64,
    /// Trials with every rung solved.
    pub trials_completed: u64,
    /// Trials in which some solve ran out of node budget.
    pub failures: u64,
    /// The wall-clock allowance ran out before every rung of every trial was
    /// solved.
    pub stopped_by_allowance: bool,
    /// Adjacent rung pairs with both values known.
    pub pairs_checked: u64,
    /// `(trial, i)` with `alpha` at rung `i + 1` larger than at rung `i`.
    pub violations: Vec<(u64, usize)>,
    pub per_rung: Vec<RungSummary>,
    /// First-rung median minus last-rung median.
    pub median_drift: Option<i64>,
    /// `alpha[trial][rung]`, `None` where unsolved.
    pub alphas: Vec<Vec<Option<usize>>>,
}

/// Solves `alpha` on every rung of the ladder from `p` to `2p` for coupled
/// samples, where rung `i + 1` adds edges to rung `i`.
///
/// Rungs are solved from the top down, each seeded with the maximum
/// independent set of the rung above, which stays independent when edges
/// are removed. With an `allowance`, no new trial starts once it has passed
/// and solves in flight are cut off at the deadline; the report then lists
/// what was finished.
pub fn ladder_run(
    n: usize,
    p: f64,
    plan: &TrialPlan,
    allowance: Option<Duration>,
) -> Result<LadderReport, ExperimentError> {
    plan.check()?;
    let rungs = ss_ladder(n, p)?;
    let z = rungs.len() - 1;
    let start = Instant::now();
    let deadline = allowance.map(|a| start + a);
    let batch = rayon::current_num_threads().max(1) as u64;
    let mut alphas = Vec::new();
    let mut failures = 0;
    let mut stopped = false;
    let mut next = 0;
    while next < plan.trials {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            stopped = true;
            break;
        }
        let end = (next + batch).min(plan.trials);
        let results: Vec<(Vec<Option<usize>>, bool, bool)> = (next..end)
            .into_par_iter()
            .map(|i| run_trial(n, &rungs, trial_seed(plan.seed, i), &plan.budget, deadline))
            .collect();
        for (a, failed, cut) in results {
            failures += failed as u64;
            stopped |= cut;
            alphas.push(a);
        }
        next = end;
    }
    if !stopped {
        plan.check_failures(failures)?;
    }

    let mut violations = Vec::new();
    let mut pairs_checked = 0;
    for (t, a) in alphas.iter().enumerate() {
        for i in 0..z {
            if let (Some(lo), Some(hi)) = (a[i], a[i + 1]) {
                pairs_checked += 1;
                if hi > lo {
                    violations.push((t as u64, i));
                }
            }
        }
    }
    let per_rung: Vec<RungSummary> = rungs
        .iter()
        .enumerate()
        .map(|(i, &p_i)| {
            let mut v: Vec<usize> = alphas.iter().filter_map(|a| a[i]).collect();
            v.sort_unstable();
            RungSummary {
                rung: i,
                p_i,
                solved: v.len() as u64,
                median: quantile(&v, 0.5),
                q05: quantile(&v, 0.05),
                q95: quantile(&v, 0.95),
            }
        })
        .collect();
    let median_drift = per_rung[0].median.zip(per_rung[z].median).map(|(a, b)| a as i64 - b as i64);
    let ell = ss_ell(n, p);
    Ok(LadderReport {
        n,
        p,
        plan: *plan,
        allowance_secs: allowance.map(|a| a.as_secs_f64()),
        z,
        z_at_most_n_sqrt_p: z as f64 <= n as f64 * p.sqrt(),
        ell,
        z_times_ell: z as f64 * ell,
        leading_drift: (n as f64 * p).ln() / p,
        trials_started: alphas.len() as u64,
        trials_completed: alphas.iter().filter(|a| a.iter().all(Option::is_some)).count() as u64,
        failures,
        stopped_by_allowance: stopped,
        pairs_checked,
        violations,
        per_rung,
        median_drift,
        rungs,
        alphas,
    })
}

/// Returns the per-rung values, whether a node budget ran out and whether
/// the deadline cut the trial short.
fn run_trial(
    n: usize,
    rungs: &[f64],
    seed: u64,
    budget: &Budget,
    deadline: Option<Instant>,
) -> (Vec<Option<usize>>, bool, bool) {
    let sample = CoupledSample::new(n, seed);
    let mut out = vec![None; rungs.len()];
    let mut incumbent: Option<VertexSet> = None;
    let (mut failed, mut cut) = (false, false);
    for i in (0..rungs.len()).rev() {
        let mut b = *budget;
        if let Some(d) = deadline {
            let left = d.saturating_duration_since(Instant::now());
            if left.is_zero() {
                cut = true;
                break;
            }
            b.time_limit = Some(b.time_limit.map_or(left, |t| t.min(left)));
        }
        let g = sample.at(rungs[i]);
        let mut solver = Solver::new(b);
        if let Some(inc) = incumbent.take() {
            solver = solver.with_incumbent(inc);
        }
        match solver.solve(&g) {
            Ok(r) => {
                out[i] = Some(r.alpha);
                incumbent = Some(r.witness);
            }
            Err(SolveError::BudgetExhausted { witness, .. }) => {
                if deadline.is_some_and(|d| Instant::now() >= d) {
                    cut = true;
                    break;
                }
                failed = true;
                // the best set found is still independent one rung down
                incumbent = Some(witness);
            }
            Err(e) => unreachable!("solver error without an incumbent problem: {e}"),
        }
    }
    (out, failed, cut)
}
