use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use rug::Rational;
use serde::Serialize;
use twopoint::augmented::{alpha_hat_within, extend_to_augmented, AugmentedError};
use twopoint::experiments::{
    concentration_run, decomposition_check, ladder_run, write_csv, write_json, CsvRows, ExperimentError, TrialPlan,
};
use twopoint::moments::exact::{scan_k_x, scan_k_z, RationalReference};
use twopoint::moments::{MomentError, MomentReport, ParamPoint, ScanMode};
use twopoint::sampler::{sample_gnm, sample_gnp};
use twopoint::{Budget, Graph, GraphError, SolveError, Solver};

use crate::args::{BudgetArgs, Cli, Command, Model, PredictArgs, Prob, TrialArgs};
use crate::{check, Failure, OUTPUT_DIR_VAR};

/// Largest `n` for which `predict` repeats the threshold scans in exact
/// rational arithmetic when `p` is given as a ratio.
const EXACT_CHECK_MAX_N: usize = 200;

impl From<MomentError> for Failure {
    fn from(e: MomentError) -> Self {
        Failure::validation(e)
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        Failure::validation(e)
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::TooManyFailures { .. } => Failure::budget(e),
            _ => Failure::validation(e),
        }
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::BudgetExhausted { .. } => Failure::budget(e),
            _ => Failure::validation(e),
        }
    }
}

impl From<AugmentedError> for Failure {
    fn from(e: AugmentedError) -> Self {
        match e {
            AugmentedError::BudgetExhausted(_) => Failure::budget(e),
            _ => Failure::validation(e),
        }
    }
}

/// Every JSON output: the command, its resolved flags and the result.
#[derive(Serialize)]
struct Envelope<'a, T> {
    config: &'a Command,
    result: &'a T,
}

pub fn run(cli: &Cli) -> Result<(), Failure> {
    let verbose = cli.verbose;
    match &cli.command {
        Command::Predict(a) => predict(&cli.command, a),
        Command::Sweep(a) => {
            let mut rows = Vec::new();
            for &n in &a.n {
                for p in &a.p {
                    rows.push(SweepRow::new(n, p));
                }
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &rows {
                w.serialize(r).map_err(Failure::validation)?;
            }
            let bytes = w.into_inner().map_err(Failure::validation)?;
            emit_bytes(a.csv.as_deref(), &bytes)
        }
        Command::Solve(a) => {
            let g = Graph::read_file(&a.graph_file)?;
            match Solver::new(budget(&a.budget)?).solve(&g) {
                Ok(r) => {
                    println!("alpha={}", r.alpha);
                    println!("witness={}", join(r.witness.iter()));
                    if let Some(path) = &a.json {
                        #[derive(Serialize)]
                        struct Out {
                            alpha: usize,
                            witness: Vec<usize>,
                            nodes_explored: u64,
                        }
                        let out = Out {
                            alpha: r.alpha,
                            witness: r.witness.to_vec(),
                            nodes_explored: r.nodes_explored,
                        };
                        json(path, &cli.command, &out)?;
                    }
                    Ok(())
                }
                Err(SolveError::BudgetExhausted { lower_bound, nodes, .. }) => Err(Failure::budget(format!(
                    "budget exhausted after {nodes} nodes; alpha >= {lower_bound}"
                ))),
                Err(e) => Err(e.into()),
            }
        }
        Command::Sample(a) => {
            let g = match (&a.model.p, a.model.c, a.model.m) {
                (_, _, Some(m)) => sample_gnm(a.n, m, a.seed).map_err(Failure::validation)?,
                _ => sample_gnp(a.n, edge_probability(a.n, &a.model)?, a.seed).map_err(Failure::validation)?,
            };
            emit_bytes(a.out.as_deref(), g.to_text().as_bytes())
        }
        Command::Augmented(a) => {
            let g = Graph::read_file(&a.graph_file)?;
            let b = budget(&a.budget)?;
            let sol = Solver::new(b).solve(&g)?;
            let aug = extend_to_augmented(&g, &sol.witness)?;
            let hat = match alpha_hat_within(&g, &b) {
                Ok(h) => Some(h),
                Err(AugmentedError::TooLarge(_)) => None,
                Err(e) => return Err(e.into()),
            };
            println!("alpha={}", sol.alpha);
            println!("alpha_hat={}", hat.map_or("unavailable".to_string(), |h| h.to_string()));
            println!("order={} r={}", aug.order(), aug.r());
            println!("set={}", join(aug.set().iter()));
            println!("matching={}", join(aug.matching().iter().map(|(u, v)| format!("{u}-{v}"))));
            if let Some(path) = &a.json {
                #[derive(Serialize)]
                struct Out {
                    alpha: usize,
                    alpha_hat: Option<usize>,
                    order: usize,
                    r: usize,
                    set: Vec<usize>,
                    matching: Vec<(usize, usize)>,
                }
                let out = Out {
                    alpha: sol.alpha,
                    alpha_hat: hat,
                    order: aug.order(),
                    r: aug.r(),
                    set: aug.set().to_vec(),
                    matching: aug.matching().to_vec(),
                };
                json(path, &cli.command, &out)?;
            }
            if hat.is_some_and(|h| h != sol.alpha) || aug.order() != sol.alpha {
                return Err(Failure::invariant("augmented order differs from alpha"));
            }
            Ok(())
        }
        Command::Concentrate(a) => {
            if a.model.m.is_some() {
                return Err(Failure::validation("concentrate needs --p or --c"));
            }
            let p = edge_probability(a.n, &a.model)?;
            let point = match a.epsilon {
                Some(e) => Some(ParamPoint::new(a.n, p)?.with_epsilon(e)?),
                None => None,
            };
            let s = concentration_run(a.n, p, point.as_ref(), &plan(&a.trials)?)?;
            println!(
                "mode={} median={} window={} mass={} support_width={} failures={}",
                opt(s.mode),
                opt(s.median_alpha),
                s.predicted_window.map_or(String::new(), |[x, y]| format!("{x},{y}")),
                opt(s.mass_in_predicted_window),
                s.support_width,
                s.failures
            );
            outputs(&cli.command, &a.trials, &s)
        }
        Command::Trees(a) => {
            let s = decomposition_check(a.n, a.c, &plan(&a.trials)?)?;
            println!(
                "trials={} nonzero_residuals={} mean_t={:.4} expected_t={:.4} z_t={:.3} star_fraction={} z_star={}",
                s.plan.trials,
                s.nonzero_residuals,
                s.mean_t,
                s.expected_t,
                s.z_t,
                opt(s.star_fraction),
                opt(s.z_star_fraction)
            );
            outputs(&cli.command, &a.trials, &s)?;
            if s.nonzero_residuals > 0 {
                return Err(Failure::invariant(format!("{} trials with nonzero residual", s.nonzero_residuals)));
            }
            Ok(())
        }
        Command::Ladder(a) => {
            let p = a.p.resolve(a.n);
            let allowance = a.allowance.map(seconds).transpose()?;
            let r = ladder_run(a.n, p, &plan(&a.trials)?, allowance)?;
            println!(
                "rungs={} started={} completed={} pairs_checked={} violations={} median_drift={} stopped_by_allowance={}",
                r.rungs.len(),
                r.trials_started,
                r.trials_completed,
                r.pairs_checked,
                r.violations.len(),
                opt(r.median_drift),
                r.stopped_by_allowance
            );
            outputs(&cli.command, &a.trials, &r)?;
            if !r.violations.is_empty() {
                return Err(Failure::invariant("alpha increased along a coupled ladder"));
            }
            if r.stopped_by_allowance {
                return Err(Failure::budget("allowance ran out before the ladder was finished"));
            }
            Ok(())
        }
        Command::Check(a) => {
            let lines = check::run(a, verbose);
            let mut failed = 0;
            for l in &lines {
                println!("{} {}: {}", if l.passed { "ok  " } else { "FAIL" }, l.name, l.detail);
                failed += !l.passed as usize;
            }
            if failed > 0 {
                return Err(Failure::invariant(format!("{failed} oracle checks failed")));
            }
            Ok(())
        }
    }
}

fn predict(command: &Command, a: &PredictArgs) -> Result<(), Failure> {
    if a.model.m.is_some() {
        return Err(Failure::validation("predict needs --p or --c"));
    }
    let p = edge_probability(a.n, &a.model)?;
    let mut pt = ParamPoint::new(a.n, p)?;
    if let Some(e) = a.epsilon {
        pt = pt.with_epsilon(e)?;
    }
    if let Some(t) = a.kx_threshold {
        pt = pt.with_kx_threshold(t)?;
    }
    if let Some(t) = a.kz_threshold {
        pt = pt.with_kz_threshold(t)?;
    }
    if a.unit_kx {
        pt = pt.with_unit_kx_threshold();
    }
    let mode = if a.full_scan { ScanMode::Full } else { ScanMode::Capped };
    let report = MomentReport::build_with(&pt, mode)?;

    #[derive(Serialize)]
    struct ExactCheck {
        k_x: Option<usize>,
        k_z: Option<usize>,
        r_z: Option<usize>,
        agrees: bool,
    }
    #[derive(Serialize)]
    struct Out {
        #[serde(flatten)]
        report: MomentReport,
        exact_check: Option<ExactCheck>,
    }
    let exact_check = match a.model.p {
        Some(Prob::Ratio(num, den)) if a.n <= EXACT_CHECK_MAX_N => {
            let reference = RationalReference::new(a.n, Rational::from((num, den)))?;
            let kx = scan_k_x(&reference, pt.kx_threshold);
            let kz = kx.and_then(|k| scan_k_z(&reference, k, pt.kz_threshold));
            Some(ExactCheck {
                k_x: kx,
                k_z: kz.map(|x| x.0),
                r_z: kz.map(|x| x.1),
                agrees: kx == Some(report.k_x) && kz == Some((report.k_z, report.r_z)),
            })
        }
        _ => None,
    };
    let agrees = exact_check.as_ref().is_none_or(|c| c.agrees);
    let out = Out { report, exact_check };
    match &a.json {
        Some(path) => json(path, command, &out)?,
        None => {
            let text = serde_json::to_string_pretty(&Envelope {
                config: command,
                result: &out,
            })
            .map_err(Failure::validation)?;
            println!("{text}");
        }
    }
    if !agrees {
        return Err(Failure::invariant("exact rational scan disagrees with the engine"));
    }
    Ok(())
}

#[derive(Serialize)]
struct SweepRow {
    n: usize,
    p: f64,
    epsilon: Option<f64>,
    regime: String,
    k_x: Option<usize>,
    k_z: Option<usize>,
    r_z: Option<usize>,
    kz_exceeds_kx: Option<bool>,
    frieze: Option<f64>,
    kx_minus_kz_asymptotic: Option<f64>,
    rz_asymptotic: Option<f64>,
    rz_asymptotic_ceiled: Option<i64>,
    xi_lower: Option<f64>,
    xi_upper: Option<f64>,
    xi_center: Option<f64>,
    error: String,
}

impl SweepRow {
    fn new(n: usize, p: &Prob) -> Self {
        let pv = p.resolve(n);
        let built = ParamPoint::new(n, pv).and_then(|pt| MomentReport::build(&pt));
        let mut row = SweepRow {
            n,
            p: pv,
            epsilon: None,
            regime: String::new(),
            k_x: None,
            k_z: None,
            r_z: None,
            kz_exceeds_kx: None,
            frieze: None,
            kx_minus_kz_asymptotic: None,
            rz_asymptotic: None,
            rz_asymptotic_ceiled: None,
            xi_lower: None,
            xi_upper: None,
            xi_center: None,
            error: String::new(),
        };
        match built {
            Ok(r) => {
                row.epsilon = Some(r.point.epsilon);
                row.regime = serde_json::to_value(r.regime)
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_string))
                    .unwrap_or_default();
                row.k_x = Some(r.k_x);
                row.k_z = Some(r.k_z);
                row.r_z = Some(r.r_z);
                row.kz_exceeds_kx = Some(r.kz_exceeds_kx);
                row.frieze = r.frieze_estimate;
                row.kx_minus_kz_asymptotic = Some(r.kx_minus_kz_asymptotic);
                row.rz_asymptotic = r.rz_asymptotic;
                row.rz_asymptotic_ceiled = r.rz_asymptotic_ceiled;
                row.xi_lower = r.xi.map(|x| x.lower);
                row.xi_upper = r.xi.map(|x| x.upper);
                row.xi_center = r.xi.map(|x| x.center);
            }
            Err(e) => row.error = e.to_string(),
        }
        row
    }
}

fn edge_probability(n: usize, model: &Model) -> Result<f64, Failure> {
    match (&model.p, model.c) {
        (Some(p), _) => Ok(p.resolve(n)),
        (None, Some(c)) => {
            if n == 0 || !(c >= 0.0 && c <= n as f64) {
                return Err(Failure::validation(format!("c = {c} needs 0 <= c <= n")));
            }
            Ok(c / n as f64)
        }
        _ => Err(Failure::validation("an edge probability is required")),
    }
}

fn seconds(s: f64) -> Result<Duration, Failure> {
    Duration::try_from_secs_f64(s).map_err(|_| Failure::validation(format!("{s} is not a valid number of seconds")))
}

fn budget(a: &BudgetArgs) -> Result<Budget, Failure> {
    Ok(Budget::nodes(a.max_nodes).with_time_limit(seconds(a.time_limit)?))
}

fn plan(a: &TrialArgs) -> Result<TrialPlan, Failure> {
    Ok(TrialPlan::new(a.trials, a.seed).with_budget(budget(&a.budget)?))
}

fn outputs<T: Serialize + CsvRows>(command: &Command, a: &TrialArgs, value: &T) -> Result<(), Failure> {
    if let Some(path) = &a.csv {
        let path = resolve(path)?;
        write_csv(&path, value).map_err(|e| Failure::validation(format!("{}: {e}", path.display())))?;
    }
    if let Some(path) = &a.json {
        json(path, command, value)?;
    }
    Ok(())
}

fn json<T: Serialize>(path: &Path, command: &Command, result: &T) -> Result<(), Failure> {
    let path = resolve(path)?;
    write_json(&path, &Envelope { config: command, result })
        .map_err(|e| Failure::validation(format!("{}: {e}", path.display())))
}

fn emit_bytes(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match path {
        Some(path) => {
            let path = resolve(path)?;
            std::fs::write(&path, bytes).map_err(|e| Failure::validation(format!("{}: {e}", path.display())))
        }
        None => std::io::stdout().write_all(bytes).map_err(Failure::validation),
    }
}

/// Relative paths go under `$TWOPOINT_OUTPUT_DIR` when it is set.
fn resolve(path: &Path) -> Result<PathBuf, Failure> {
    let full = match std::env::var_os(OUTPUT_DIR_VAR) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    };
    if let Some(parent) = full.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Failure::validation(format!("{}: {e}", parent.display())))?;
    }
    Ok(full)
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "none".to_string(), |x| x.to_string())
}

fn join<T: ToString>(it: impl Iterator<Item = T>) -> String {
    it.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}
