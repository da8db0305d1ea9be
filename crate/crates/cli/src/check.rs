//! The `check` oracle suite: small instances with brute-force answers.

use rayon::prelude::*;
use rug::Rational;
use twopoint::augmented::alpha_hat;
use twopoint::graph::tree4_decompose;
use twopoint::moments::exact::{
    expected_augmented, expected_independent_sets, expected_maximal_sets, f_rational, ln_rational, scan_k_x, scan_k_z,
    RationalReference,
};
use twopoint::moments::{
    f_value, k_x, k_z, log_expected_augmented, log_expected_independent_sets, log_expected_maximal_sets, ParamPoint,
};
use twopoint::sampler::{pair_at, pair_count, sample_gnp, trial_seed};
use twopoint::{alpha, Graph};

pub struct Line {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

const PROBS: [(u64, u64); 4] = [(1, 10), (1, 3), (1, 2), (9, 10)];

pub fn run(args: &crate::args::CheckArgs, verbose: u8) -> Vec<Line> {
    let checks: [(&'static str, &dyn Fn() -> (bool, String)); 6] = [
        ("augmented-exhaustive", &exhaustive),
        ("augmented-random", &|| random(args.random, args.seed)),
        ("moments-exact", &moments_exact),
        ("f-identities", &f_identities),
        ("thresholds-exact", &thresholds),
        ("tree-constants", &tree_constants),
    ];
    checks
        .iter()
        .map(|(name, f)| {
            if verbose > 0 {
                eprintln!("running {name}");
            }
            let (passed, detail) = f();
            Line { name, passed, detail }
        })
        .collect()
}

fn graph_from_mask(n: usize, mask: u64) -> Graph {
    let edges: Vec<(usize, usize)> = (0..pair_count(n)).filter(|&i| mask >> i & 1 == 1).map(pair_at).collect();
    Graph::from_edges(n, &edges).expect("pairs are in range")
}

fn agrees(g: &Graph) -> bool {
    let a = alpha(g).expect("small graphs solve").alpha;
    alpha_hat(g).is_ok_and(|h| h == a)
}

fn exhaustive() -> (bool, String) {
    let mut graphs = 0u64;
    let mut bad = 0u64;
    for n in 0..=5 {
        let total = 1u64 << pair_count(n);
        bad += (0..total).into_par_iter().filter(|&m| !agrees(&graph_from_mask(n, m))).count() as u64;
        graphs += total;
    }
    (bad == 0, format!("{graphs} labelled graphs on at most 5 vertices, {bad} mismatches"))
}

fn random(count: u64, seed: u64) -> (bool, String) {
    let ps = [0.1, 0.3, 0.5, 0.8];
    let bad = (0..count)
        .into_par_iter()
        .filter(|&i| {
            let n = 6 + (i % 7) as usize;
            let p = ps[(i / 7 % 4) as usize];
            !agrees(&sample_gnp(n, p, trial_seed(seed, i)).expect("valid p"))
        })
        .count();
    (bad == 0, format!("{count} random graphs with 6 to 12 vertices, {bad} mismatches"))
}

fn moments_exact() -> (bool, String) {
    let mut worst = 0.0f64;
    let mut bad = 0;
    let mut cmp = |got: f64, want: f64| {
        if want == f64::NEG_INFINITY {
            bad += (got != want) as usize;
        } else {
            worst = worst.max((got - want).abs());
        }
    };
    for (a, b) in PROBS {
        let pr = Rational::from((a, b));
        let pf = a as f64 / b as f64;
        for n in [1usize, 6, 13, 20] {
            for k in 0..=n {
                cmp(
                    log_expected_independent_sets(n, pf, k).unwrap().ln(),
                    ln_rational(&expected_independent_sets(n, &pr, k).unwrap()),
                );
                cmp(
                    log_expected_maximal_sets(n, pf, k).unwrap().ln(),
                    ln_rational(&expected_maximal_sets(n, &pr, k).unwrap()),
                );
                for r in 0..=k.min(n - k) {
                    cmp(
                        log_expected_augmented(n, pf, k, r).unwrap().ln(),
                        ln_rational(&expected_augmented(n, &pr, k, r).unwrap()),
                    );
                }
            }
        }
    }
    (bad == 0 && worst <= 1e-9, format!("largest log difference {worst:.2e}, {bad} zero mismatches"))
}

fn f_identities() -> (bool, String) {
    let mut bad = 0;
    for (a, b) in PROBS {
        let p = Rational::from((a, b));
        let q = Rational::from(1 - &p);
        for s in 0..40usize {
            let step = Rational::from(f_rational(s + 1, &p).unwrap() - f_rational(s, &p).unwrap());
            let mut want = Rational::from(&p * &p) * s as u32;
            for _ in 1..s {
                want *= &q;
            }
            bad += (step != want) as usize;
            for r in 0..=s {
                bad += (f_value(s - r + 1, r, a as f64 / b as f64) != f_value(s - r, r + 1, a as f64 / b as f64)) as usize;
            }
        }
    }
    (bad == 0, format!("{bad} violations of the F recurrences"))
}

fn thresholds() -> (bool, String) {
    let mut bad = Vec::new();
    for (n, (a, b), unit) in [(100usize, (1u64, 5u64), true), (60, (1, 2), false), (150, (1, 10), false)] {
        let mut pt = ParamPoint::new(n, a as f64 / b as f64).unwrap();
        if unit {
            pt = pt.with_unit_kx_threshold();
        }
        let reference = RationalReference::new(n, Rational::from((a, b))).unwrap();
        let kx = scan_k_x(&reference, pt.kx_threshold);
        let kz = kx.and_then(|k| scan_k_z(&reference, k, pt.kz_threshold));
        if kx != k_x(&pt).ok() || kz != k_z(&pt).ok() {
            bad.push(format!("n={n} p={a}/{b}"));
        }
    }
    (bad.is_empty(), if bad.is_empty() { "3 points agree".into() } else { bad.join("; ") })
}

fn tree_constants() -> (bool, String) {
    let (mut trees, mut stars) = (0, 0);
    for m in 0..1u64 << 6 {
        let d = tree4_decompose(&graph_from_mask(4, m));
        trees += d.t();
        stars += d.star_count;
    }
    ((trees, stars) == (16, 4), format!("{trees} labelled trees on 4 vertices, {stars} stars"))
}
