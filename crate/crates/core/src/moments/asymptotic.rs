//! Leading-order estimates and the small closed forms around them.

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use super::{k_x, ln_binomial, times, MomentError, ParamPoint};

/// `(2/p) [ln(np) - ln ln(np) + ln(e/2)]`; needs `np > e`.
pub fn frieze_estimate(n: usize, p: f64) -> Result<f64, MomentError> {
    let np = n as f64 * p;
    if !(np > E) || !(p > 0.0 && p <= 1.0) {
        return Err(MomentError::Domain("the Frieze estimate needs np > e"));
    }
    let l = np.ln();
    Ok(2.0 / p * (l - l.ln() + (E / 2.0).ln()))
}

/// Raw `4 ln(np)^3 / (e^2 n p^2) - 1`; the prediction for `r_z` is its
/// ceiling. Needs `np > 1`.
pub fn rz_asymptotic(n: usize, p: f64) -> Result<f64, MomentError> {
    let nf = n as f64;
    if !(nf * p > 1.0) {
        return Err(MomentError::Domain("the r_z estimate needs np > 1"));
    }
    Ok(4.0 * (nf * p).ln().powi(3) / (E * E * nf * p * p) - 1.0)
}

/// Raw `k^3 p / (2 e^2 n) - 1`, the leading-order `r_M(k)`.
pub fn rm_asymptotic(n: usize, p: f64, k: usize) -> f64 {
    (k as f64).powi(3) * p / (2.0 * E * E * n as f64) - 1.0
}

/// `4 ln(np)^2 / (e^2 p^2 n)`, the leading-order gap `k_x - k_z`.
pub fn kx_minus_kz_asymptotic(n: usize, p: f64) -> f64 {
    let nf = n as f64;
    4.0 * (nf * p).ln().powi(2) / (E * E * p * p * nf)
}

/// Interval `(1/(e^2 C^2) - 5/2, 1/(e^2 C^2) + 3/2)` for `k_x - k_z` at
/// `p = C ln(n) / sqrt(n)`.
pub fn xi_band(c: f64) -> (f64, f64) {
    let a = 1.0 / (E * E * c * c);
    (a - 2.5, a + 1.5)
}

/// Refined centre `1/(e^2 C^2) - 2 ln E[X_{k_x}] / ln n + 2 epsilon`.
pub fn xi_center(c: f64, ln_ex_kx: f64, n: usize, epsilon: f64) -> f64 {
    1.0 / (E * E * c * c) - 2.0 * ln_ex_kx / (n as f64).ln() + 2.0 * epsilon
}

/// `C(n, 4) * 16 * p^3 * (1-p)^(3 + 4(n-4))`, the expected number of
/// components that are trees on four vertices.
pub fn expected_tree4(n: usize, p: f64) -> f64 {
    if n < 4 || p == 0.0 {
        return 0.0;
    }
    let q_exp = 3.0 + 4.0 * (n as f64 - 4.0);
    (ln_binomial(n, 4) + 16f64.ln() + 3.0 * p.ln() + times(q_exp, (-p).ln_1p())).exp()
}

/// `2 c^3 e^(-4c) / 3`, the limit of `expected_tree4(n, c/n) / n`.
pub fn mu(c: f64) -> f64 {
    2.0 * c.powi(3) * (-4.0 * c).exp() / 3.0
}

/// Probabilities `p_0 = p`, `p_{i+1} = p_i + sqrt(p_i)/n`, ending at the first
/// `p_z >= 2p`. Needs `0 < p` and every rung at most 1.
pub fn ss_ladder(n: usize, p: f64) -> Result<Vec<f64>, MomentError> {
    if n == 0 || !(p > 0.0 && p < 1.0) {
        return Err(MomentError::Probability(p));
    }
    let nf = n as f64;
    let mut out = vec![p];
    let mut cur = p;
    while cur < 2.0 * p {
        cur += cur.sqrt() / nf;
        if cur > 1.0 {
            return Err(MomentError::Domain("ladder passes p = 1"));
        }
        out.push(cur);
    }
    Ok(out)
}

/// `ln(np) / (2 n p^(3/2))`.
pub fn ss_ell(n: usize, p: f64) -> f64 {
    let nf = n as f64;
    (nf * p).ln() / (2.0 * nf * p.powf(1.5))
}

/// Indicative upper bound on the independence number: `k_x` at threshold 1
/// minus `ln(np)^2 / (p^2 n)`. The true gap carries an unspecified constant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpperBoundDiagnostic {
    pub k_x: usize,
    pub gap: f64,
    pub value: f64,
}

pub fn upper_bound_diagnostic(n: usize, p: f64) -> Result<UpperBoundDiagnostic, MomentError> {
    let nf = n as f64;
    if !(nf * p > 1.0) {
        return Err(MomentError::Domain("the upper-bound diagnostic needs np > 1"));
    }
    let kx = k_x(&ParamPoint::new(n, p)?.with_unit_kx_threshold())?;
    let gap = (nf * p).ln().powi(2) / (p * p * nf);
    Ok(UpperBoundDiagnostic {
        k_x: kx,
        gap,
        value: kx as f64 - gap,
    })
}

/// Advisory regime of `p` relative to `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `p > 1 / ln(n)^2`.
    Dense,
    /// Above the critical band, up to `1 / ln(n)^2`.
    Middle,
    /// Within 5% of `ln(n) / sqrt(n)`.
    Critical,
    /// Between `n^(-2/3)` and the critical band.
    SparseValid,
    /// `p <= n^(-2/3)`.
    BelowValidity,
}

/// Half-width of the critical band around `ln(n)/sqrt(n)`, relative.
pub const CRITICAL_BAND: f64 = 0.05;

/// Checked in order: below validity, dense, critical, middle, sparse-valid.
pub fn regime_label(n: usize, p: f64) -> Regime {
    let nf = n as f64;
    let ln_n = nf.ln();
    let critical = ln_n / nf.sqrt();
    if p <= nf.powf(-2.0 / 3.0) {
        Regime::BelowValidity
    } else if p > 1.0 / (ln_n * ln_n) {
        Regime::Dense
    } else if (p - critical).abs() <= CRITICAL_BAND * critical {
        Regime::Critical
    } else if p > critical {
        Regime::Middle
    } else {
        Regime::SparseValid
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frieze() {
        let v = frieze_estimate(1_000_000, 0.01).unwrap();
        let l = 1e4f64.ln();
        assert!((v - 200.0 * (l - l.ln() + 1.0 - 2f64.ln())).abs() < 1e-9);
        assert!(frieze_estimate(100, 0.02).is_err());
        // decreasing in p
        for n in [1000usize, 100_000] {
            let mut prev = f64::INFINITY;
            for i in 1..50 {
                let p = 0.01 * i as f64 / 2.0 + 5.0 / n as f64;
                let v = frieze_estimate(n, p).unwrap();
                assert!(v < prev);
                prev = v;
            }
        }
        // dominant term 2 ln(np)/p takes over as np grows
        let ratios: Vec<f64> = [1e3, 1e6, 1e9, 1e12]
            .iter()
            .map(|&np: &f64| frieze_estimate(1e15 as usize, np / 1e15).unwrap() / (2.0 * np.ln() / (np / 1e15)))
            .collect();
        assert!(ratios.windows(2).all(|w| (w[1] - 1.0).abs() < (w[0] - 1.0).abs()));
    }

    #[test]
    fn rz_scaling() {
        // below zero once p is large
        assert!(rz_asymptotic(10_000, 0.3).unwrap() < 0.0);
        let n = 1_000_000;
        let a = rz_asymptotic(n, 1e-3).unwrap() + 1.0;
        let b = rz_asymptotic(n, 5e-4).unwrap() + 1.0;
        let logs = ((n as f64 * 5e-4).ln() / (n as f64 * 1e-3).ln()).powi(3);
        assert!((b / a - 4.0 * logs).abs() < 1e-9);
        assert!(rz_asymptotic(10, 0.05).is_err());
        assert!((rm_asymptotic(1000, 0.1, 100) - (100.0 / (2.0 * E * E) - 1.0)).abs() < 1e-9);
    }

    #[test]
    fn xi() {
        let (lo, hi) = xi_band(1.0);
        assert!((lo - (E.powi(-2) - 2.5)).abs() < 1e-15);
        assert!((hi - (E.powi(-2) + 1.5)).abs() < 1e-15);
        assert!((xi_center(1.0, 0.0, 100, 0.1) - (E.powi(-2) + 0.2)).abs() < 1e-15);
    }

    #[test]
    fn trees() {
        assert!((mu(1.0) - 2.0 * (-4f64).exp() / 3.0).abs() < 1e-16);
        assert!((mu(1.0) - 0.0122).abs() < 1e-4);
        assert_eq!(expected_tree4(100, 0.0), 0.0);
        assert_eq!(expected_tree4(3, 0.5), 0.0);
        // C(5,4) * 16 * p^3 q^7 at p = 1/2
        assert!((expected_tree4(5, 0.5) - 5.0 * 16.0 / 1024.0).abs() < 1e-14);
        // ratio to n mu(c) tends to 1
        for c in [0.5, 1.0, 2.0] {
            let errs: Vec<f64> = [100usize, 1000, 10_000, 100_000]
                .iter()
                .map(|&n| (expected_tree4(n, c / n as f64) / (n as f64 * mu(c)) - 1.0).abs())
                .collect();
            assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
            assert!(errs[3] < 1e-3);
        }
    }

    #[test]
    fn ladder() {
        let l = ss_ladder(100, 0.01).unwrap();
        assert!((l[1] - 0.011).abs() < 1e-15);
        for (n, p) in [(100usize, 0.01), (200, 0.05), (1000, 0.001), (50, 0.3), (10_000, 1e-3)] {
            let l = ss_ladder(n, p).unwrap();
            let z = l.len() - 1;
            assert!((z as f64) <= n as f64 * p.sqrt());
            assert!(l.windows(2).all(|w| w[1] > w[0]));
            let last = *l.last().unwrap();
            assert!(last >= 2.0 * p && last <= 2.0 * p + (2.0 * p).sqrt() / n as f64);
            assert!(l[..z].iter().all(|&x| x < 2.0 * p));
        }
        assert!(ss_ladder(10, 0.9).is_err());
        assert_eq!(ss_ell(100, 0.01), 0.0);
        assert!((ss_ell(10_000, 0.01) - 100f64.ln() / (2.0 * 10_000.0 * 1e-3)).abs() < 1e-9);
    }

    #[test]
    fn upper_bound() {
        let n = 10_000;
        let mut prev = 0.0;
        for i in (1..20).rev() {
            let p = 0.002 * i as f64;
            let d = upper_bound_diagnostic(n, p).unwrap();
            assert!(d.gap > 0.0);
            assert!(d.gap > prev);
            prev = d.gap;
        }
        // p = n^(-2/3): ln(np)^2 / (p^2 n) = ln(n)^2 n^(1/3) / 9
        for n in [1000usize, 1_000_000, 100_000_000] {
            let nf = n as f64;
            let d = upper_bound_diagnostic(n, nf.powf(-2.0 / 3.0)).unwrap();
            let want = nf.ln().powi(2) * nf.cbrt() / 9.0;
            assert!((d.gap / want - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn regimes() {
        let n = 1_000_000_000_000;
        let nf = n as f64;
        let crit = nf.ln() / nf.sqrt();
        assert_eq!(regime_label(n, nf.powf(-0.7)), Regime::BelowValidity);
        assert_eq!(regime_label(n, nf.powf(-2.0 / 3.0)), Regime::BelowValidity);
        assert_eq!(regime_label(n, nf.powf(-0.6)), Regime::SparseValid);
        assert_eq!(regime_label(n, crit * 1.04), Regime::Critical);
        assert_eq!(regime_label(n, crit * 0.96), Regime::Critical);
        assert_eq!(regime_label(n, crit * 2.0), Regime::Middle);
        assert_eq!(regime_label(n, 0.1), Regime::Dense);
    }
}
