use super::{check_p, ln_binomial, times, LogValue, MomentError, ParamPoint, ScanMode, SCAN_CAP_NATS};

fn pairs(k: usize) -> f64 {
    (k as f64) * (k as f64 - 1.0) / 2.0
}

/// `ln E[X_k] = ln C(n, k) + C(k, 2) ln(1 - p)`.
pub fn log_expected_independent_sets(n: usize, p: f64, k: usize) -> Result<LogValue, MomentError> {
    check_p(p)?;
    if k > n {
        return Err(MomentError::KOutOfRange { k, n });
    }
    Ok(LogValue::from_ln(ln_binomial(n, k) + times(pairs(k), (-p).ln_1p())))
}

/// `ln E[Y_k]` for maximal independent sets:
/// `ln C(n, k) + C(k, 2) ln(1 - p) + (n - k) ln(1 - (1 - p)^k)`.
pub fn log_expected_maximal_sets(n: usize, p: f64, k: usize) -> Result<LogValue, MomentError> {
    let base = log_expected_independent_sets(n, p, k)?;
    let outside = (n - k) as f64;
    // ln(1 - (1-p)^k), -inf when (1-p)^k = 1
    let ln_hit = if k == 0 { f64::NEG_INFINITY } else { (-(times(k as f64, (-p).ln_1p())).exp_m1()).ln() };
    Ok(base * LogValue::from_ln(times(outside, ln_hit)))
}

/// Largest `k` with `ln E[X_k] > point.kx_threshold`.
pub fn k_x(point: &ParamPoint) -> Result<usize, MomentError> {
    k_x_scan(point, ScanMode::Capped)
}

pub fn k_x_scan(point: &ParamPoint, mode: ScanMode) -> Result<usize, MomentError> {
    let (n, p, t) = (point.n, point.p, point.kx_threshold);
    let mut found = None;
    let mut peak = f64::NEG_INFINITY;
    for k in 0..=n {
        let v = log_expected_independent_sets(n, p, k)?.ln();
        if v > t {
            found = Some(k);
        }
        if v >= peak {
            peak = v;
        } else if mode == ScanMode::Capped && v < t - SCAN_CAP_NATS {
            break;
        }
    }
    found.ok_or(MomentError::Empty("k_x"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let v = log_expected_independent_sets(10, 0.5, 3).unwrap().ln();
        assert!((v - 15f64.ln()).abs() < 1e-13);
        assert_eq!(log_expected_independent_sets(17, 0.3, 0).unwrap(), LogValue::ONE);
        assert!((log_expected_independent_sets(17, 0.3, 1).unwrap().ln() - 17f64.ln()).abs() < 1e-13);
        assert!(log_expected_independent_sets(5, 0.3, 6).is_err());
        assert!(log_expected_independent_sets(5, 1.3, 2).is_err());
    }

    #[test]
    fn unit_threshold_examples() {
        let pt = ParamPoint::new(10, 0.5).unwrap().with_unit_kx_threshold();
        assert_eq!(k_x(&pt).unwrap(), 4);
        let e4 = log_expected_independent_sets(10, 0.5, 4).unwrap().value();
        assert!((e4 - 210.0 / 64.0).abs() < 1e-12);
        let pt = ParamPoint::new(2, 1.0 - 1e-12).unwrap().with_unit_kx_threshold();
        assert_eq!(k_x(&pt).unwrap(), 1);
    }

    #[test]
    fn empty_when_threshold_unreachable() {
        let pt = ParamPoint::new(100, 0.92).unwrap().with_kx_threshold(1000.0).unwrap();
        assert_eq!(k_x(&pt), Err(MomentError::Empty("k_x")));
    }

    #[test]
    fn minus_infinity_threshold_takes_everything() {
        let pt = ParamPoint::new(30, 0.4).unwrap().with_kx_threshold(f64::NEG_INFINITY).unwrap();
        assert_eq!(k_x(&pt).unwrap(), 30);
    }

    #[test]
    fn maximal_sets() {
        // p = 1: only singletons are independent, and each is maximal
        assert!((log_expected_maximal_sets(9, 1.0, 1).unwrap().ln() - 9f64.ln()).abs() < 1e-13);
        // p = 0: only V itself
        assert!(log_expected_maximal_sets(9, 0.0, 4).unwrap().is_zero());
        assert_eq!(log_expected_maximal_sets(9, 0.0, 9).unwrap(), LogValue::ONE);
        assert!(log_expected_maximal_sets(9, 0.3, 0).unwrap().is_zero());
        for n in 1..30 {
            for k in 0..=n {
                for p in [0.05, 0.3, 0.5, 0.9] {
                    assert!(log_expected_maximal_sets(n, p, k).unwrap() <= log_expected_independent_sets(n, p, k).unwrap());
                }
            }
        }
    }

    #[test]
    fn capped_scan_matches_full_scan() {
        for n in [100usize, 1000, 10_000] {
            for e in [0.3, 0.45, 0.55, 0.6, 0.7, 0.9] {
                let pt = ParamPoint::new(n, (n as f64).powf(-e)).unwrap();
                for pt in [pt, pt.with_unit_kx_threshold()] {
                    assert_eq!(k_x_scan(&pt, ScanMode::Capped), k_x_scan(&pt, ScanMode::Full));
                }
            }
        }
    }
}
