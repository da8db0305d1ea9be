use serde::Serialize;

use super::{check_p, k_x_scan, ln_factorial, times, LogValue, MomentError, ParamPoint, ScanMode, SCAN_CAP_NATS};

/// `F = 1 - q^s - s p q^(s-1)` with `s = k + r` and `q = 1 - p`: the chance
/// that a fixed outside vertex has at least two neighbours in an `s`-set.
/// Only `s` matters, so `F(k + 1, r) = F(k, r + 1)`.
pub fn f_value(k: usize, r: usize, p: f64) -> f64 {
    f_parts(k + r, p).0
}

/// `ln F`, accurate both when `F` is tiny and when it is close to 1.
pub fn ln_f(k: usize, r: usize, p: f64) -> f64 {
    f_parts(k + r, p).1
}

fn f_parts(s: usize, p: f64) -> (f64, f64) {
    if s < 2 || p == 0.0 {
        return (0.0, f64::NEG_INFINITY);
    }
    if p == 1.0 {
        return (1.0, 0.0);
    }
    let sf = s as f64;
    let lq = (-p).ln_1p();
    // probability of fewer than two neighbours
    let c = (sf * lq).exp() + sf * p * ((sf - 1.0) * lq).exp();
    if c < 0.5 {
        return (1.0 - c, (-c).ln_1p());
    }
    if sf * p <= 1.0 {
        // sum over j >= 2 of C(s, j) p^j q^(s-j)
        let mut term = (sf * (sf - 1.0) / 2.0).ln() + 2.0 * p.ln() + (sf - 2.0) * lq;
        term = term.exp();
        let ratio = p / (1.0 - p);
        let mut sum = 0.0;
        let mut j = 2.0;
        while term > 0.0 && term > sum * 1e-18 {
            sum += term;
            if j >= sf {
                break;
            }
            term *= (sf - j) / (j + 1.0) * ratio;
            j += 1.0;
        }
        return (sum, sum.ln());
    }
    let f = 1.0 - c;
    (f, f.ln())
}

/// `ln E(n, k, r)`, the expected number of augmented independent sets of
/// order `k` with `r` matching edges:
/// `n! / ((n-k-r)! (k-r)! 2^r r!) * p^r * q^(C(k+r, 2) - r) * F^(n-k-r)`.
pub fn log_expected_augmented(n: usize, p: f64, k: usize, r: usize) -> Result<LogValue, MomentError> {
    check_p(p)?;
    if k > n {
        return Err(MomentError::KOutOfRange { k, n });
    }
    if r > k || k + r > n {
        return Err(MomentError::ROutOfRange { k, r, n });
    }
    Ok(LogValue::from_ln(log_e_unchecked(n, p, k, r)))
}

fn log_e_unchecked(n: usize, p: f64, k: usize, r: usize) -> f64 {
    let s = k + r;
    let sf = s as f64;
    let rf = r as f64;
    let coef = ln_factorial(n) - ln_factorial(n - s) - ln_factorial(k - r) - ln_factorial(r) - rf * std::f64::consts::LN_2;
    let inside = times(rf, p.ln()) + times(sf * (sf - 1.0) / 2.0 - rf, (-p).ln_1p());
    coef + inside + times((n - s) as f64, f_parts(s, p).1)
}

/// The `r` maximising `E(n, k, r)` over `0 <= r <= min(k, n - k)`, smallest
/// on ties, with the maximum.
pub fn r_m(n: usize, p: f64, k: usize) -> Result<(usize, LogValue), MomentError> {
    check_p(p)?;
    if k > n {
        return Err(MomentError::KOutOfRange { k, n });
    }
    Ok(r_m_unchecked(n, p, k))
}

fn r_m_unchecked(n: usize, p: f64, k: usize) -> (usize, LogValue) {
    let mut best = (0, f64::NEG_INFINITY);
    for r in 0..=k.min(n - k) {
        let v = log_e_unchecked(n, p, k, r);
        if v > best.1 {
            best = (r, v);
        }
    }
    (best.0, LogValue::from_ln(best.1))
}

/// Result of the `k_z` scan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KzScan {
    pub k_x: usize,
    pub k_z: usize,
    /// `r_M(k_z)`.
    pub r_z: usize,
    /// `E(n, k_z, r_z)`.
    pub log_e: LogValue,
    /// Some `k > k_x` would also pass the `k_z` threshold.
    pub exceeds_kx: bool,
    /// `(k, r_M(k), E(n, k, r_M(k)))` for every `k` from `k_z` to `k_x`.
    pub table: Vec<(usize, usize, LogValue)>,
}

/// `(k_z, r_z)`: the largest `k <= k_x` with `max_r E(n, k, r)` above
/// `point.kz_threshold`, and the maximising `r`.
pub fn k_z(point: &ParamPoint) -> Result<(usize, usize), MomentError> {
    let s = k_z_scan(point, ScanMode::Capped)?;
    Ok((s.k_z, s.r_z))
}

pub fn k_z_scan(point: &ParamPoint, mode: ScanMode) -> Result<KzScan, MomentError> {
    let (n, p, t) = (point.n, point.p, point.kz_threshold);
    let kx = k_x_scan(point, mode)?;
    let mut table = Vec::new();
    let mut hit = None;
    for k in (0..=kx).rev() {
        let (r, v) = r_m_unchecked(n, p, k);
        table.push((k, r, v));
        if v.ln() > t {
            hit = Some((k, r, v));
            break;
        }
    }
    let (kz, rz, log_e) = hit.ok_or(MomentError::Empty("k_z"))?;
    table.reverse();
    let mut exceeds_kx = false;
    let mut peak = f64::NEG_INFINITY;
    for k in kx + 1..=n {
        let v = r_m_unchecked(n, p, k).1.ln();
        if v > t {
            exceeds_kx = true;
            break;
        }
        if v >= peak {
            peak = v;
        } else if mode == ScanMode::Capped && v < t - SCAN_CAP_NATS {
            break;
        }
    }
    Ok(KzScan {
        k_x: kx,
        k_z: kz,
        r_z: rz,
        log_e,
        exceeds_kx,
        table,
    })
}
