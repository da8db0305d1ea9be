use std::collections::BTreeMap;

use serde::Serialize;

use super::{
    frieze_estimate, k_z_scan, kx_minus_kz_asymptotic, log_expected_independent_sets, regime_label, rm_asymptotic,
    rz_asymptotic, upper_bound_diagnostic, xi_band, xi_center, LogValue, MomentError, ParamPoint, Regime, ScanMode,
    UpperBoundDiagnostic,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RmEntry {
    pub r: usize,
    pub log_e: LogValue,
}

/// Critical-regime data for `p = C ln(n) / sqrt(n)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct XiReport {
    pub c: f64,
    pub lower: f64,
    pub upper: f64,
    pub center: f64,
}

/// Everything the engine predicts for one point. Raw asymptotic values are
/// reported next to their ceilings.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentReport {
    pub point: ParamPoint,
    pub k_x: usize,
    pub k_z: usize,
    pub r_z: usize,
    pub kz_exceeds_kx: bool,
    /// `k -> (r_M(k), ln E(n, k, r_M(k)))` for `k_z <= k <= k_x`.
    pub r_m_table: BTreeMap<usize, RmEntry>,
    pub predicted_interval: [usize; 2],
    /// `ln E[X_k]` at `k_x`, `k_x + 1` and `k_x + 2` (those at most `n`).
    pub log_ex: BTreeMap<usize, LogValue>,
    pub frieze_estimate: Option<f64>,
    pub kx_minus_kz_asymptotic: f64,
    pub rz_asymptotic: Option<f64>,
    pub rz_asymptotic_ceiled: Option<i64>,
    pub rm_asymptotic_at_kz: f64,
    pub rm_asymptotic_at_kz_ceiled: i64,
    pub xi: Option<XiReport>,
    pub upper_bound: Option<UpperBoundDiagnostic>,
    pub regime: Regime,
}

impl MomentReport {
    pub fn build(point: &ParamPoint) -> Result<Self, MomentError> {
        Self::build_with(point, ScanMode::Capped)
    }

    pub fn build_with(point: &ParamPoint, mode: ScanMode) -> Result<Self, MomentError> {
        let (n, p) = (point.n, point.p);
        let scan = k_z_scan(point, mode)?;
        let r_m_table = scan.table.iter().map(|&(k, r, log_e)| (k, RmEntry { r, log_e })).collect();
        let mut log_ex = BTreeMap::new();
        for k in scan.k_x..=(scan.k_x + 2).min(n) {
            log_ex.insert(k, log_expected_independent_sets(n, p, k)?);
        }
        let nf = n as f64;
        let ln_n = nf.ln();
        let regime = regime_label(n, p);
        let xi = (p > nf.powf(-2.0 / 3.0) && p < 1.0 / (ln_n * ln_n)).then(|| {
            let c = p * nf.sqrt() / ln_n;
            let (lower, upper) = xi_band(c);
            XiReport {
                c,
                lower,
                upper,
                center: xi_center(c, log_ex[&scan.k_x].ln(), n, point.epsilon),
            }
        });
        let rz = rz_asymptotic(n, p).ok();
        let rm = rm_asymptotic(n, p, scan.k_z);
        Ok(MomentReport {
            point: *point,
            k_x: scan.k_x,
            k_z: scan.k_z,
            r_z: scan.r_z,
            kz_exceeds_kx: scan.exceeds_kx,
            r_m_table,
            predicted_interval: [scan.k_z, scan.k_z + 1],
            log_ex,
            frieze_estimate: frieze_estimate(n, p).ok(),
            kx_minus_kz_asymptotic: kx_minus_kz_asymptotic(n, p),
            rz_asymptotic: rz,
            rz_asymptotic_ceiled: rz.map(|v| v.ceil() as i64),
            rm_asymptotic_at_kz: rm,
            rm_asymptotic_at_kz_ceiled: rm.ceil() as i64,
            xi,
            upper_bound: upper_bound_diagnostic(n, p).ok(),
            regime,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{k_x, k_z, r_m};

    #[test]
    fn report_invariants() {
        for n in [100usize, 1000, 10_000] {
            for e in [0.3, 0.45, 0.55, 0.6, 0.7] {
                let pt = ParamPoint::new(n, (n as f64).powf(-e)).unwrap();
                let rep = MomentReport::build(&pt).unwrap();
                assert!(rep.k_z <= rep.k_x);
                assert_eq!(rep.k_x, k_x(&pt).unwrap());
                assert_eq!((rep.k_z, rep.r_z), k_z(&pt).unwrap());
                assert_eq!(rep.r_z, r_m(n, pt.p, rep.k_z).unwrap().0);
                assert_eq!(rep.r_m_table[&rep.k_z].r, rep.r_z);
                assert_eq!(rep.predicted_interval, [rep.k_z, rep.k_z + 1]);
                if rep.regime == Regime::Middle {
                    assert_eq!(rep.k_z, rep.k_x);
                }
                assert_eq!(rep.xi.is_some(), matches!(rep.regime, Regime::Middle | Regime::Critical | Regime::SparseValid));
            }
        }
    }

    #[test]
    fn dense_interval_is_k_x() {
        let pt = ParamPoint::new(100_000, 0.2).unwrap();
        let rep = MomentReport::build(&pt).unwrap();
        assert_eq!(rep.regime, Regime::Dense);
        assert_eq!(rep.predicted_interval, [rep.k_x, rep.k_x + 1]);
        assert_eq!(rep.rz_asymptotic_ceiled, Some(0));
        assert!(rep.xi.is_none());
        let json = serde_json::to_value(&rep).unwrap();
        assert_eq!(json["regime"], "dense");
        assert_eq!(json["point"]["n"], 100_000);
    }
}
