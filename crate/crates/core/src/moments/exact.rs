//! Exact and 256-bit reference evaluations.
//!
//! The rational functions take `p` as a [`Rational`] and return exact values.
//! The `Float` functions take any `f64` (converted exactly) and work in the
//! log domain at [`PRECISION`] bits, so they serve irrational `p` such as
//! `n^(-0.6)` as well. Neither shares code with the `f64` engine.

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use super::MomentError;

/// Mantissa bits of the floating-point reference.
pub const PRECISION: u32 = 256;

fn check(p: &Rational) -> Result<(), MomentError> {
    if *p < 0 || *p > 1 {
        return Err(MomentError::Probability(p.to_f64()));
    }
    Ok(())
}

fn choose(n: usize, k: usize) -> Integer {
    Integer::from(n).binomial(k as u32)
}

fn factorial(n: usize) -> Integer {
    Integer::from(Integer::factorial(n as u32))
}

fn pow(x: &Rational, e: usize) -> Rational {
    Rational::from(x.pow(e as u32))
}

/// `E[X_k]` as an exact rational.
pub fn expected_independent_sets(n: usize, p: &Rational, k: usize) -> Result<Rational, MomentError> {
    check(p)?;
    if k > n {
        return Err(MomentError::KOutOfRange { k, n });
    }
    let q = Rational::from(1 - p);
    Ok(pow(&q, k * k.saturating_sub(1) / 2) * choose(n, k))
}

/// `E[Y_k] = E[X_k] (1 - (1-p)^k)^(n-k)`.
pub fn expected_maximal_sets(n: usize, p: &Rational, k: usize) -> Result<Rational, MomentError> {
    let x = expected_independent_sets(n, p, k)?;
    let q = Rational::from(1 - p);
    let hit = 1 - pow(&q, k);
    Ok(x * pow(&hit, n - k))
}

/// `F` for an `s`-set, `s = k + r`.
pub fn f_rational(s: usize, p: &Rational) -> Result<Rational, MomentError> {
    check(p)?;
    if s < 2 {
        return Ok(Rational::new());
    }
    let q = Rational::from(1 - p);
    let miss = pow(&q, s) + pow(&q, s - 1) * p * Integer::from(s);
    Ok(1 - miss)
}

/// `E(n, k, r)` as an exact rational.
pub fn expected_augmented(n: usize, p: &Rational, k: usize, r: usize) -> Result<Rational, MomentError> {
    check(p)?;
    if k > n {
        return Err(MomentError::KOutOfRange { k, n });
    }
    if r > k || k + r > n {
        return Err(MomentError::ROutOfRange { k, r, n });
    }
    let s = k + r;
    let den = factorial(n - s) * factorial(k - r) * factorial(r) * (Integer::from(1) << r as u32);
    let coef = Rational::from((factorial(n), den));
    let q = Rational::from(1 - p);
    let f = f_rational(s, p)?;
    Ok(coef * pow(p, r) * pow(&q, s * s.saturating_sub(1) / 2 - r) * pow(&f, n - s))
}

/// Natural log of a non-negative rational, `-inf` for zero.
pub fn ln_rational(x: &Rational) -> f64 {
    assert!(*x >= 0, "logarithm of a negative value");
    if *x == 0 {
        return f64::NEG_INFINITY;
    }
    Float::with_val(PRECISION, x).ln().to_f64()
}

/// `ln k!` for `k <= n`, summed at [`PRECISION`] bits.
#[derive(Clone, Debug)]
pub struct LnFactorials(Vec<Float>);

impl LnFactorials {
    pub fn new(n: usize) -> Self {
        let mut v = Vec::with_capacity(n + 1);
        let mut acc = Float::with_val(PRECISION, 0);
        v.push(acc.clone());
        for i in 1..=n {
            acc += Float::with_val(PRECISION, i).ln();
            v.push(acc.clone());
        }
        LnFactorials(v)
    }

    pub fn get(&self, k: usize) -> &Float {
        &self.0[k]
    }

    fn binomial(&self, n: usize, k: usize) -> Float {
        Float::with_val(PRECISION, &self.0[n] - &self.0[k]) - &self.0[n - k]
    }
}

/// Float reference for one `(n, p)` pair.
#[derive(Clone, Debug)]
pub struct FloatReference {
    n: usize,
    ln_p: Float,
    ln_q: Float,
    p: Float,
    q: Float,
    fact: LnFactorials,
}

fn neg_inf() -> Float {
    Float::with_val(PRECISION, rug::float::Special::NegInfinity)
}

/// `count * ln_x`, with `0 * -inf = 0`.
fn times(count: usize, ln_x: &Float) -> Float {
    if count == 0 {
        Float::with_val(PRECISION, 0)
    } else {
        Float::with_val(PRECISION, ln_x * count as u32)
    }
}

impl FloatReference {
    pub fn new(n: usize, p: f64) -> Result<Self, MomentError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(MomentError::Probability(p));
        }
        let pf = Float::with_val(PRECISION, p);
        let qf = Float::with_val(PRECISION, 1 - &pf);
        Ok(FloatReference {
            n,
            ln_p: pf.clone().ln(),
            ln_q: qf.clone().ln(),
            p: pf,
            q: qf,
            fact: LnFactorials::new(n),
        })
    }

    /// `ln E[X_k]`.
    pub fn ln_ex(&self, k: usize) -> Float {
        assert!(k <= self.n);
        self.fact.binomial(self.n, k) + times(k * k.saturating_sub(1) / 2, &self.ln_q)
    }

    /// `ln E[Y_k]`.
    pub fn ln_ey(&self, k: usize) -> Float {
        let hit = Float::with_val(PRECISION, 1 - Float::with_val(PRECISION, &self.q).pow(k as u32));
        let hit = if hit == 0 { neg_inf() } else { hit.ln() };
        self.ln_ex(k) + times(self.n - k, &hit)
    }

    /// `ln F` for an `s`-set.
    pub fn ln_f(&self, s: usize) -> Float {
        if s < 2 {
            return neg_inf();
        }
        let qs1 = Float::with_val(PRECISION, (&self.q).pow(s as u32 - 1));
        let miss = Float::with_val(PRECISION, &qs1 * &self.q) + qs1 * &self.p * s as u32;
        let f = Float::with_val(PRECISION, 1 - miss);
        if f <= 0 {
            neg_inf()
        } else {
            f.ln()
        }
    }

    /// `ln E(n, k, r)`.
    pub fn ln_e_aug(&self, k: usize, r: usize) -> Float {
        let n = self.n;
        assert!(r <= k && k + r <= n);
        let s = k + r;
        let mut v = Float::with_val(PRECISION, self.fact.get(n) - self.fact.get(n - s));
        v -= self.fact.get(k - r);
        v -= self.fact.get(r);
        v -= Float::with_val(PRECISION, rug::float::Constant::Log2) * r as u32;
        v + times(r, &self.ln_p) + times(s * s.saturating_sub(1) / 2 - r, &self.ln_q) + times(n - s, &self.ln_f(s))
    }
}

/// Exact rational reference for one `(n, p)` pair with rational `p`.
#[derive(Clone, Debug)]
pub struct RationalReference {
    n: usize,
    p: Rational,
}

impl RationalReference {
    pub fn new(n: usize, p: Rational) -> Result<Self, MomentError> {
        check(&p)?;
        Ok(RationalReference { n, p })
    }
}

fn ln_float(x: &Rational) -> Float {
    if *x == 0 {
        neg_inf()
    } else {
        Float::with_val(PRECISION, x).ln()
    }
}

/// Log-domain first moments from one of the reference backends.
pub trait Reference {
    fn n(&self) -> usize;
    fn ln_ex(&self, k: usize) -> Float;
    fn ln_e_aug(&self, k: usize, r: usize) -> Float;
}

impl Reference for RationalReference {
    fn n(&self) -> usize {
        self.n
    }
    fn ln_ex(&self, k: usize) -> Float {
        ln_float(&expected_independent_sets(self.n, &self.p, k).expect("k <= n"))
    }
    fn ln_e_aug(&self, k: usize, r: usize) -> Float {
        ln_float(&expected_augmented(self.n, &self.p, k, r).expect("valid (k, r)"))
    }
}

impl Reference for FloatReference {
    fn n(&self) -> usize {
        self.n
    }
    fn ln_ex(&self, k: usize) -> Float {
        FloatReference::ln_ex(self, k)
    }
    fn ln_e_aug(&self, k: usize, r: usize) -> Float {
        FloatReference::ln_e_aug(self, k, r)
    }
}

/// Brute-force `k_x`: every `k` in `0..=n`, no early exit.
pub fn scan_k_x<R: Reference>(reference: &R, threshold: f64) -> Option<usize> {
    let t = Float::with_val(PRECISION, threshold);
    (0..=reference.n()).filter(|&k| reference.ln_ex(k) > t).max()
}

/// Brute-force `(k_z, r_z)`: for `k` from `k_x` down, every `r` in
/// `0..=min(k, n - k)`; `r_z` is the smallest maximiser at `k_z`.
pub fn scan_k_z<R: Reference>(reference: &R, k_x: usize, threshold: f64) -> Option<(usize, usize)> {
    let t = Float::with_val(PRECISION, threshold);
    let n = reference.n();
    for k in (0..=k_x).rev() {
        let mut best: Option<(usize, Float)> = None;
        for r in 0..=k.min(n - k) {
            let v = reference.ln_e_aug(k, r);
            if best.as_ref().is_none_or(|(_, b)| v > *b) {
                best = Some((r, v));
            }
        }
        let (r, v) = best.expect("r = 0 is always allowed");
        if v > t {
            return Some((k, r));
        }
    }
    None
}
