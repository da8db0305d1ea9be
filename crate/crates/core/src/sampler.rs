//! Reproducible random graphs.
//!
//! All randomness comes from xoshiro256** seeded through SplitMix64
//! (`seed_from_u64`). Draws are converted with fixed recipes so that another
//! implementation of the same recipes reproduces the graphs bit for bit:
//!
//! * uniform real: `(next_u64() >> 11) * 2^-53`, in `[0, 1)`;
//! * uniform integer below `b`: Lemire's widening multiply with rejection;
//! * per-trial seed: SplitMix64 finaliser applied to `base + index`.
//!
//! Potential edges are the pairs `(w, v)` with `w < v`, enumerated by `v`
//! ascending and then `w` ascending. `G(n, p)` walks that list with geometric
//! skips; `G(n, m)` picks `m` pair indices with Floyd's algorithm.

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Error, PartialEq)]
pub enum SampleError {
    #[error("edge probability {0} is not in [0, 1]")]
    Probability(f64),
    #[error("edge count {m} exceeds the {max} pairs available on {n} vertices")]
    EdgeCount { n: usize, m: u64, max: u64 },
}

/// Random graph model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Gnp(f64),
    Gnm(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub n: usize,
    pub model: Model,
    pub seed: u64,
}

impl SampleSpec {
    pub fn sample(&self) -> Result<Graph, SampleError> {
        match self.model {
            Model::Gnp(p) => sample_gnp(self.n, p, self.seed),
            Model::Gnm(m) => sample_gnm(self.n, m, self.seed),
        }
    }
}

/// The generator with the crate's conversion recipes attached.
pub struct GraphRng(Xoshiro256StarStar);

impl GraphRng {
    pub fn new(seed: u64) -> Self {
        GraphRng(Xoshiro256StarStar::seed_from_u64(seed))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `0..bound`; `bound` must be positive.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let wide = self.next_u64() as u128 * bound as u128;
            if (wide as u64) >= threshold {
                return (wide >> 64) as u64;
            }
        }
    }
}

/// Seed for trial `index` of a run with master seed `base`.
pub fn trial_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn pair_count(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

/// Inverse of the pair enumeration: index `i` to `(w, v)` with `w < v`.
pub fn pair_at(i: u64) -> (usize, usize) {
    // v is the largest integer with v(v-1)/2 <= i
    let mut v = ((1.0 + (1.0 + 8.0 * i as f64).sqrt()) / 2.0) as u64;
    while v * (v - 1) / 2 > i {
        v -= 1;
    }
    while (v + 1) * v / 2 <= i {
        v += 1;
    }
    ((i - v * (v - 1) / 2) as usize, v as usize)
}

pub fn sample_gnp(n: usize, p: f64, seed: u64) -> Result<Graph, SampleError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(SampleError::Probability(p));
    }
    if p == 0.0 {
        return Ok(Graph::empty(n));
    }
    if p == 1.0 {
        return Ok(Graph::complete(n));
    }
    let mut rng = GraphRng::new(seed);
    let log_q = (-p).ln_1p();
    let mut pairs = Vec::new();
    // Batagelj–Brandes walk over the pair list.
    let (mut v, mut w): (usize, i64) = (1, -1);
    while v < n {
        let u = rng.uniform();
        let skip = ((1.0 - u).ln() / log_q).floor();
        w += 1 + if skip.is_finite() { skip.min(1e15) as i64 } else { i64::MAX / 4 };
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            pairs.push((w as usize, v));
        }
    }
    Ok(Graph::from_unique_pairs(n, pairs))
}

pub fn sample_gnm(n: usize, m: u64, seed: u64) -> Result<Graph, SampleError> {
    let total = pair_count(n);
    if m > total {
        return Err(SampleError::EdgeCount { n, m, max: total });
    }
    let mut rng = GraphRng::new(seed);
    // Floyd: for j in total-m..total pick t < j+1; take t unless seen, else j.
    let mut chosen = std::collections::BTreeSet::new();
    for j in (total - m)..total {
        let t = rng.below(j + 1);
        if !chosen.insert(t) {
            chosen.insert(j);
        }
    }
    Ok(Graph::from_unique_pairs(n, chosen.into_iter().map(pair_at)))
}

/// One uniform real per potential edge, in pair-enumeration order. The graph
/// at level `p` keeps the pairs whose real is below `p`, so raising `p` only
/// ever adds edges.
#[derive(Clone, Debug)]
pub struct CoupledSample {
    n: usize,
    uniforms: Vec<f64>,
}

impl CoupledSample {
    pub fn new(n: usize, seed: u64) -> Self {
        let mut rng = GraphRng::new(seed);
        let uniforms = (0..pair_count(n)).map(|_| rng.uniform()).collect();
        CoupledSample { n, uniforms }
    }

    pub fn at(&self, p: f64) -> Graph {
        let pairs = self
            .uniforms
            .iter()
            .enumerate()
            .filter(|(_, &u)| u < p)
            .map(|(i, _)| pair_at(i as u64));
        Graph::from_unique_pairs(self.n, pairs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extremes() {
        for seed in [0, 1, 99] {
            assert_eq!(sample_gnp(12, 0.0, seed).unwrap(), Graph::empty(12));
            assert_eq!(sample_gnp(12, 1.0, seed).unwrap(), Graph::complete(12));
            assert_eq!(sample_gnm(12, 0, seed).unwrap(), Graph::empty(12));
            assert_eq!(sample_gnm(12, 66, seed).unwrap(), Graph::complete(12));
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(sample_gnp(5, 1.5, 0).unwrap_err(), SampleError::Probability(1.5));
        assert!(sample_gnp(5, -0.1, 0).is_err());
        assert!(sample_gnp(5, f64::NAN, 0).is_err());
        assert!(matches!(sample_gnm(5, 11, 0), Err(SampleError::EdgeCount { max: 10, .. })));
    }

    #[test]
    fn gnm_has_exact_edge_count() {
        for seed in 0..200 {
            assert_eq!(sample_gnm(50, 100, seed).unwrap().edge_count(), 100);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = sample_gnp(60, 0.1, 42).unwrap();
        let b = sample_gnp(60, 0.1, 42).unwrap();
        let c = sample_gnp(60, 0.1, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(sample_gnm(60, 77, 5).unwrap(), sample_gnm(60, 77, 5).unwrap());
    }

    #[test]
    fn pair_enumeration_inverse() {
        let mut i = 0;
        for v in 1..300usize {
            for w in 0..v {
                assert_eq!(pair_at(i), (w, v));
                i += 1;
            }
        }
    }

    #[test]
    fn gnp_mean_edge_count() {
        // n = 100, p = 1/2: Binomial(4950, 1/2), mean 2475, sd sqrt(1237.5).
        let trials = 1000;
        let total: usize = (0..trials).map(|s| sample_gnp(100, 0.5, trial_seed(3, s)).unwrap().edge_count()).sum();
        let mean = total as f64 / trials as f64;
        let se = (4950.0f64 * 0.25).sqrt() / (trials as f64).sqrt();
        assert!((mean - 2475.0).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn coupled_sample_is_monotone() {
        let cs = CoupledSample::new(40, 9);
        let lo = cs.at(0.1);
        let hi = cs.at(0.2);
        for (u, v) in lo.edges() {
            assert!(hi.has_edge(u, v));
        }
        assert_eq!(cs.at(0.0), Graph::empty(40));
        assert_eq!(cs.at(1.0), Graph::complete(40));
    }

    #[test]
    fn below_is_in_range() {
        let mut rng = GraphRng::new(1);
        for b in [1u64, 2, 3, 7, 1000, u64::MAX] {
            for _ in 0..100 {
                assert!(rng.below(b) < b);
            }
        }
    }

    #[test]
    fn trial_seeds_distinct() {
        let seeds: std::collections::HashSet<u64> = (0..10_000).map(|i| trial_seed(7, i)).collect();
        assert_eq!(seeds.len(), 10_000);
    }
}
