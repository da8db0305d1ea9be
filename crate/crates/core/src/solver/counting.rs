//! Exact counts of independent and maximal independent `k`-sets.
//!
//! Both counters work on `u128` vertex masks, so graphs are limited to 127
//! vertices; in practice they are meant for `n` up to about 30.

use num_bigint::BigUint;

use super::bnb::Meter;
use super::{Budget, SolveError};
use crate::graph::Graph;

fn masks(g: &Graph) -> Result<Vec<u128>, SolveError> {
    if g.n() > 127 {
        return Err(SolveError::TooLarge(g.n()));
    }
    Ok((0..g.n())
        .map(|v| g.neighbors(v).fold(0u128, |m, u| m | 1 << u))
        .collect())
}

fn exhausted(meter: &Meter) -> SolveError {
    SolveError::BudgetExhausted {
        lower_bound: 0,
        witness: crate::graph::VertexSet::new(0),
        nodes: meter.nodes(),
    }
}

fn binomial(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    if n <= 64 {
        let mut acc: u128 = 1;
        for i in 0..k {
            // exact at every step: acc = C(n, i + 1) after the division
            acc = acc * (n - i) as u128 / (i + 1) as u128;
        }
        return acc;
    }
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    u128::try_from(acc).expect("C(n, k) < 2^127 for n <= 127")
}

/// Number of independent sets of size `k` (the random variable `X_k`).
pub fn count_independent_sets(g: &Graph, k: usize) -> Result<BigUint, SolveError> {
    count_independent_sets_within(g, k, &Budget::default())
}

pub fn count_independent_sets_within(g: &Graph, k: usize, budget: &Budget) -> Result<BigUint, SolveError> {
    let adj = masks(g)?;
    let all = if g.n() == 0 { 0 } else { u128::MAX >> (128 - g.n()) };
    let mut meter = Meter::start(budget);
    let c = count_rec(&adj, all, k as u32, &mut meter).ok_or_else(|| exhausted(&meter))?;
    Ok(BigUint::from(c))
}

/// Branches on a vertex of maximum candidate degree: sets avoiding it plus
/// sets containing it. Edgeless candidate sets are counted by a binomial.
fn count_rec(adj: &[u128], p: u128, k: u32, meter: &mut Meter) -> Option<u128> {
    if !meter.tick() {
        return None;
    }
    if k == 0 {
        return Some(1);
    }
    let size = p.count_ones();
    if size < k {
        return Some(0);
    }
    let mut pick = None;
    let mut best_deg = 0;
    let mut rest = p;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let d = (adj[v] & p).count_ones();
        if d > best_deg {
            best_deg = d;
            pick = Some(v);
        }
    }
    let Some(v) = pick else {
        return Some(binomial(size, k));
    };
    let without = count_rec(adj, p & !(1 << v), k, meter)?;
    let with = count_rec(adj, p & !(1 << v) & !adj[v], k - 1, meter)?;
    Some(without + with)
}

/// Number of maximal independent sets of size `k` (the random variable
/// `Y_k`): independent `k`-sets that every other vertex has a neighbour in.
pub fn count_maximal_independent_sets(g: &Graph, k: usize) -> Result<BigUint, SolveError> {
    count_maximal_independent_sets_within(g, k, &Budget::default())
}

pub fn count_maximal_independent_sets_within(g: &Graph, k: usize, budget: &Budget) -> Result<BigUint, SolveError> {
    let adj = masks(g)?;
    let n = g.n();
    // settled[i]: vertices u <= i whose neighbours all have index <= i; once
    // vertex i is decided, such a u can no longer gain a chosen neighbour.
    let mut settled = vec![0u128; n];
    for i in 0..n {
        for u in 0..=i {
            let last = if adj[u] == 0 { 0 } else { 127 - adj[u].leading_zeros() as usize };
            if last <= i {
                settled[i] |= 1 << u;
            }
        }
    }
    let mut meter = Meter::start(budget);
    let mut st = MaximalCount {
        adj: &adj,
        settled: &settled,
        n,
        k,
        meter: &mut meter,
    };
    let c = st.rec(0, 0, 0, 0).ok_or_else(|| exhausted(&meter))?;
    Ok(BigUint::from(c))
}

struct MaximalCount<'a> {
    adj: &'a [u128],
    settled: &'a [u128],
    n: usize,
    k: usize,
    meter: &'a mut Meter,
}

impl MaximalCount<'_> {
    /// `chosen` is the partial set over vertices `< i`, `dominated` its
    /// closed neighbourhood.
    fn rec(&mut self, i: usize, chosen: u128, dominated: u128, size: usize) -> Option<u128> {
        if !self.meter.tick() {
            return None;
        }
        if i == self.n {
            let all = if self.n == 0 { 0 } else { u128::MAX >> (128 - self.n) };
            return Some((size == self.k && dominated == all) as u128);
        }
        if size + (self.n - i) < self.k {
            return Some(0);
        }
        let mut total = 0;
        let bit = 1u128 << i;
        if size < self.k && self.adj[i] & chosen == 0 {
            let c = chosen | bit;
            let d = dominated | bit | self.adj[i];
            if self.settled[i] & !d == 0 {
                total += self.rec(i + 1, c, d, size + 1)?;
            }
        }
        if self.settled[i] & !dominated == 0 {
            total += self.rec(i + 1, chosen, dominated, size)?;
        }
        Some(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::cycle;
    use crate::sampler::{sample_gnp, trial_seed};

    /// Plain subset enumeration.
    fn brute(g: &Graph) -> (Vec<u64>, Vec<u64>) {
        let n = g.n();
        let adj: Vec<u32> = (0..n).map(|v| g.neighbors(v).fold(0, |m, u| m | 1 << u)).collect();
        let mut ind = vec![0u64; n + 1];
        let mut max = vec![0u64; n + 1];
        for s in 0u32..1 << n {
            if (0..n).any(|v| s >> v & 1 == 1 && adj[v] & s != 0) {
                continue;
            }
            let k = s.count_ones() as usize;
            ind[k] += 1;
            if (0..n).all(|v| s >> v & 1 == 1 || adj[v] & s != 0) {
                max[k] += 1;
            }
        }
        (ind, max)
    }

    #[test]
    fn examples() {
        let e5 = Graph::empty(5);
        assert_eq!(count_independent_sets(&e5, 2).unwrap(), BigUint::from(10u32));
        assert_eq!(count_independent_sets(&Graph::complete(5), 2).unwrap(), BigUint::from(0u32));
        assert_eq!(count_independent_sets(&cycle(5), 2).unwrap(), BigUint::from(5u32));

        for n in 1..7 {
            assert_eq!(count_maximal_independent_sets(&Graph::complete(n), 1).unwrap(), BigUint::from(n));
        }
        assert_eq!(count_maximal_independent_sets(&e5, 5).unwrap(), BigUint::from(1u32));
        for k in 0..5 {
            assert_eq!(count_maximal_independent_sets(&e5, k).unwrap(), BigUint::from(0u32));
        }
        assert_eq!(count_maximal_independent_sets(&cycle(5), 2).unwrap(), BigUint::from(5u32));
    }

    #[test]
    fn agrees_with_enumeration() {
        for i in 0..200u64 {
            let n = (i % 15) as usize;
            let p = [0.15, 0.35, 0.6][i as usize % 3];
            let g = sample_gnp(n, p, trial_seed(21, i)).unwrap();
            let (ind, max) = brute(&g);
            for k in 0..=n {
                assert_eq!(count_independent_sets(&g, k).unwrap(), BigUint::from(ind[k]));
                assert_eq!(count_maximal_independent_sets(&g, k).unwrap(), BigUint::from(max[k]));
            }
        }
    }

    #[test]
    fn large_counts_do_not_enumerate() {
        // C(100, 50) sets; the edgeless shortcut makes this instant.
        let c = count_independent_sets(&Graph::empty(100), 50).unwrap();
        assert_eq!(c.to_string(), "100891344545564193334812497256");
    }

    #[test]
    fn refuses_huge_graphs() {
        assert_eq!(count_independent_sets(&Graph::empty(128), 1), Err(SolveError::TooLarge(128)));
    }

    #[test]
    fn budget_applies() {
        let g = sample_gnp(40, 0.2, 1).unwrap();
        assert!(matches!(
            count_independent_sets_within(&g, 10, &Budget::nodes(5)),
            Err(SolveError::BudgetExhausted { .. })
        ));
    }
}
