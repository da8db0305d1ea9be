//! Augmented independent sets.
//!
//! A set `S` with `|S| = k + r` is an augmented independent set of order `k`
//! when the graph induced on `S` is a matching with `r` edges and every vertex
//! outside `S` has at least two neighbours in `S`. Dropping one endpoint of
//! each matching edge leaves an independent `k`-set, in `2^r` ways.
//!
//! The exhaustive routines ([`alpha_hat`], [`count_augmented`]) work on `u64`
//! masks and accept at most 64 vertices; they are meant for `n` up to about 25.

use num_bigint::BigUint;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{degree_in, induced_edges, Graph, GraphError, VertexSet};
use crate::solver::{Budget, Meter};

/// Largest graph the exhaustive fallback of [`extend_to_augmented`] handles.
pub const EXHAUSTIVE_LIMIT: usize = 25;

#[derive(Debug, Error)]
pub enum AugmentedError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("pair ({0}, {0}) repeats a vertex")]
    RepeatedVertex(usize),
    #[error("pair ({0}, {1}) is not inside the set")]
    PairOutsideSet(usize, usize),
    #[error("starting set is not independent")]
    NotIndependent,
    #[error("no augmented superset of the starting set was found")]
    NoExtension,
    #[error("exhaustive search supports at most 64 vertices, got {0}")]
    TooLarge(usize),
    #[error("search budget exhausted after {0} nodes")]
    BudgetExhausted(u64),
}

/// A vertex set together with the matching it induces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AugmentedSet {
    set: VertexSet,
    matching: Vec<(usize, usize)>,
}

impl AugmentedSet {
    pub fn set(&self) -> &VertexSet {
        &self.set
    }

    /// Matching edges as `(u, v)` with `u < v`, sorted.
    pub fn matching(&self) -> &[(usize, usize)] {
        &self.matching
    }

    pub fn r(&self) -> usize {
        self.matching.len()
    }

    pub fn order(&self) -> usize {
        self.set.len() - self.r()
    }

    /// The `2^r` independent sets of size [`order`](Self::order) obtained by
    /// dropping one endpoint of every matching edge. Panics if `r > 20`.
    pub fn transversals(&self) -> Vec<VertexSet> {
        assert!(self.r() <= 20, "2^{} sets requested", self.r());
        (0u32..1 << self.r())
            .map(|choice| {
                let mut s = self.set.clone();
                for (i, &(u, v)) in self.matching.iter().enumerate() {
                    s.remove(if choice >> i & 1 == 0 { u } else { v });
                }
                s
            })
            .collect()
    }
}

/// Checks the three defining conditions: the edges induced on `s` are exactly
/// `matching`, the matching is vertex-disjoint, and every vertex outside `s`
/// has at least two neighbours in `s`.
///
/// A pair that is not an edge of `g` only makes the answer false. Pairs of the
/// form `(v, v)`, pairs leaving `s` and out-of-range vertices are errors.
pub fn is_augmented(g: &Graph, s: &VertexSet, matching: &[(usize, usize)]) -> Result<bool, AugmentedError> {
    g.check_set(s)?;
    let mut pairs = Vec::with_capacity(matching.len());
    for &(u, v) in matching {
        g.check_vertex(u)?;
        g.check_vertex(v)?;
        if u == v {
            return Err(AugmentedError::RepeatedVertex(u));
        }
        if !s.contains(u) || !s.contains(v) {
            return Err(AugmentedError::PairOutsideSet(u, v));
        }
        pairs.push((u.min(v), u.max(v)));
    }
    let mut covered = VertexSet::new(g.n());
    for &(u, v) in &pairs {
        if !covered.insert(u) || !covered.insert(v) {
            return Ok(false);
        }
    }
    pairs.sort_unstable();
    if induced_edges(g, s)? != pairs {
        return Ok(false);
    }
    for v in s.complement().iter() {
        if degree_in(g, v, s)? < 2 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Grows a maximum independent set `s` into an augmented independent set.
///
/// Vertices outside the current set are scanned once in ascending order and
/// added whenever the induced graph stays a matching. The result is checked
/// with [`is_augmented`]; if the check fails (possible only when `s` is not
/// maximum) graphs with at most [`EXHAUSTIVE_LIMIT`] vertices fall back to an
/// exhaustive search over supersets of `s`.
pub fn extend_to_augmented(g: &Graph, s: &VertexSet) -> Result<AugmentedSet, AugmentedError> {
    g.check_set(s)?;
    if !g.is_independent(s) {
        return Err(AugmentedError::NotIndependent);
    }
    #[cfg(debug_assertions)]
    if g.n() <= 40 {
        if let Ok(res) = crate::solver::alpha(g) {
            debug_assert_eq!(s.len(), res.alpha, "starting set is not maximum");
        }
    }
    let n = g.n();
    let mut t = s.clone();
    let mut deg: Vec<usize> = (0..n).map(|v| degree_in(g, v, &t).expect("in range")).collect();
    for v in 0..n {
        if t.contains(v) {
            continue;
        }
        let fits = match deg[v] {
            0 => true,
            1 => {
                let u = g.neighbors(v).find(|&u| t.contains(u)).expect("one neighbour in T");
                deg[u] == 0
            }
            _ => false,
        };
        if fits {
            t.insert(v);
            for u in g.neighbors(v) {
                deg[u] += 1;
            }
        }
    }
    let matching = induced_edges(g, &t)?;
    if is_augmented(g, &t, &matching)? {
        return Ok(AugmentedSet { set: t, matching });
    }
    if n > EXHAUSTIVE_LIMIT {
        return Err(AugmentedError::NoExtension);
    }
    let forced = mask_of(s);
    let mut search = Search::new(g, Budget::unlimited())?;
    search.max_order(0, forced, 0, 0, forced);
    match search.best_set {
        Some(m) => {
            let set = VertexSet::from_vertices(n, (0..n).filter(|&v| m >> v & 1 == 1))?;
            let matching = induced_edges(g, &set)?;
            Ok(AugmentedSet { set, matching })
        }
        None => Err(AugmentedError::NoExtension),
    }
}

/// Largest order of an augmented independent set, by exhaustive search.
pub fn alpha_hat(g: &Graph) -> Result<usize, AugmentedError> {
    alpha_hat_within(g, &Budget::default())
}

pub fn alpha_hat_within(g: &Graph, budget: &Budget) -> Result<usize, AugmentedError> {
    let mut search = Search::new(g, *budget)?;
    search.max_order(0, 0, 0, 0, 0);
    search.finish()?;
    // The empty graph on zero vertices has only the empty set.
    Ok(search.best_order.unwrap_or(0))
}

/// Number of augmented independent sets of order `k` with exactly `r`
/// matching edges. The matching is determined by the set, so this also counts
/// the pairs `(S, m_S)`.
pub fn count_augmented(g: &Graph, k: usize, r: usize) -> Result<BigUint, AugmentedError> {
    count_augmented_within(g, k, r, &Budget::default())
}

pub fn count_augmented_within(g: &Graph, k: usize, r: usize, budget: &Budget) -> Result<BigUint, AugmentedError> {
    let mut search = Search::new(g, *budget)?;
    let mut total = 0u64;
    search.count(0, 0, 0, 0, k + r, r, &mut total);
    search.finish()?;
    Ok(BigUint::from(total))
}

fn mask_of(s: &VertexSet) -> u64 {
    s.iter().fold(0, |m, v| m | 1 << v)
}

struct Search {
    adj: Vec<u64>,
    n: usize,
    meter: Meter,
    aborted: bool,
    best_order: Option<usize>,
    best_set: Option<u64>,
}

impl Search {
    fn new(g: &Graph, budget: Budget) -> Result<Self, AugmentedError> {
        if g.n() > 64 {
            return Err(AugmentedError::TooLarge(g.n()));
        }
        Ok(Search {
            adj: (0..g.n()).map(|v| g.neighbors(v).fold(0, |m, u| m | 1 << u)).collect(),
            n: g.n(),
            meter: Meter::start(&budget),
            aborted: false,
            best_order: None,
            best_set: None,
        })
    }

    fn finish(&self) -> Result<(), AugmentedError> {
        if self.aborted {
            Err(AugmentedError::BudgetExhausted(self.meter.nodes()))
        } else {
            Ok(())
        }
    }

    fn tick(&mut self) -> bool {
        if !self.meter.tick() {
            self.aborted = true;
        }
        !self.aborted
    }

    fn undecided(&self, i: usize) -> u64 {
        if i >= self.n {
            0
        } else {
            (u64::MAX << i) & (u64::MAX >> (64 - self.n))
        }
    }

    /// Whether `v` can join `s` keeping the induced graph a matching, and if
    /// so whether it closes a matching edge.
    fn joins(&self, v: usize, s: u64) -> Option<bool> {
        let hit = self.adj[v] & s;
        match hit.count_ones() {
            0 => Some(false),
            1 if self.adj[hit.trailing_zeros() as usize] & s == 0 => Some(true),
            _ => None,
        }
    }

    /// Every excluded vertex can still reach two neighbours in the set.
    fn outside_ok(&self, s: u64, excluded: u64, open: u64) -> bool {
        let reach = s | open;
        let mut x = excluded;
        while x != 0 {
            let v = x.trailing_zeros() as usize;
            x &= x - 1;
            if (self.adj[v] & reach).count_ones() < 2 {
                return false;
            }
        }
        true
    }

    /// Vertices below `i` are decided; `forced` vertices are in `s` from the start.
    fn max_order(&mut self, i: usize, s: u64, excluded: u64, edges: usize, forced: u64) {
        if !self.tick() {
            return;
        }
        let open = self.undecided(i) & !forced;
        if !self.outside_ok(s, excluded, open) {
            return;
        }
        let order = s.count_ones() as usize - edges;
        if i == self.n {
            if self.best_order.is_none_or(|b| order > b) {
                self.best_order = Some(order);
                self.best_set = Some(s);
            }
            return;
        }
        if let Some(b) = self.best_order {
            if order + open.count_ones() as usize <= b {
                return;
            }
        }
        if forced >> i & 1 == 1 {
            self.max_order(i + 1, s, excluded, edges, forced);
            return;
        }
        if let Some(closes) = self.joins(i, s) {
            self.max_order(i + 1, s | 1 << i, excluded, edges + closes as usize, forced);
        }
        self.max_order(i + 1, s, excluded | 1 << i, edges, forced);
    }

    #[allow(clippy::too_many_arguments)]
    fn count(&mut self, i: usize, s: u64, excluded: u64, edges: usize, size: usize, r: usize, total: &mut u64) {
        if !self.tick() {
            return;
        }
        let have = s.count_ones() as usize;
        let open = self.undecided(i);
        if edges > r || have + (open.count_ones() as usize) < size {
            return;
        }
        if have == size {
            if edges == r && self.outside_ok(s, excluded | open, 0) {
                *total += 1;
            }
            return;
        }
        if !self.outside_ok(s, excluded, open) {
            return;
        }
        if let Some(closes) = self.joins(i, s) {
            self.count(i + 1, s | 1 << i, excluded, edges + closes as usize, size, r, total);
        }
        self.count(i + 1, s, excluded | 1 << i, edges, size, r, total);
    }
}
