//! Exact independence number and exact subset-counting oracles.
//!
//! [`alpha`] splits the graph into connected components and runs a
//! branch-and-bound search on each. The search is a maximum-clique search on
//! the complement carried out directly on the rows of the graph: candidate
//! sets are bitsets, the upper bound is a greedy clique cover of the residual
//! candidates (a clique of the graph holds at most one vertex of any
//! independent set), and vertices of degree at most one in the residual graph
//! are taken without branching.

mod bnb;
mod counting;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, VertexSet};

pub(crate) use bnb::Meter;

pub use counting::{
    count_independent_sets, count_independent_sets_within, count_maximal_independent_sets,
    count_maximal_independent_sets_within,
};

/// Node and wall-clock limits for one solve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub max_nodes: u64,
    pub time_limit: Option<Duration>,
}

impl Budget {
    pub const fn nodes(max_nodes: u64) -> Self {
        Budget {
            max_nodes,
            time_limit: None,
        }
    }

    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }

    pub const fn unlimited() -> Self {
        Budget::nodes(u64::MAX)
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::nodes(1_000_000_000)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("search budget exhausted after {nodes} nodes; best independent set found has size {lower_bound}")]
    BudgetExhausted {
        lower_bound: usize,
        witness: VertexSet,
        nodes: u64,
    },
    #[error("incumbent is not an independent set of this graph")]
    BadIncumbent,
    #[error("counting supports at most 127 vertices, got {0}")]
    TooLarge(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    pub alpha: usize,
    /// A maximum independent set.
    pub witness: VertexSet,
    pub nodes_explored: u64,
    pub elapsed: Duration,
}

/// Exact independence number with the default budget.
pub fn alpha(g: &Graph) -> Result<SolveResult, SolveError> {
    Solver::new(Budget::default()).solve(g)
}

/// Configurable exact solver.
#[derive(Clone, Debug, Default)]
pub struct Solver {
    budget: Budget,
    incumbent: Option<VertexSet>,
}

impl Solver {
    pub fn new(budget: Budget) -> Self {
        Solver {
            budget,
            incumbent: None,
        }
    }

    /// Seeds the search with a known independent set. Only the lower bound
    /// changes; the answer is still proved optimal by the search.
    pub fn with_incumbent(mut self, set: VertexSet) -> Self {
        self.incumbent = Some(set);
        self
    }

    pub fn solve(&self, g: &Graph) -> Result<SolveResult, SolveError> {
        let start = Instant::now();
        if let Some(inc) = &self.incumbent {
            if g.check_set(inc).is_err() || !g.is_independent(inc) {
                return Err(SolveError::BadIncumbent);
            }
        }
        let deadline = self.budget.time_limit.map(|d| start + d);
        let mut meter = bnb::Meter::new(self.budget.max_nodes, deadline);
        let mut witness = VertexSet::new(g.n());
        let mut exhausted = false;
        for comp in g.components() {
            let hint = self.incumbent.as_ref().map(|inc| inc.intersection(&comp));
            let set = match bnb::solve_component(g, &comp, hint.as_ref(), &mut meter) {
                Ok(set) => set,
                Err(bnb::Exhausted(set)) => {
                    exhausted = true;
                    set
                }
            };
            for v in set {
                witness.insert(v);
            }
        }
        debug_assert!(g.is_independent(&witness));
        if exhausted {
            return Err(SolveError::BudgetExhausted {
                lower_bound: witness.len(),
                witness,
                nodes: meter.nodes(),
            });
        }
        Ok(SolveResult {
            alpha: witness.len(),
            witness,
            nodes_explored: meter.nodes(),
            elapsed: start.elapsed(),
        })
    }
}
