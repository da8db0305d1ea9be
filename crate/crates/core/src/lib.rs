pub mod augmented;
pub mod experiments;
mod bits;
pub mod graph;
pub mod moments;
pub mod sampler;
pub mod solver;

pub use graph::{Graph, GraphError, VertexSet};
pub use solver::{alpha, Budget, SolveError, SolveResult, Solver};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/graphs.md")]
    struct Graphs;
    #[doc = include_str!("../../../book/src/augmented.md")]
    struct Augmented;
    #[doc = include_str!("../../../book/src/moments.md")]
    struct Moments;
    #[doc = include_str!("../../../book/src/experiments.md")]
    struct Experiments;
}
