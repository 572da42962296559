//! Mean-payoff games on finite arenas: Karp cycle means, best responses, the
//! strategy improvement loop, and a brute-force profile oracle.

mod arena;
mod karp;
mod oracle;
mod solve;

pub use arena::{ArenaEdge, FiniteArena, Node};
pub use karp::{cycle_mean, karp_min_mean, min_cycle_mean, optimal_cycle_nodes, simple_cycles, Digraph, MeanCycle};
pub use oracle::enumerate_oracle_finite;
pub use solve::{best_response_min, solve_finite_mpg, verify_finite, BestResponse, FiniteSolution};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FiniteError {
    #[error("no cycle is reachable from node {0}")]
    NoReachableCycle(usize),
    #[error("more than {0} simple cycles")]
    TooManyCycles(usize),
    #[error("{count} strategy profiles exceed the cap of {cap}")]
    ProfileSpaceTooLarge { count: String, cap: u64 },
    #[error("no fixed point after {0} iterations")]
    IterationCapExceeded(usize),
    #[error("improvement is not monotone: {0}")]
    MonotonicityViolated(String),
    #[error("node {0:?} has no outgoing edge")]
    NoOutgoingEdge(String),
    #[error("edge {0} refers to a missing node")]
    BadEdge(usize),
    #[error("unknown node {0:?}")]
    UnknownNode(String),
    #[error("duplicate node id {0:?}")]
    DuplicateNode(String),
    #[error("invalid arena document: {0}")]
    Json(String),
    #[error("strategy is not a valid positional choice: {0}")]
    BadStrategy(String),
}
