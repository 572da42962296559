//! Gain/bias strategy improvement on the boundary region abstraction, certification of
//! the optimality equations, integral-payoff scaling, lifting, and the decision problem.

mod certify;
mod evaluate;
mod improve;
mod integral;
mod oracle;

pub use certify::{check_lift, lift_samples, verify_opt, CertificateReport, Equation, Violation};
pub use evaluate::{bias_candidate, eval_zero_player, Evaluation};
pub use improve::{improve_max, improve_min, initial_strategy, solve_two_player, Step, Trace, TwoPlayer};
pub use integral::{cycle_lcm, decide_mpg, integralize_and_solve, value_at, GainBiasSolution, InitialScale};
pub use oracle::{bra_to_arena, oracle_min_max};

use thiserror::Error;

use crate::bra::BraError;
use crate::finite::FiniteError;
use crate::ptga::ValidationReport;
use crate::rational::{Int, Rational};

/// Chosen action index (into the graph's adjacency) per vertex; `None` where the player does not move.
pub type Strategy = Vec<Option<usize>>;

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Bound on strategy evaluations across both loops.
    pub max_iters: usize,
    /// Bound on the scale factor reached by escalation.
    pub max_scale: Int,
    pub initial_scale: InitialScale,
    /// Bound on simple cycles enumerated when the initial scale is a cycle-length lcm.
    pub cycle_cap: usize,
    /// Record every evaluation for inspection.
    pub trace: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_iters: 1_000_000,
            max_scale: Int::from(1u64 << 16),
            initial_scale: InitialScale::One,
            cycle_cap: 100_000,
            trace: false,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error(transparent)]
    Bra(#[from] BraError),
    #[error(transparent)]
    Finite(#[from] FiniteError),
    #[error("invalid arena:\n{0}")]
    Invalid(ValidationReport),
    #[error("cycle {cycle:?} has non-integral gain {value}")]
    NonIntegralGain { cycle: Vec<String>, value: Rational },
    #[error("cycle vertex {0} sits inside an open region with a time-dependent reward")]
    NonPointCycleVertex(String),
    #[error("bias does not close around the cycle through {0}")]
    InconsistentCycle(String),
    #[error("no action chosen at vertex {0}")]
    IncompleteProfile(String),
    #[error("strategy improvement exceeded {0} evaluations")]
    IterationCapExceeded(usize),
    #[error("strategy profile revisited after {0} evaluations")]
    ProfileRevisited(usize),
    #[error("scale would exceed {limit}; last non-integral gain {gain}")]
    ScaleEscalationExceeded { limit: Int, gain: Rational },
    #[error("final solution fails the optimality equations ({0} violations)")]
    CertificateFailed(usize),
    #[error("unknown location {0:?}")]
    UnknownLocation(String),
    #[error("valuation {valuation} is outside the invariant of {location}")]
    OutsideInvariant { location: String, valuation: Rational },
    #[error("state ({location}, {valuation}) lies in no solved vertex class")]
    UnreachableStateClass { location: String, valuation: Rational },
}

impl SolveError {
    /// Short stable name of the variant, used in diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            SolveError::Bra(BraError::TimelockDetected(_)) => "TimelockDetected",
            SolveError::Bra(_) => "BraError",
            SolveError::Finite(FiniteError::ProfileSpaceTooLarge { .. }) => "ProfileSpaceTooLarge",
            SolveError::Finite(_) => "FiniteError",
            SolveError::Invalid(_) => "ValidationFailed",
            SolveError::NonIntegralGain { .. } => "NonIntegralGain",
            SolveError::NonPointCycleVertex(_) => "NonPointCycleVertex",
            SolveError::InconsistentCycle(_) => "InconsistentCycle",
            SolveError::IncompleteProfile(_) => "IncompleteProfile",
            SolveError::IterationCapExceeded(_) => "IterationCapExceeded",
            SolveError::ProfileRevisited(_) => "ProfileRevisited",
            SolveError::ScaleEscalationExceeded { .. } => "ScaleEscalationExceeded",
            SolveError::CertificateFailed(_) => "CertificateFailed",
            SolveError::UnknownLocation(_) => "UnknownLocation",
            SolveError::OutsideInvariant { .. } => "OutsideInvariant",
            SolveError::UnreachableStateClass { .. } => "UnreachableStateClass",
        }
    }
}
