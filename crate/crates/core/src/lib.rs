//! Exact solver and certification toolkit for mean-payoff games on one-clock,
//! binary-priced timed game arenas.
//!
//! The pipeline is: parse and validate a [`Ptga`], build its boundary region
//! abstraction ([`bra`]), solve the gain/bias optimality equations by strategy
//! improvement over regionally constant strategies ([`solver`]), certify the
//! result, and lift it back to the timed semantics. A finite-arena mean-payoff
//! solver ([`finite`]) and brute-force oracles are included for cross-checking.

pub mod bra;
pub mod constraint;
pub mod finite;
pub mod ptga;
pub mod rational;
pub mod regions;
pub mod simplefn;
pub mod solver;

pub use bra::{BoundaryAction, BraGraph, BraState, Flavor};
pub use constraint::{Atom, ClockConstraint, CmpOp, Interval};
pub use ptga::{Edge, Location, Owner, Ptga, ValidationReport};
pub use rational::{Int, Rational};
pub use regions::Region;
pub use simplefn::SimpleFn;
