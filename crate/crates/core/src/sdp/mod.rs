//! Simulation SDPs: scenarios, problem assembly and the native solver.

pub mod build;
pub mod problem;
pub mod scenario;
pub mod solver;

pub use build::{build_dual, build_epsilon_primal, build_primal, constraint_pairs, ConstraintPair, DualIndex};
pub use problem::{realify, solve, RealifyMode, SdpProblem, SdpSolution};
pub use scenario::{CausalClass, Restriction, SimulationScenario};
pub use solver::{SolveStatus, SolverOptions};

use crate::error::Result;
use crate::tensor::Operator;

/// Link product `F * G` over the labels the two operators share.
pub fn link(f: &Operator, g: &Operator) -> Result<Operator> {
    f.link(g)
}
