//! Per-slot scheduling: instance model, feasibility, heuristics, exact solver
//! and the 3D-matching reduction.

mod backoff;
mod exact;
mod feasibility;
mod heuristics;
mod instance;
mod reduction;
mod state;

use std::fmt;
use std::str::FromStr;

pub use backoff::solve_greedy_backoff;
pub use exact::{search_tree_bound, solve_exact, ExactError, EXACT_NODE_LIMIT};
pub use feasibility::{verify_feasible, FeasibilityReport, Violation};
pub use heuristics::{solve_global_greedy, solve_local_greedy, solve_random};
pub use instance::{
    Assignment, AssignmentEntry, Capacity, Connection, InstanceDoc, InstanceError, PairSpec, QsspInstance,
    SatelliteSpec, StationSpec, WeightSpec,
};
pub use reduction::{brute_force_3dm, reduce_3dm_to_qssp, ReductionLink, ThreeDmError, ThreeDmInstance, BRUTE_FORCE_3DM_LIMIT};
pub use state::{StateError, WorkingState};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    Random,
    LocalGreedy,
    GlobalGreedy,
    GreedyBackoff,
    Exact,
}

impl Solver {
    pub const ALL: [Solver; 5] = [
        Solver::Random,
        Solver::LocalGreedy,
        Solver::GlobalGreedy,
        Solver::GreedyBackoff,
        Solver::Exact,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Solver::Random => "random",
            Solver::LocalGreedy => "local_greedy",
            Solver::GlobalGreedy => "global_greedy",
            Solver::GreedyBackoff => "greedy_backoff",
            Solver::Exact => "exact",
        }
    }

    /// Solves one instance. `seed` only matters for the randomized heuristics.
    pub fn solve(self, inst: &QsspInstance, seed: u64) -> Result<Assignment, SolveError> {
        Ok(match self {
            Solver::Random => solve_random(inst, seed),
            Solver::LocalGreedy => solve_local_greedy(inst, seed),
            Solver::GlobalGreedy => solve_global_greedy(inst),
            Solver::GreedyBackoff => solve_greedy_backoff(inst),
            Solver::Exact => solve_exact(inst)?,
        })
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown solver {0:?} (expected random, local_greedy, global_greedy, greedy_backoff or exact)")]
pub struct UnknownSolver(pub String);

impl FromStr for Solver {
    type Err = UnknownSolver;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Solver::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| UnknownSolver(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Exact(#[from] ExactError),
}
