//! Linear programs for SSW search and a dense simplex solver.

mod model;
mod reduced;
mod simplex;
mod ssw;

pub use model::{Constraint, LinearProgram, LpSolution, LpStatus, Relation, Variable};
pub use reduced::{build_reduced_lp, class_factor, class_overlap, ReducedProgram, ReducedSolution};
pub use simplex::{solve_lp, solve_lp_with, SimplexOptions, DEFAULT_ITERATION_LIMIT};
pub use ssw::{
    build_feasibility_lp, certify_witness, build_negativity_lp, ProgramKind, SolverStats, SswProgram, SswSolution,
    DETECTION_TOL,
};
