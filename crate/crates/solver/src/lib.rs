//! Sparse LP/MILP engine.
//!
//! [`solve_lp`] is a two-phase bounded-variable primal simplex with a dense LU basis
//! factorization, [`solve_milp`] runs best-first branch-and-bound over binary columns, and
//! [`mps`] reads and writes free-format MPS for use with external solvers.

mod error;
pub mod kkt;
mod lu;
mod milp;
pub mod mps;
mod problem;
mod simplex;
mod solution;

pub use error::{MpsError, ProblemError, SolverError};
pub use kkt::{check_optimality, OptimalityReport};
pub use milp::{solve_milp, MilpOptions, INTEGRALITY_TOL};
pub use mps::{read_mps, to_mps_string, write_mps};
pub use problem::{ProblemBuilder, Row, Sense, SparseProblem};
pub use simplex::{solve_lp, LpOptions};
pub use solution::{Solution, SolveStats, Status};
