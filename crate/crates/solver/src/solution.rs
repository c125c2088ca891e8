use std::fmt;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    NodeLimit,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Optimal => "optimal",
            Status::Infeasible => "infeasible",
            Status::Unbounded => "unbounded",
            Status::IterationLimit => "iterationLimit",
            Status::NodeLimit => "nodeLimit",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    pub nodes: usize,
    pub refactorizations: usize,
    /// Seconds.
    pub wall_time: f64,
}

impl SolveStats {
    pub(crate) fn elapsed(start: Instant) -> Self {
        SolveStats { wall_time: start.elapsed().as_secs_f64(), ..Default::default() }
    }
}

/// Result of an LP or MILP solve.
///
/// `duals` holds one value per row for LP solves, defined as the derivative of the optimal
/// objective with respect to the row's right-hand side.
#[derive(Debug, Clone)]
pub struct Solution {
    pub status: Status,
    pub primal: Vec<f64>,
    pub objective: f64,
    pub duals: Option<Vec<f64>>,
    /// Final basis as column indices; slacks are numbered after the structural columns.
    pub basis: Option<Vec<usize>>,
    pub stats: SolveStats,
}

impl Solution {
    pub(crate) fn without_point(status: Status, n: usize, stats: SolveStats) -> Self {
        Solution {
            status,
            primal: vec![f64::NAN; n],
            objective: f64::NAN,
            duals: None,
            basis: None,
            stats,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }
}
