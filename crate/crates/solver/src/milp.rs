//! Best-first branch-and-bound over binary columns.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use crate::error::SolverError;
use crate::problem::SparseProblem;
use crate::simplex::{solve_with_bounds, LpOptions};
use crate::solution::{Solution, SolveStats, Status};

/// Distance from 0/1 within which a relaxed binary counts as integral.
pub const INTEGRALITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct MilpOptions {
    pub gap_abs: f64,
    pub gap_rel: f64,
    pub max_nodes: usize,
    pub lp: LpOptions,
}

impl Default for MilpOptions {
    fn default() -> Self {
        MilpOptions { gap_abs: 1e-6, gap_rel: 1e-6, max_nodes: 100_000, lp: LpOptions::default() }
    }
}

/// Open node: bound overrides on the binaries plus the parent's relaxation value.
struct Node {
    id: usize,
    bound: f64,
    fixings: Vec<(usize, f64)>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // Max-heap order: smallest bound first, then smallest id.
    fn cmp(&self, other: &Self) -> Ordering {
        other.bound.total_cmp(&self.bound).then_with(|| other.id.cmp(&self.id))
    }
}

/// Solves a problem whose integer columns are all binaries.
///
/// The returned solution carries `stats.nodes`; duals are not reported.
pub fn solve_milp(problem: &SparseProblem, options: &MilpOptions) -> Result<Solution, SolverError> {
    problem.validate()?;
    for j in 0..problem.num_vars() {
        if problem.integer[j] && (problem.lower[j] < 0.0 || problem.upper[j] > 1.0) {
            return Err(SolverError::NonBinaryInteger(problem.col_names[j].clone()));
        }
    }
    let start = Instant::now();
    let n = problem.num_vars();
    let mut stats = SolveStats::default();
    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut open = BinaryHeap::new();
    open.push(Node { id: 0, bound: f64::NEG_INFINITY, fixings: Vec::new() });
    let mut next_id = 1;
    let mut hit_limit = false;
    let mut lower = problem.lower.clone();
    let mut upper = problem.upper.clone();

    while let Some(node) = open.pop() {
        if let Some((best, _)) = &incumbent {
            if node.bound >= *best - gap(options, *best) {
                continue;
            }
        }
        if stats.nodes >= options.max_nodes {
            hit_limit = true;
            open.push(node);
            break;
        }
        stats.nodes += 1;

        lower.copy_from_slice(&problem.lower);
        upper.copy_from_slice(&problem.upper);
        for &(j, v) in &node.fixings {
            lower[j] = v;
            upper[j] = v;
        }
        let relax = solve_with_bounds(problem, &lower, &upper, &options.lp)?;
        stats.iterations += relax.stats.iterations;
        stats.refactorizations += relax.stats.refactorizations;
        match relax.status {
            Status::Optimal => {}
            Status::Infeasible => continue,
            Status::Unbounded if incumbent.is_none() && node.id == 0 => {
                stats.wall_time = start.elapsed().as_secs_f64();
                return Ok(Solution::without_point(Status::Unbounded, n, stats));
            }
            // A bounded MILP cannot have an unbounded child relaxation once the root is bounded.
            Status::Unbounded => continue,
            Status::IterationLimit | Status::NodeLimit => {
                stats.wall_time = start.elapsed().as_secs_f64();
                return Ok(finish(problem, incumbent, Status::IterationLimit, stats));
            }
        }
        if let Some((best, _)) = &incumbent {
            if relax.objective >= *best - gap(options, *best) {
                continue;
            }
        }
        match branching_column(problem, &relax.primal) {
            None => incumbent = Some((relax.objective, relax.primal)),
            Some(j) => {
                for value in [0.0, 1.0] {
                    let mut fixings = node.fixings.clone();
                    fixings.push((j, value));
                    open.push(Node { id: next_id, bound: relax.objective, fixings });
                    next_id += 1;
                }
            }
        }
    }
    stats.wall_time = start.elapsed().as_secs_f64();
    let status = if hit_limit { Status::NodeLimit } else { Status::Optimal };
    Ok(finish(problem, incumbent, status, stats))
}

fn gap(options: &MilpOptions, incumbent: f64) -> f64 {
    options.gap_abs.max(options.gap_rel * incumbent.abs())
}

/// Most fractional binary, lowest index on ties.
fn branching_column(problem: &SparseProblem, x: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for j in 0..problem.num_vars() {
        if !problem.integer[j] {
            continue;
        }
        let frac = (x[j] - x[j].floor()).min(x[j].ceil() - x[j]);
        if frac > INTEGRALITY_TOL && best.is_none_or(|(_, f)| frac > f) {
            best = Some((j, frac));
        }
    }
    best.map(|(j, _)| j)
}

fn finish(
    problem: &SparseProblem,
    incumbent: Option<(f64, Vec<f64>)>,
    status: Status,
    stats: SolveStats,
) -> Solution {
    match incumbent {
        Some((objective, primal)) => Solution {
            status,
            primal,
            objective,
            duals: None,
            basis: None,
            stats,
        },
        None => {
            let status = if status == Status::Optimal { Status::Infeasible } else { status };
            Solution::without_point(status, problem.num_vars(), stats)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{ProblemBuilder, Sense};
    use crate::simplex::solve_lp;

    #[test]
    fn knapsack_pair() {
        // min -3a - 2b s.t. a + b <= 1, binaries
        let mut b = ProblemBuilder::new("k");
        let x1 = b.add_var("x1", 0.0, 1.0, -3.0, true);
        let x2 = b.add_var("x2", 0.0, 1.0, -2.0, true);
        b.add_row("c", Sense::Le, 1.0, [(x1, 1.0), (x2, 1.0)]);
        let s = solve_milp(&b.build().unwrap(), &MilpOptions::default()).unwrap();
        assert_eq!(s.status, Status::Optimal);
        assert!((s.objective + 3.0).abs() < 1e-9);
        assert!((s.primal[0] - 1.0).abs() < 1e-9 && s.primal[1].abs() < 1e-9);
        assert!(s.duals.is_none());
    }

    #[test]
    fn integral_relaxation_uses_one_node() {
        let mut b = ProblemBuilder::new("i");
        let x = b.add_var("x", 0.0, 1.0, -1.0, true);
        b.add_row("c", Sense::Le, 1.0, [(x, 1.0)]);
        let s = solve_milp(&b.build().unwrap(), &MilpOptions::default()).unwrap();
        assert_eq!(s.stats.nodes, 1);
        assert!((s.objective + 1.0).abs() < 1e-12);
    }

    #[test]
    fn fixed_binaries_match_lp() {
        let mut b = ProblemBuilder::new("f");
        let x = b.add_var("x", 1.0, 1.0, 2.0, true);
        let y = b.add_var("y", 0.0, 0.0, -5.0, true);
        let z = b.add_var("z", 0.0, 10.0, 1.0, false);
        b.add_row("c", Sense::Ge, 3.5, [(x, 2.0), (y, 1.0), (z, 1.0)]);
        let p = b.build().unwrap();
        let milp = solve_milp(&p, &MilpOptions::default()).unwrap();
        let lp = solve_lp(&p, &LpOptions::default()).unwrap();
        assert_eq!(milp.status, Status::Optimal);
        assert!((milp.objective - lp.objective).abs() < 1e-12);
        assert_eq!(milp.primal, lp.primal);
    }

    #[test]
    fn general_integers_are_rejected() {
        let mut b = ProblemBuilder::new("g");
        let x = b.add_var("x", 0.0, 5.0, 1.0, true);
        b.add_row("c", Sense::Le, 1.0, [(x, 1.0)]);
        assert!(matches!(
            solve_milp(&b.build().unwrap(), &MilpOptions::default()),
            Err(SolverError::NonBinaryInteger(_))
        ));
    }

    #[test]
    fn node_limit_keeps_incumbent_status() {
        // Fractional root, so one node cannot finish the search.
        let mut b = ProblemBuilder::new("n");
        let x = b.add_var("x", 0.0, 1.0, -1.0, true);
        let y = b.add_var("y", 0.0, 1.0, -1.0, true);
        b.add_row("c", Sense::Le, 1.5, [(x, 1.0), (y, 1.0)]);
        let opts = MilpOptions { max_nodes: 1, ..Default::default() };
        let s = solve_milp(&b.build().unwrap(), &opts).unwrap();
        assert_eq!(s.status, Status::NodeLimit);
    }

    #[test]
    fn infeasible_binary_problem() {
        let mut b = ProblemBuilder::new("x");
        let x = b.add_var("x", 0.0, 1.0, 0.0, true);
        let y = b.add_var("y", 0.0, 1.0, 0.0, true);
        b.add_row("c", Sense::Eq, 1.0, [(x, 2.0), (y, 2.0)]);
        let s = solve_milp(&b.build().unwrap(), &MilpOptions::default()).unwrap();
        assert_eq!(s.status, Status::Infeasible);
    }
}
