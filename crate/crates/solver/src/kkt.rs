//! Independent optimality certificate for LP solutions.
//!
//! Works only from the problem data, a primal point and row duals (`y = d obj / d rhs`);
//! nothing from the simplex basis is reused.

use crate::problem::{Sense, SparseProblem};

/// Worst violation found in each KKT category.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalityReport {
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub complementarity: f64,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// `|primal - dual| / (1 + |primal|)`.
    pub duality_gap: f64,
}

impl OptimalityReport {
    pub fn worst(&self) -> f64 {
        self.primal_infeasibility.max(self.dual_infeasibility).max(self.complementarity)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.worst() <= tol && self.duality_gap <= tol
    }
}

/// Reduced costs `c - A'y`.
pub fn reduced_costs(problem: &SparseProblem, duals: &[f64]) -> Vec<f64> {
    let mut d = problem.objective.clone();
    for (i, row) in problem.rows.iter().enumerate() {
        for &(j, a) in &row.coeffs {
            d[j] -= a * duals[i];
        }
    }
    d
}

/// Checks primal feasibility, dual sign feasibility and complementary slackness.
///
/// Row violations are scaled by `1 + |rhs|`; the other measures are absolute.
pub fn check_optimality(problem: &SparseProblem, primal: &[f64], duals: &[f64]) -> OptimalityReport {
    let n = problem.num_vars();
    let primal_infeasibility = problem.max_violation(primal);
    let d = reduced_costs(problem, duals);

    let mut dual_inf = 0.0f64;
    let mut comp = 0.0f64;
    let mut dual_obj = problem.objective_offset;
    for (i, row) in problem.rows.iter().enumerate() {
        let y = duals[i];
        let wrong_sign = match row.sense {
            Sense::Le => y.max(0.0),
            Sense::Ge => (-y).max(0.0),
            Sense::Eq => 0.0,
        };
        dual_inf = dual_inf.max(wrong_sign);
        comp = comp.max((y * (row.rhs - row.activity(primal))).abs());
        dual_obj += y * row.rhs;
    }
    for j in 0..n {
        let (l, u, x, dj) = (problem.lower[j], problem.upper[j], primal[j], d[j]);
        if dj > 0.0 {
            if l.is_finite() {
                comp = comp.max(dj * (x - l).abs());
                dual_obj += dj * l;
            } else {
                dual_inf = dual_inf.max(dj);
            }
        } else if dj < 0.0 {
            if u.is_finite() {
                comp = comp.max(-dj * (u - x).abs());
                dual_obj += dj * u;
            } else {
                dual_inf = dual_inf.max(-dj);
            }
        }
    }
    let primal_obj = problem.objective_value(primal);
    OptimalityReport {
        primal_infeasibility,
        dual_infeasibility: dual_inf,
        complementarity: comp,
        primal_objective: primal_obj,
        dual_objective: dual_obj,
        duality_gap: (primal_obj - dual_obj).abs() / (1.0 + primal_obj.abs()),
    }
}
