//! Two-phase bounded-variable primal simplex.
//!
//! Every row `a'x (sense) b` becomes `a'x + s = b` with a slack `s` whose bounds encode the
//! sense (`<=`: `s >= 0`, `>=`: `s <= 0`, `=`: `s = 0`). Phase 1 adds one artificial per row
//! that is not satisfied by the starting point and minimizes their sum; phase 2 fixes the
//! artificials at zero and minimizes the real objective from the feasible basis.

use std::time::Instant;

use crate::error::SolverError;
use crate::lu::BasisFactor;
use crate::problem::{Sense, SparseProblem};
use crate::solution::{Solution, SolveStats, Status};

const PIVOT_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 50;
/// Pivot magnitudes below this trigger an immediate refactorization after the pivot.
const UNSTABLE_PIVOT: f64 = 1e-7;

#[derive(Debug, Clone)]
pub struct LpOptions {
    pub tol_primal: f64,
    pub tol_dual: f64,
    pub max_iter: usize,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions { tol_primal: 1e-7, tol_dual: 1e-7, max_iter: 1_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free column resting at zero.
    Zero,
}

enum Outcome {
    Optimal,
    Unbounded,
    IterationLimit,
}

struct Tableau<'a> {
    m: usize,
    /// Structural columns followed by `m` slacks and `m` artificials.
    cols: Vec<Vec<(usize, f64)>>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    rhs: Vec<f64>,
    x: Vec<f64>,
    state: Vec<VarState>,
    basis: Vec<usize>,
    factor: BasisFactor,
    opts: &'a LpOptions,
    iterations: usize,
    refactorizations: usize,
    degenerate: usize,
    bland: bool,
}

/// Solves the LP relaxation of `problem` (integrality marks are ignored).
pub fn solve_lp(problem: &SparseProblem, options: &LpOptions) -> Result<Solution, SolverError> {
    problem.validate()?;
    solve_with_bounds(problem, &problem.lower, &problem.upper, options)
}

/// Solves the LP with column bounds replaced by `lower`/`upper`.
pub(crate) fn solve_with_bounds(
    problem: &SparseProblem,
    lower: &[f64],
    upper: &[f64],
    options: &LpOptions,
) -> Result<Solution, SolverError> {
    let start = Instant::now();
    let n = problem.num_vars();
    let m = problem.num_rows();
    if (0..n).any(|j| lower[j] > upper[j]) {
        return Ok(Solution::without_point(Status::Infeasible, n, SolveStats::elapsed(start)));
    }
    let mut t = Tableau::new(problem, lower, upper, options)?;

    let mut phase1_cost = vec![0.0; n + 2 * m];
    for c in phase1_cost.iter_mut().skip(n + m) {
        *c = 1.0;
    }
    let outcome = t.optimize(&phase1_cost)?;
    let bnorm = t.rhs.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let infeasibility: f64 = (n + m..n + 2 * m).map(|j| t.x[j]).sum();
    let stats = |t: &Tableau, start: Instant| SolveStats {
        iterations: t.iterations,
        nodes: 0,
        refactorizations: t.refactorizations,
        wall_time: start.elapsed().as_secs_f64(),
    };
    if matches!(outcome, Outcome::IterationLimit) {
        return Ok(Solution::without_point(Status::IterationLimit, n, stats(&t, start)));
    }
    if infeasibility > options.tol_primal * (1.0 + bnorm) {
        return Ok(Solution::without_point(Status::Infeasible, n, stats(&t, start)));
    }
    for j in n + m..n + 2 * m {
        t.upper[j] = 0.0;
        if t.state[j] != VarState::Basic {
            t.state[j] = VarState::AtLower;
            t.x[j] = 0.0;
        }
    }
    t.degenerate = 0;
    t.bland = false;

    let mut cost = vec![0.0; n + 2 * m];
    cost[..n].copy_from_slice(&problem.objective);
    let outcome = t.optimize(&cost)?;
    t.refactor()?;
    let status = match outcome {
        Outcome::Optimal => Status::Optimal,
        Outcome::Unbounded => Status::Unbounded,
        Outcome::IterationLimit => Status::IterationLimit,
    };
    let primal: Vec<f64> = t.x[..n].to_vec();
    let duals = if status == Status::Optimal { Some(t.duals(&cost)) } else { None };
    Ok(Solution {
        status,
        objective: problem.objective_value(&primal),
        primal,
        duals,
        basis: Some(t.basis.clone()),
        stats: stats(&t, start),
    })
}

fn slack_bounds(sense: Sense) -> (f64, f64) {
    match sense {
        Sense::Le => (0.0, f64::INFINITY),
        Sense::Ge => (f64::NEG_INFINITY, 0.0),
        Sense::Eq => (0.0, 0.0),
    }
}

impl<'a> Tableau<'a> {
    fn new(
        problem: &SparseProblem,
        lower: &[f64],
        upper: &[f64],
        opts: &'a LpOptions,
    ) -> Result<Self, SolverError> {
        let n = problem.num_vars();
        let m = problem.num_rows();
        let total = n + 2 * m;
        let mut cols = problem.columns();
        cols.reserve(2 * m);
        let mut lo = lower.to_vec();
        let mut up = upper.to_vec();
        let mut x = vec![0.0; total];
        let mut state = vec![VarState::AtLower; total];
        for j in 0..n {
            (x[j], state[j]) = if lo[j].is_finite() {
                (lo[j], VarState::AtLower)
            } else if up[j].is_finite() {
                (up[j], VarState::AtUpper)
            } else {
                (0.0, VarState::Zero)
            };
        }
        let rhs: Vec<f64> = problem.rows.iter().map(|r| r.rhs).collect();
        let mut residual = rhs.clone();
        for (i, row) in problem.rows.iter().enumerate() {
            residual[i] -= row.activity(&x[..n]);
        }
        let mut basis = Vec::with_capacity(m);
        let mut art_cols = Vec::with_capacity(m);
        for (i, row) in problem.rows.iter().enumerate() {
            let (sl, su) = slack_bounds(row.sense);
            let s = n + i;
            let a = n + m + i;
            cols.push(vec![(i, 1.0)]);
            lo.push(sl);
            up.push(su);
            let r = residual[i];
            if r >= sl && r <= su {
                x[s] = r;
                state[s] = VarState::Basic;
                basis.push(s);
                art_cols.push(vec![(i, 1.0)]);
            } else {
                let (sv, st) = if r < sl { (sl, VarState::AtLower) } else { (su, VarState::AtUpper) };
                x[s] = sv;
                state[s] = st;
                let rest = r - sv;
                art_cols.push(vec![(i, rest.signum())]);
                x[a] = rest.abs();
                state[a] = VarState::Basic;
                basis.push(a);
            }
        }
        for (i, col) in art_cols.into_iter().enumerate() {
            cols.push(col);
            lo.push(0.0);
            up.push(if state[n + m + i] == VarState::Basic { f64::INFINITY } else { 0.0 });
        }
        let refs: Vec<&[(usize, f64)]> = basis.iter().map(|&j| cols[j].as_slice()).collect();
        let factor = BasisFactor::factorize(m, &refs)?;
        Ok(Tableau {
            m,
            cols,
            lower: lo,
            upper: up,
            rhs,
            x,
            state,
            basis,
            factor,
            opts,
            iterations: 0,
            refactorizations: 1,
            degenerate: 0,
            bland: false,
        })
    }

    fn refactor(&mut self) -> Result<(), SolverError> {
        let refs: Vec<&[(usize, f64)]> = self.basis.iter().map(|&j| self.cols[j].as_slice()).collect();
        self.factor = BasisFactor::factorize(self.m, &refs)?;
        self.refactorizations += 1;
        self.recompute_basic_values();
        Ok(())
    }

    fn recompute_basic_values(&mut self) {
        let mut r = self.rhs.clone();
        for (j, col) in self.cols.iter().enumerate() {
            if self.state[j] != VarState::Basic && self.x[j] != 0.0 {
                for &(i, a) in col {
                    r[i] -= a * self.x[j];
                }
            }
        }
        self.factor.ftran(&mut r);
        for (pos, &j) in self.basis.iter().enumerate() {
            self.x[j] = r[pos];
        }
    }

    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let mut y: Vec<f64> = self.basis.iter().map(|&j| cost[j]).collect();
        self.factor.btran(&mut y);
        y
    }

    fn reduced_cost(&self, j: usize, cost: &[f64], y: &[f64]) -> f64 {
        cost[j] - self.cols[j].iter().map(|&(i, a)| a * y[i]).sum::<f64>()
    }

    /// Picks the entering column and its direction (+1 increase, -1 decrease).
    fn price(&self, cost: &[f64], y: &[f64]) -> Option<(usize, f64)> {
        let tol = self.opts.tol_dual;
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..self.cols.len() {
            let st = self.state[j];
            if st == VarState::Basic || self.lower[j] == self.upper[j] {
                continue;
            }
            let d = self.reduced_cost(j, cost, y);
            let dir = match st {
                VarState::AtLower if d < -tol => 1.0,
                VarState::AtUpper if d > tol => -1.0,
                VarState::Zero if d.abs() > tol => -d.signum(),
                _ => continue,
            };
            if self.bland {
                return Some((j, dir));
            }
            if best.is_none_or(|(_, _, bd)| d.abs() > bd) {
                best = Some((j, dir, d.abs()));
            }
        }
        best.map(|(j, dir, _)| (j, dir))
    }

    fn optimize(&mut self, cost: &[f64]) -> Result<Outcome, SolverError> {
        let m = self.m;
        let bland_after = 3 * self.cols.len().saturating_sub(m);
        loop {
            if self.iterations >= self.opts.max_iter {
                return Ok(Outcome::IterationLimit);
            }
            let y = self.duals(cost);
            let Some((enter, dir)) = self.price(cost, &y) else {
                return Ok(Outcome::Optimal);
            };
            let mut alpha = vec![0.0; m];
            for &(i, a) in &self.cols[enter] {
                alpha[i] = a;
            }
            self.factor.ftran(&mut alpha);

            // Ratio test. `delta` is the change of a basic variable per unit step.
            let mut step = self.upper[enter] - self.lower[enter];
            let mut leave: Option<(usize, f64)> = None;
            let mut leave_mag = 0.0;
            for (pos, &b) in self.basis.iter().enumerate() {
                let a = alpha[pos];
                if a.abs() <= PIVOT_TOL {
                    continue;
                }
                let delta = -dir * a;
                let (limit, bound) = if delta < 0.0 && self.lower[b].is_finite() {
                    (((self.x[b] - self.lower[b]) / -delta).max(0.0), self.lower[b])
                } else if delta > 0.0 && self.upper[b].is_finite() {
                    (((self.upper[b] - self.x[b]) / delta).max(0.0), self.upper[b])
                } else {
                    continue;
                };
                let slack = 1e-12 * (1.0 + step.abs());
                let better = match leave {
                    None => limit < step,
                    Some(_) if limit < step - slack => true,
                    Some((lp, _)) if limit <= step + slack => {
                        let current = self.basis[lp];
                        if self.bland {
                            b < current
                        } else {
                            a.abs() > leave_mag || (a.abs() == leave_mag && b < current)
                        }
                    }
                    Some(_) => false,
                };
                if better {
                    step = limit;
                    leave = Some((pos, bound));
                    leave_mag = a.abs();
                }
            }
            if step.is_infinite() {
                return Ok(Outcome::Unbounded);
            }

            self.iterations += 1;
            if step <= self.opts.tol_primal {
                self.degenerate += 1;
                if self.degenerate > bland_after {
                    self.bland = true;
                }
            }
            for (pos, &b) in self.basis.iter().enumerate() {
                if alpha[pos] != 0.0 {
                    self.x[b] -= dir * alpha[pos] * step;
                }
            }
            self.x[enter] += dir * step;
            match leave {
                None => {
                    // Bound flip of the entering column.
                    (self.x[enter], self.state[enter]) = if dir > 0.0 {
                        (self.upper[enter], VarState::AtUpper)
                    } else {
                        (self.lower[enter], VarState::AtLower)
                    };
                }
                Some((pos, bound)) => {
                    let out = self.basis[pos];
                    self.x[out] = bound;
                    self.state[out] =
                        if bound == self.lower[out] { VarState::AtLower } else { VarState::AtUpper };
                    self.state[enter] = VarState::Basic;
                    self.basis[pos] = enter;
                    self.factor.push_eta(pos, &alpha);
                    if self.factor.num_etas() >= REFACTOR_EVERY || alpha[pos].abs() < UNSTABLE_PIVOT {
                        self.refactor()?;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::ProblemBuilder;

    fn lp_two_vars() -> SparseProblem {
        // min -2x - y  s.t. x + y <= 1, x, y >= 0
        let mut b = ProblemBuilder::new("ex");
        let x = b.add_var("x", 0.0, f64::INFINITY, -2.0, false);
        let y = b.add_var("y", 0.0, f64::INFINITY, -1.0, false);
        b.add_row("c1", Sense::Le, 1.0, [(x, 1.0), (y, 1.0)]);
        b.build().unwrap()
    }

    #[test]
    fn solves_small_lp() {
        let s = solve_lp(&lp_two_vars(), &LpOptions::default()).unwrap();
        assert_eq!(s.status, Status::Optimal);
        assert!((s.objective + 2.0).abs() < 1e-12);
        assert!((s.primal[0] - 1.0).abs() < 1e-12);
        assert!(s.primal[1].abs() < 1e-12);
        // The single row is binding with marginal value -2.
        assert!((s.duals.unwrap()[0] + 2.0).abs() < 1e-12);
    }

    #[test]
    fn detects_infeasible() {
        let mut b = ProblemBuilder::new("inf");
        let x = b.add_var("x", f64::NEG_INFINITY, f64::INFINITY, 1.0, false);
        b.add_row("lo", Sense::Ge, 2.0, [(x, 1.0)]);
        b.add_row("hi", Sense::Le, 1.0, [(x, 1.0)]);
        let s = solve_lp(&b.build().unwrap(), &LpOptions::default()).unwrap();
        assert_eq!(s.status, Status::Infeasible);
    }

    #[test]
    fn detects_unbounded_without_rows() {
        let mut b = ProblemBuilder::new("unb");
        b.add_var("x", 0.0, f64::INFINITY, -1.0, false);
        let s = solve_lp(&b.build().unwrap(), &LpOptions::default()).unwrap();
        assert_eq!(s.status, Status::Unbounded);
    }

    #[test]
    fn free_and_upper_bounded_columns() {
        // min x - y with x free, y <= 3, x >= y - 1 (as row), x + y = 2
        let mut b = ProblemBuilder::new("mix");
        let x = b.add_var("x", f64::NEG_INFINITY, f64::INFINITY, 1.0, false);
        let y = b.add_var("y", f64::NEG_INFINITY, 3.0, -1.0, false);
        b.add_row("r1", Sense::Ge, -1.0, [(x, 1.0), (y, -1.0)]);
        b.add_row("r2", Sense::Eq, 2.0, [(x, 1.0), (y, 1.0)]);
        let s = solve_lp(&b.build().unwrap(), &LpOptions::default()).unwrap();
        assert_eq!(s.status, Status::Optimal);
        // x = y - 1 and x + y = 2 -> y = 1.5, x = 0.5, objective -1.
        assert!((s.objective + 1.0).abs() < 1e-10);
        assert!((s.primal[1] - 1.5).abs() < 1e-10);
    }

    #[test]
    fn iteration_limit_is_reported() {
        let opts = LpOptions { max_iter: 0, ..Default::default() };
        let s = solve_lp(&lp_two_vars(), &opts).unwrap();
        assert_eq!(s.status, Status::IterationLimit);
    }
}
