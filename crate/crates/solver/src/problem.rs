//! Sparse LP/MILP representation shared by the formulation, the solvers and the MPS I/O.

use std::fmt;

use crate::error::ProblemError;

/// Constraint sense of a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        })
    }
}

/// One constraint row. Coefficients are sorted by column and free of duplicates and zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub sense: Sense,
    pub rhs: f64,
    pub coeffs: Vec<(usize, f64)>,
}

impl Row {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Amount by which `x` violates this row (0 when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let act = self.activity(x);
        match self.sense {
            Sense::Le => (act - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - act).max(0.0),
            Sense::Eq => (act - self.rhs).abs(),
        }
    }
}

/// A minimization problem `min c'x + offset` subject to row constraints and column bounds.
///
/// Infinite bounds are stored explicitly as `f64::INFINITY` / `f64::NEG_INFINITY`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseProblem {
    pub name: String,
    pub col_names: Vec<String>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub objective: Vec<f64>,
    /// Constant term added to every objective value.
    pub objective_offset: f64,
    pub integer: Vec<bool>,
    pub rows: Vec<Row>,
}

impl SparseProblem {
    pub fn num_vars(&self) -> usize {
        self.col_names.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_nonzeros(&self) -> usize {
        self.rows.iter().map(|r| r.coeffs.len()).sum()
    }

    pub fn has_integers(&self) -> bool {
        self.integer.iter().any(|&b| b)
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective_offset + self.objective.iter().zip(x).map(|(c, v)| c * v).sum::<f64>()
    }

    /// Column-major copy of the constraint matrix.
    pub fn columns(&self) -> Vec<Vec<(usize, f64)>> {
        let mut cols = vec![Vec::new(); self.num_vars()];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, a) in &row.coeffs {
                cols[j].push((i, a));
            }
        }
        cols
    }

    /// Checks the structural invariants of the problem.
    pub fn validate(&self) -> Result<(), ProblemError> {
        let n = self.num_vars();
        if self.lower.len() != n
            || self.upper.len() != n
            || self.objective.len() != n
            || self.integer.len() != n
        {
            return Err(ProblemError::LengthMismatch);
        }
        for j in 0..n {
            let (l, u) = (self.lower[j], self.upper[j]);
            if l.is_nan() || u.is_nan() || l > u || l == f64::INFINITY || u == f64::NEG_INFINITY {
                return Err(ProblemError::InvalidBounds {
                    column: self.col_names[j].clone(),
                    lower: l,
                    upper: u,
                });
            }
            if !self.objective[j].is_finite() {
                return Err(ProblemError::NonFinite(self.col_names[j].clone()));
            }
        }
        for row in &self.rows {
            if row.coeffs.is_empty() {
                return Err(ProblemError::EmptyRow(row.name.clone()));
            }
            if !row.rhs.is_finite() {
                return Err(ProblemError::NonFinite(row.name.clone()));
            }
            let mut prev = None;
            for &(j, a) in &row.coeffs {
                if j >= n {
                    return Err(ProblemError::ColumnOutOfRange { row: row.name.clone(), column: j });
                }
                if prev.is_some_and(|p| p >= j) {
                    return Err(ProblemError::UnsortedRow(row.name.clone()));
                }
                if !a.is_finite() || a == 0.0 {
                    return Err(ProblemError::NonFinite(row.name.clone()));
                }
                prev = Some(j);
            }
        }
        Ok(())
    }

    /// Largest bound or row violation of `x`, each row scaled by `1 + |rhs|`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let bounds = (0..self.num_vars())
            .map(|j| (self.lower[j] - x[j]).max(x[j] - self.upper[j]).max(0.0))
            .fold(0.0, f64::max);
        self.rows
            .iter()
            .map(|r| r.violation(x) / (1.0 + r.rhs.abs()))
            .fold(bounds, f64::max)
    }
}

/// Incremental assembly of a [`SparseProblem`].
///
/// Duplicate `(row, column)` entries are summed and exact zeros dropped when a row is added.
#[derive(Debug, Clone, Default)]
pub struct ProblemBuilder {
    problem: SparseProblem,
}

impl Default for SparseProblem {
    fn default() -> Self {
        SparseProblem {
            name: String::new(),
            col_names: Vec::new(),
            lower: Vec::new(),
            upper: Vec::new(),
            objective: Vec::new(),
            objective_offset: 0.0,
            integer: Vec::new(),
            rows: Vec::new(),
        }
    }
}

impl ProblemBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        ProblemBuilder {
            problem: SparseProblem { name: name.into(), ..Default::default() },
        }
    }

    pub fn num_vars(&self) -> usize {
        self.problem.num_vars()
    }

    pub fn num_rows(&self) -> usize {
        self.problem.num_rows()
    }

    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
        cost: f64,
        integer: bool,
    ) -> usize {
        let p = &mut self.problem;
        p.col_names.push(name.into());
        p.lower.push(lower);
        p.upper.push(upper);
        p.objective.push(cost);
        p.integer.push(integer);
        p.col_names.len() - 1
    }

    pub fn add_objective(&mut self, col: usize, cost: f64) {
        self.problem.objective[col] += cost;
    }

    pub fn add_offset(&mut self, value: f64) {
        self.problem.objective_offset += value;
    }

    /// Adds a row; returns `None` (and adds nothing) when every coefficient cancels to zero.
    pub fn add_row(
        &mut self,
        name: impl Into<String>,
        sense: Sense,
        rhs: f64,
        terms: impl IntoIterator<Item = (usize, f64)>,
    ) -> Option<usize> {
        let coeffs = canonical_terms(terms);
        if coeffs.is_empty() {
            return None;
        }
        self.problem.rows.push(Row { name: name.into(), sense, rhs, coeffs });
        Some(self.problem.rows.len() - 1)
    }

    pub fn build(self) -> Result<SparseProblem, ProblemError> {
        self.problem.validate()?;
        Ok(self.problem)
    }
}

fn canonical_terms(terms: impl IntoIterator<Item = (usize, f64)>) -> Vec<(usize, f64)> {
    let mut v: Vec<(usize, f64)> = terms.into_iter().collect();
    v.sort_by_key(|&(j, _)| j);
    let mut out: Vec<(usize, f64)> = Vec::with_capacity(v.len());
    for (j, a) in v {
        match out.last_mut() {
            Some(last) if last.0 == j => last.1 += a,
            _ => out.push((j, a)),
        }
    }
    out.retain(|&(_, a)| a != 0.0);
    out
}
