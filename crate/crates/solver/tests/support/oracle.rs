//! Brute-force reference solvers and seeded random instance generators for small problems.
#![allow(dead_code)]

use minfine_solver::{
    check_optimality, solve_lp, LpOptions, ProblemBuilder, Sense, SparseProblem, Status,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Outcome of exhaustive enumeration: the optimal objective, or `None` when infeasible.
pub type OracleValue = Option<f64>;

/// Solves `a x = b` (row-major, n x n) by Gaussian elimination with partial pivoting.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[p][k].abs() < 1e-10 {
            return None;
        }
        a.swap(k, p);
        b.swap(k, p);
        for i in (k + 1)..n {
            let f = a[i][k] / a[k][k];
            if f != 0.0 {
                for j in k..n {
                    a[i][j] -= f * a[k][j];
                }
                b[i] -= f * b[k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = ((k + 1)..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    Some(x)
}

fn combinations(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::new(), f);
}

/// Minimum objective over all vertices of a problem with finite bounds.
///
/// Every vertex is the unique solution of `V` linearly independent active constraints
/// chosen among the rows and the column bounds; candidates are kept if feasible.
pub fn vertex_enumeration(p: &SparseProblem) -> OracleValue {
    let n = p.num_vars();
    assert!((0..n).all(|j| p.lower[j].is_finite() && p.upper[j].is_finite()));
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    for row in &p.rows {
        let mut a = vec![0.0; n];
        for &(j, v) in &row.coeffs {
            a[j] = v;
        }
        planes.push((a, row.rhs));
    }
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        planes.push((e.clone(), p.lower[j]));
        planes.push((e, p.upper[j]));
    }
    let mut best: Option<f64> = None;
    combinations(planes.len(), n, &mut |idx| {
        let a: Vec<Vec<f64>> = idx.iter().map(|&i| planes[i].0.clone()).collect();
        let b: Vec<f64> = idx.iter().map(|&i| planes[i].1).collect();
        let Some(x) = solve_dense(a, b) else { return };
        if p.max_violation(&x) > 1e-9 {
            return;
        }
        let obj = p.objective_value(&x);
        if best.is_none_or(|b| obj < b) {
            best = Some(obj);
        }
    });
    best
}

/// Minimum over all binary assignments, each completed by an LP over the continuous columns.
pub fn assignment_enumeration(p: &SparseProblem) -> OracleValue {
    let bins: Vec<usize> = (0..p.num_vars()).filter(|&j| p.integer[j]).collect();
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << bins.len()) {
        let mut q = p.clone();
        for (k, &j) in bins.iter().enumerate() {
            let v = f64::from((mask >> k) & 1);
            q.lower[j] = v;
            q.upper[j] = v;
            q.integer[j] = false;
        }
        let s = solve_lp(&q, &LpOptions::default()).expect("completion LP");
        if s.status == Status::Optimal && best.is_none_or(|b| s.objective < b) {
            best = Some(s.objective);
        }
    }
    best
}

fn coef(rng: &mut ChaCha8Rng, zero_prob: f64) -> f64 {
    if rng.gen_bool(zero_prob) {
        0.0
    } else {
        f64::from(rng.gen_range(-5i32..=5))
    }
}

/// Random LP with at most 6 columns and 6 rows and finite bounds.
///
/// Most instances are feasible by construction (right-hand sides derived from an interior
/// point); roughly one in seven gets arbitrary right-hand sides and may be infeasible.
pub fn random_lp(seed: u64) -> SparseProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=6);
    let m = rng.gen_range(1..=6);
    let mut b = ProblemBuilder::new(format!("lp{seed}"));
    let mut x0 = Vec::with_capacity(n);
    for j in 0..n {
        let l = f64::from(rng.gen_range(-5i32..=0));
        let u = l + f64::from(rng.gen_range(1i32..=8));
        x0.push(rng.gen_range(l..=u));
        let c = coef(&mut rng, 0.1);
        b.add_var(format!("x{j}"), l, u, c, false);
    }
    let arbitrary = rng.gen_bool(0.15);
    for i in 0..m {
        let mut terms: Vec<(usize, f64)> = (0..n).map(|j| (j, coef(&mut rng, 0.3))).collect();
        if terms.iter().all(|t| t.1 == 0.0) {
            let j = rng.gen_range(0..n);
            terms[j].1 = 1.0;
        }
        let act: f64 = terms.iter().map(|&(j, a)| a * x0[j]).sum();
        let sense = match rng.gen_range(0..5) {
            0 => Sense::Eq,
            1 | 2 => Sense::Le,
            _ => Sense::Ge,
        };
        let rhs = if arbitrary {
            f64::from(rng.gen_range(-20i32..=20))
        } else {
            match sense {
                Sense::Le => act + rng.gen_range(0.0..3.0),
                Sense::Ge => act - rng.gen_range(0.0..3.0),
                Sense::Eq => act,
            }
        };
        b.add_row(format!("r{i}"), sense, rhs, terms);
    }
    b.build().unwrap()
}

/// Random MILP with 1..=8 binaries, up to 3 bounded continuous columns and up to 5 rows.
pub fn random_milp(seed: u64) -> SparseProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0000);
    let nb = rng.gen_range(1..=8);
    let nc = rng.gen_range(0..=3);
    let m = rng.gen_range(1..=5);
    let mut b = ProblemBuilder::new(format!("milp{seed}"));
    let mut x0 = Vec::new();
    for j in 0..nb {
        let c = coef(&mut rng, 0.1);
        b.add_var(format!("b{j}"), 0.0, 1.0, c, true);
        x0.push(f64::from(rng.gen_range(0..=1)));
    }
    for j in 0..nc {
        let u = f64::from(rng.gen_range(1i32..=6));
        let c = coef(&mut rng, 0.1);
        b.add_var(format!("y{j}"), 0.0, u, c, false);
        x0.push(rng.gen_range(0.0..=u));
    }
    let arbitrary = rng.gen_bool(0.15);
    for i in 0..m {
        let mut terms: Vec<(usize, f64)> =
            (0..nb + nc).map(|j| (j, coef(&mut rng, 0.3))).collect();
        if terms.iter().all(|t| t.1 == 0.0) {
            terms[0].1 = 1.0;
        }
        let act: f64 = terms.iter().map(|&(j, a)| a * x0[j]).sum();
        let sense = match rng.gen_range(0..5) {
            0 => Sense::Eq,
            1 | 2 => Sense::Le,
            _ => Sense::Ge,
        };
        let rhs = if arbitrary {
            f64::from(rng.gen_range(-10i32..=10))
        } else {
            match sense {
                Sense::Le => act + f64::from(rng.gen_range(0i32..=2)),
                Sense::Ge => act - f64::from(rng.gen_range(0i32..=2)),
                Sense::Eq => act,
            }
        };
        b.add_row(format!("r{i}"), sense, rhs, terms);
    }
    b.build().unwrap()
}

/// Solves every binary completion of a MILP and returns the worst KKT violation seen.
pub fn completion_kkt_worst(p: &SparseProblem) -> f64 {
    let bins: Vec<usize> = (0..p.num_vars()).filter(|&j| p.integer[j]).collect();
    let mut worst = 0.0f64;
    for mask in 0u32..(1 << bins.len()) {
        let mut q = p.clone();
        for (k, &j) in bins.iter().enumerate() {
            let v = f64::from((mask >> k) & 1);
            q.lower[j] = v;
            q.upper[j] = v;
            q.integer[j] = false;
        }
        let s = solve_lp(&q, &LpOptions::default()).unwrap();
        if s.status == Status::Optimal {
            let r = check_optimality(&q, &s.primal, s.duals.as_ref().unwrap());
            worst = worst.max(r.worst()).max(r.duality_gap);
        }
    }
    worst
}
