//! Dense LU factorization of the simplex basis with a product-form eta file for updates.
//!
//! Elimination runs on a dense work array but skips zero multipliers and zero pivot-row
//! entries, so sparse bases factor in roughly the time it takes to scan the array. The
//! factors are then stored column-wise as sparse lists so that the triangular solves cost
//! time proportional to their nonzeros.

use crate::error::SolverError;

const SINGULAR_TOL: f64 = 1e-11;

#[derive(Debug, Clone)]
struct Eta {
    pos: usize,
    pivot: f64,
    /// Off-pivot entries of the entering column in basis coordinates.
    entries: Vec<(usize, f64)>,
}

/// `P B = L U`, followed by the eta updates applied since the last refactorization.
#[derive(Debug, Clone)]
pub(crate) struct BasisFactor {
    m: usize,
    /// `perm[i]` is the original row stored at elimination position `i`.
    perm: Vec<usize>,
    /// Strictly lower entries of `L` by column, unit diagonal implied.
    l_cols: Vec<Vec<(usize, f64)>>,
    /// Strictly upper entries of `U` by column.
    u_cols: Vec<Vec<(usize, f64)>>,
    u_diag: Vec<f64>,
    etas: Vec<Eta>,
}

impl BasisFactor {
    /// Factorizes the `m x m` matrix whose columns are given as sparse `(row, value)` lists.
    pub(crate) fn factorize(m: usize, columns: &[&[(usize, f64)]]) -> Result<Self, SolverError> {
        debug_assert_eq!(columns.len(), m);
        let mut a = vec![0.0; m * m];
        for (j, col) in columns.iter().enumerate() {
            for &(i, v) in col.iter() {
                a[i * m + j] += v;
            }
        }
        let mut perm: Vec<usize> = (0..m).collect();
        let mut l_cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
        let mut pivot_nz = Vec::with_capacity(m);
        for k in 0..m {
            let mut p = k;
            let mut best = a[k * m + k].abs();
            for i in (k + 1)..m {
                let v = a[i * m + k].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best < SINGULAR_TOL {
                return Err(SolverError::SingularBasis);
            }
            if p != k {
                for j in 0..m {
                    a.swap(k * m + j, p * m + j);
                }
                perm.swap(k, p);
                // Multipliers already computed belong to the swapped rows.
                for col in l_cols.iter_mut().take(k) {
                    for e in col.iter_mut() {
                        if e.0 == k {
                            e.0 = p;
                        } else if e.0 == p {
                            e.0 = k;
                        }
                    }
                }
            }
            let pivot = a[k * m + k];
            pivot_nz.clear();
            for j in (k + 1)..m {
                if a[k * m + j] != 0.0 {
                    pivot_nz.push(j);
                }
            }
            for i in (k + 1)..m {
                let v = a[i * m + k];
                if v == 0.0 {
                    continue;
                }
                let mult = v / pivot;
                a[i * m + k] = 0.0;
                l_cols[k].push((i, mult));
                for &j in &pivot_nz {
                    a[i * m + j] -= mult * a[k * m + j];
                }
            }
        }
        let mut u_cols = vec![Vec::new(); m];
        let mut u_diag = vec![0.0; m];
        for j in 0..m {
            u_diag[j] = a[j * m + j];
            for i in 0..j {
                let v = a[i * m + j];
                if v != 0.0 {
                    u_cols[j].push((i, v));
                }
            }
        }
        for col in &mut l_cols {
            col.sort_by_key(|e| e.0);
        }
        Ok(BasisFactor { m, perm, l_cols, u_cols, u_diag, etas: Vec::new() })
    }

    pub(crate) fn num_etas(&self) -> usize {
        self.etas.len()
    }

    /// Solves `B x = rhs` in place (rhs indexed by row, result by basis position).
    pub(crate) fn ftran(&self, rhs: &mut [f64]) {
        let m = self.m;
        let mut z: Vec<f64> = self.perm.iter().map(|&r| rhs[r]).collect();
        for k in 0..m {
            let zk = z[k];
            if zk != 0.0 {
                for &(i, l) in &self.l_cols[k] {
                    z[i] -= l * zk;
                }
            }
        }
        for k in (0..m).rev() {
            let xk = z[k] / self.u_diag[k];
            z[k] = xk;
            if xk != 0.0 {
                for &(i, u) in &self.u_cols[k] {
                    z[i] -= u * xk;
                }
            }
        }
        for eta in &self.etas {
            let vr = z[eta.pos] / eta.pivot;
            z[eta.pos] = vr;
            if vr != 0.0 {
                for &(i, a) in &eta.entries {
                    z[i] -= a * vr;
                }
            }
        }
        rhs.copy_from_slice(&z);
    }

    /// Solves `B' y = rhs` in place (rhs indexed by basis position, result by row).
    pub(crate) fn btran(&self, rhs: &mut [f64]) {
        let m = self.m;
        let mut w = rhs.to_vec();
        for eta in self.etas.iter().rev() {
            let s: f64 = eta.entries.iter().map(|&(i, a)| a * w[i]).sum();
            w[eta.pos] = (w[eta.pos] - s) / eta.pivot;
        }
        for k in 0..m {
            let s: f64 = self.u_cols[k].iter().map(|&(i, u)| u * w[i]).sum();
            w[k] = (w[k] - s) / self.u_diag[k];
        }
        for k in (0..m).rev() {
            let s: f64 = self.l_cols[k].iter().map(|&(i, l)| l * w[i]).sum();
            w[k] -= s;
        }
        for (k, &r) in self.perm.iter().enumerate() {
            rhs[r] = w[k];
        }
    }

    /// Records the replacement of basis position `pos` by a column whose FTRAN image is `alpha`.
    pub(crate) fn push_eta(&mut self, pos: usize, alpha: &[f64]) {
        let entries = alpha
            .iter()
            .enumerate()
            .filter(|&(i, &a)| i != pos && a != 0.0)
            .map(|(i, &a)| (i, a))
            .collect();
        self.etas.push(Eta { pos, pivot: alpha[pos], entries });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_mul(cols: &[Vec<(usize, f64)>], x: &[f64], m: usize) -> Vec<f64> {
        let mut out = vec![0.0; m];
        for (j, col) in cols.iter().enumerate() {
            for &(i, v) in col {
                out[i] += v * x[j];
            }
        }
        out
    }

    fn dense_mul_t(cols: &[Vec<(usize, f64)>], y: &[f64]) -> Vec<f64> {
        cols.iter().map(|col| col.iter().map(|&(i, v)| v * y[i]).sum()).collect()
    }

    #[test]
    fn solves_with_pivoting_and_etas() {
        let m = 4;
        let mut cols: Vec<Vec<(usize, f64)>> = vec![
            vec![(1, 2.0), (3, 1.0)],
            vec![(0, 1.0), (2, -3.0)],
            vec![(0, 4.0), (1, 1.0), (2, 1.0)],
            vec![(3, 5.0), (2, 2.0)],
        ];
        let refs: Vec<&[(usize, f64)]> = cols.iter().map(|c| c.as_slice()).collect();
        let mut f = BasisFactor::factorize(m, &refs).unwrap();
        let b = [1.0, -2.0, 0.5, 3.0];
        let mut x = b.to_vec();
        f.ftran(&mut x);
        let back = dense_mul(&cols, &x, m);
        for i in 0..m {
            assert!((back[i] - b[i]).abs() < 1e-12);
        }
        let mut y = b.to_vec();
        f.btran(&mut y);
        let back = dense_mul_t(&cols, &y);
        for i in 0..m {
            assert!((back[i] - b[i]).abs() < 1e-12);
        }

        // Replace position 1 by a new column.
        let newcol = vec![(0, 1.0), (1, 1.0), (3, -1.0)];
        let mut alpha = vec![0.0; m];
        for &(i, v) in &newcol {
            alpha[i] = v;
        }
        f.ftran(&mut alpha);
        f.push_eta(1, &alpha);
        cols[1] = newcol;
        let mut x = b.to_vec();
        f.ftran(&mut x);
        let back = dense_mul(&cols, &x, m);
        for i in 0..m {
            assert!((back[i] - b[i]).abs() < 1e-12);
        }
        let mut y = b.to_vec();
        f.btran(&mut y);
        let back = dense_mul_t(&cols, &y);
        for i in 0..m {
            assert!((back[i] - b[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        let cols = [vec![(0, 1.0), (1, 1.0)], vec![(0, 2.0), (1, 2.0)]];
        let refs: Vec<&[(usize, f64)]> = cols.iter().map(|c| c.as_slice()).collect();
        assert!(BasisFactor::factorize(2, &refs).is_err());
    }
}
