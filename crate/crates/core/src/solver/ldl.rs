//! Sparse LDLᵀ for quasidefinite matrices (up-looking, QDLDL layout) with an
//! approximate-minimum-degree ordering and sign-aware dynamic regularization.

use crate::error::{Error, Result};
use crate::sparse::CscMatrix;

const NONE: usize = usize::MAX;

/// Symbolic analysis of an upper-triangular CSC pattern plus storage for
/// the numeric factor. The pattern is fixed; values change per factorization.
#[derive(Debug, Clone)]
pub struct LdlFactor {
    n: usize,
    /// perm[new] = old
    perm: Vec<usize>,
    /// Original nonzero index -> permuted nonzero index.
    map: Vec<usize>,
    ap: Vec<usize>,
    ai: Vec<usize>,
    ax: Vec<f64>,
    etree: Vec<usize>,
    lp: Vec<usize>,
    li: Vec<usize>,
    lx: Vec<f64>,
    d: Vec<f64>,
    dinv: Vec<f64>,
    /// +1 where the pivot should be positive, −1 where negative (permuted).
    signs: Vec<f64>,
    pub dyn_eps: f64,
    pub dyn_delta: f64,
    /// Pivots replaced by dynamic regularization in the last factorization.
    pub regularized: usize,
}

impl LdlFactor {
    /// `upper` must hold the upper triangle (including every diagonal entry)
    /// of a symmetric matrix; `signs` gives the expected pivot signs.
    pub fn analyze(upper: &CscMatrix, signs: &[f64]) -> Result<Self> {
        let n = upper.ncols;
        if upper.nrows != n || signs.len() != n {
            return Err(Error::input("ldl: matrix must be square and signs must match"));
        }
        for j in 0..n {
            if upper.col(j).any(|(i, _)| i > j) {
                return Err(Error::input("ldl: matrix must be upper triangular"));
            }
        }
        let perm = if n == 0 {
            Vec::new()
        } else {
            let (p, _, _) = amd::order(n, &upper.colptr, &upper.rowind, &amd::Control::default())
                .map_err(|s| Error::Solver(format!("amd ordering failed: {s:?}")))?;
            p
        };
        let mut pinv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            pinv[old] = new;
        }

        // permuted upper triangle
        let mut counts = vec![0usize; n + 1];
        for j in 0..n {
            for (i, _) in upper.col(j) {
                let (a, b) = (pinv[i], pinv[j]);
                counts[a.max(b) + 1] += 1;
            }
        }
        for j in 0..n {
            counts[j + 1] += counts[j];
        }
        let ap = counts.clone();
        let mut next = counts;
        let nnz = upper.nnz();
        let mut ai = vec![0; nnz];
        let mut map = vec![0; nnz];
        for j in 0..n {
            for p in upper.colptr[j]..upper.colptr[j + 1] {
                let (a, b) = (pinv[upper.rowind[p]], pinv[j]);
                let col = a.max(b);
                let dst = next[col];
                next[col] += 1;
                ai[dst] = a.min(b);
                map[p] = dst;
            }
        }

        // elimination tree and column counts
        let mut etree = vec![NONE; n];
        let mut lnz = vec![0usize; n];
        let mut work = vec![NONE; n];
        for j in 0..n {
            work[j] = j;
            for p in ap[j]..ap[j + 1] {
                let mut i = ai[p];
                while work[i] != j {
                    if etree[i] == NONE {
                        etree[i] = j;
                    }
                    lnz[i] += 1;
                    work[i] = j;
                    i = etree[i];
                    if i == NONE {
                        break;
                    }
                }
            }
        }
        let mut lp = vec![0; n + 1];
        for i in 0..n {
            lp[i + 1] = lp[i] + lnz[i];
        }
        let total = lp[n];
        let psigns = perm.iter().map(|&o| signs[o]).collect();
        Ok(LdlFactor {
            n,
            perm,
            map,
            ap,
            ai,
            ax: vec![0.0; nnz],
            etree,
            lp,
            li: vec![0; total],
            lx: vec![0.0; total],
            d: vec![0.0; n],
            dinv: vec![0.0; n],
            signs: psigns,
            dyn_eps: 1e-13,
            dyn_delta: 1e-7,
            regularized: 0,
        })
    }

    pub fn nnz_l(&self) -> usize {
        self.lp[self.n]
    }

    /// Numeric factorization for values given in the original CSC order.
    pub fn factor(&mut self, vals: &[f64]) -> Result<()> {
        let n = self.n;
        if vals.len() != self.map.len() {
            return Err(Error::input("ldl: value array does not match the analyzed pattern"));
        }
        for (p, &v) in vals.iter().enumerate() {
            self.ax[self.map[p]] = v;
        }
        // duplicates cannot occur (CSC input is compressed)
        let mut y_vals = vec![0.0; n];
        let mut y_used = vec![false; n];
        let mut y_idx = Vec::with_capacity(n);
        let mut elim = Vec::with_capacity(n);
        let mut next_space: Vec<usize> = self.lp[..n].to_vec();
        self.regularized = 0;
        let eps = self.dyn_eps;

        for k in 0..n {
            y_idx.clear();
            let mut dk = 0.0;
            for p in self.ap[k]..self.ap[k + 1] {
                let b = self.ai[p];
                if b == k {
                    dk += self.ax[p];
                    continue;
                }
                y_vals[b] = self.ax[p];
                if y_used[b] {
                    continue;
                }
                y_used[b] = true;
                elim.clear();
                elim.push(b);
                let mut nx = self.etree[b];
                while nx != NONE && nx < k {
                    if y_used[nx] {
                        break;
                    }
                    y_used[nx] = true;
                    elim.push(nx);
                    nx = self.etree[nx];
                }
                while let Some(e) = elim.pop() {
                    y_idx.push(e);
                }
            }
            for &c in y_idx.iter().rev() {
                let yc = y_vals[c];
                let end = next_space[c];
                for j in self.lp[c]..end {
                    y_vals[self.li[j]] -= self.lx[j] * yc;
                }
                self.li[end] = k;
                let l = yc * self.dinv[c];
                self.lx[end] = l;
                dk -= yc * l;
                next_space[c] += 1;
                y_vals[c] = 0.0;
                y_used[c] = false;
            }
            if !dk.is_finite() {
                return Err(Error::Solver(format!("ldl: non-finite pivot at {k}")));
            }
            if dk * self.signs[k] <= eps {
                dk = self.signs[k] * self.dyn_delta;
                self.regularized += 1;
            }
            self.d[k] = dk;
            self.dinv[k] = 1.0 / dk;
        }
        Ok(())
    }

    /// Solve (L D Lᵀ) x = b in the original ordering.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&o| b[o]).collect();
        for i in 0..n {
            let xi = x[i];
            if xi != 0.0 {
                for j in self.lp[i]..self.lp[i + 1] {
                    x[self.li[j]] -= self.lx[j] * xi;
                }
            }
        }
        for i in 0..n {
            x[i] *= self.dinv[i];
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in self.lp[i]..self.lp[i + 1] {
                s -= self.lx[j] * x[self.li[j]];
            }
            x[i] = s;
        }
        let mut out = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            out[old] = x[new];
        }
        out
    }
}

/// y = K·x for a symmetric matrix stored as its upper triangle.
pub fn sym_upper_matvec(upper: &CscMatrix, vals: &[f64], x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; upper.nrows];
    for j in 0..upper.ncols {
        for p in upper.colptr[j]..upper.colptr[j + 1] {
            let i = upper.rowind[p];
            let v = vals[p];
            y[i] += v * x[j];
            if i != j {
                y[j] += v * x[i];
            }
        }
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::Triplets;

    fn upper_of(dense: &[Vec<f64>]) -> CscMatrix {
        let n = dense.len();
        let mut t = Triplets::new(n, n);
        for j in 0..n {
            for i in 0..=j {
                if dense[i][j] != 0.0 || i == j {
                    t.push(i, j, dense[i][j]);
                }
            }
        }
        t.to_csc()
    }

    #[test]
    fn solves_quasidefinite_system() {
        // [[4 1 0 1],[1 3 1 0],[0 1 -2 0],[1 0 0 -1]]
        let k = vec![
            vec![4.0, 1.0, 0.0, 1.0],
            vec![1.0, 3.0, 1.0, 0.0],
            vec![0.0, 1.0, -2.0, 0.0],
            vec![1.0, 0.0, 0.0, -1.0],
        ];
        let up = upper_of(&k);
        let mut f = LdlFactor::analyze(&up, &[1.0, 1.0, -1.0, -1.0]).unwrap();
        f.factor(&up.vals).unwrap();
        assert_eq!(f.regularized, 0);
        let b = [1.0, -2.0, 0.5, 3.0];
        let x = f.solve(&b);
        let r = sym_upper_matvec(&up, &up.vals, &x);
        for (ri, bi) in r.iter().zip(&b) {
            assert!((ri - bi).abs() < 1e-12);
        }
    }

    #[test]
    fn banded_spd_random_rhs() {
        let n = 40;
        let mut t = Triplets::new(n, n);
        for j in 0..n {
            t.push(j, j, 4.0);
            if j >= 1 {
                t.push(j - 1, j, -1.0);
            }
            if j >= 7 {
                t.push(j - 7, j, -0.5);
            }
        }
        let up = t.to_csc();
        let mut f = LdlFactor::analyze(&up, &vec![1.0; n]).unwrap();
        f.factor(&up.vals).unwrap();
        let b: Vec<f64> = (0..n).map(|i| ((i * 37) % 11) as f64 - 5.0).collect();
        let x = f.solve(&b);
        let r = sym_upper_matvec(&up, &up.vals, &x);
        let err = r.iter().zip(&b).map(|(a, c)| (a - c).abs()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn zero_pivot_is_regularized() {
        let up = upper_of(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let mut f = LdlFactor::analyze(&up, &[1.0, -1.0]).unwrap();
        f.factor(&up.vals).unwrap();
        assert!(f.regularized >= 1);
    }
}
