//! Shared test corpus and brute-force oracles.
#![allow(dead_code, clippy::needless_range_loop)]

use rfo_core::rng::{NormalStream, StreamTag};
use rfo_core::transcription::{Block, TranscribedProgram};

pub struct Lcg(NormalStream);

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Lcg(NormalStream::new(seed, StreamTag::Field, 9_999))
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.0.next_uniform()
    }

    pub fn int(&mut self, lo: usize, hi: usize) -> usize {
        lo + ((hi - lo + 1) as f64 * self.0.next_uniform()) as usize
    }
}

/// Solve a dense square system by Gaussian elimination with partial
/// pivoting; None when singular.
pub fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

/// Dense rows of a triplet matrix.
pub fn dense_rows(t: &rfo_core::sparse::Triplets) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; t.ncols]; t.nrows];
    for k in 0..t.nnz() {
        m[t.rows[k]][t.cols[k]] += t.vals[k];
    }
    m
}

/// Minimum of a bounded LP by enumerating every basic solution.
pub fn vertex_enumeration(p: &TranscribedProgram) -> Option<f64> {
    let n = p.num_vars();
    let eq = dense_rows(&p.a_eq);
    let mut ineq: Vec<(Vec<f64>, f64)> = dense_rows(&p.a_in).into_iter().zip(p.b_in.iter().copied()).collect();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        if p.ub[j].is_finite() {
            ineq.push((e.clone(), p.ub[j]));
        }
        if p.lb[j].is_finite() {
            e[j] = -1.0;
            ineq.push((e, -p.lb[j]));
        }
    }
    let need = n - eq.len();
    let feasible = |x: &[f64]| {
        let dot = |r: &[f64]| r.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        eq.iter().zip(&p.b_eq).all(|(r, b)| (dot(r) - b).abs() <= 1e-8)
            && ineq.iter().all(|(r, b)| dot(r) <= b + 1e-8)
    };
    let mut best: Option<f64> = None;
    let mut pick = Vec::new();
    combos(ineq.len(), need, 0, &mut pick, &mut |idx| {
        let mut a = eq.clone();
        let mut b = p.b_eq.clone();
        for &i in idx {
            a.push(ineq[i].0.clone());
            b.push(ineq[i].1);
        }
        if let Some(x) = dense_solve(a, b) {
            if feasible(&x) {
                let v = p.objective(&x);
                best = Some(best.map_or(v, |b: f64| b.min(v)));
            }
        }
    });
    best
}

fn combos(n: usize, k: usize, start: usize, pick: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if pick.len() == k {
        f(pick);
        return;
    }
    for i in start..n {
        pick.push(i);
        combos(n, k, i + 1, pick, f);
        pick.pop();
    }
}

/// Bounded, feasible LPs with at most 6 variables and 8 general rows.
pub fn lp_corpus() -> Vec<TranscribedProgram> {
    let mut rng = Lcg::new(2024);
    (0..60)
        .map(|case| {
            let n = rng.int(2, 6);
            let mut p = TranscribedProgram::new();
            p.add_block("x", &[n], -2.0, 3.0).unwrap();
            if case % 4 == 0 {
                // one variable with only a lower bound
                p.set_bounds(0, -1.0, f64::INFINITY);
                p.add_le(&(0..n).map(|j| (j, 1.0)).collect::<Vec<_>>(), 4.0);
            }
            let x0: Vec<f64> = (0..n).map(|_| rng.uniform(-0.5, 0.5)).collect();
            let rows = rng.int(1, 6);
            for _ in 0..rows {
                let r: Vec<(usize, f64)> = (0..n).map(|j| (j, rng.uniform(-1.0, 1.0))).collect();
                let ax: f64 = r.iter().map(|&(j, v)| v * x0[j]).sum();
                p.add_le(&r, ax + rng.uniform(0.1, 1.0));
            }
            if case % 3 == 0 {
                let r: Vec<(usize, f64)> = (0..n).map(|j| (j, rng.uniform(-1.0, 1.0))).collect();
                let ax: f64 = r.iter().map(|&(j, v)| v * x0[j]).sum();
                p.add_eq(&r, ax);
            }
            for j in 0..n {
                p.c[j] = rng.uniform(-1.0, 1.0);
            }
            p
        })
        .collect()
}

/// Strictly convex QPs: diagonal-dominant Q plus random rows.
pub fn strictly_convex_qp(seed: u64) -> TranscribedProgram {
    let mut rng = Lcg::new(seed);
    let n = rng.int(2, 6);
    let mut p = TranscribedProgram::new();
    p.add_block("x", &[n], -1.0, 2.0).unwrap();
    for i in 0..n {
        p.add_quadratic(i, i, rng.uniform(1.0, 3.0) + n as f64 * 0.5);
        for j in 0..i {
            p.add_quadratic(i, j, rng.uniform(-0.5, 0.5));
        }
        p.c[i] = rng.uniform(-3.0, 3.0);
    }
    for _ in 0..rng.int(1, 4) {
        let r: Vec<(usize, f64)> = (0..n).map(|j| (j, rng.uniform(-1.0, 1.0))).collect();
        p.add_le(&r, rng.uniform(0.1, 1.0));
    }
    p
}

/// A small two-stage excursion instance: shared x ∈ [0,1]^d, sample
/// responses y_ik = a_ik·x + b_ik, reward −ρᵀx, penalty on excursions.
pub struct BigMInstance {
    pub program: TranscribedProgram,
    pub y: Block,
    pub threshold: f64,
    pub big_m: f64,
}

pub fn bigm_corpus() -> Vec<BigMInstance> {
    let mut rng = Lcg::new(77);
    (0..40)
        .map(|_| {
            let k = rng.int(1, 8);
            let npts = rng.int(2, 5);
            let d = rng.int(1, 2);
            let u = 1.0;
            let mut p = TranscribedProgram::new();
            let x = p.add_block("x", &[d], 0.0, 1.0).unwrap();
            let y = p.add_block("y", &[npts, k], f64::NEG_INFINITY, f64::INFINITY).unwrap();
            let mut ymax = f64::NEG_INFINITY;
            for s in 0..k {
                for i in 0..npts {
                    let a: Vec<f64> = (0..d).map(|_| rng.uniform(0.0, 2.0)).collect();
                    let b = rng.uniform(-0.5, 1.2);
                    ymax = ymax.max(b + a.iter().sum::<f64>());
                    let mut row = vec![(y.at(&[i, s]), 1.0)];
                    row.extend((0..d).map(|j| (x.at(&[j]), -a[j])));
                    p.add_eq(&row, b);
                }
            }
            for j in 0..d {
                p.c[x.at(&[j])] = -rng.uniform(0.05, 1.5);
            }
            let big_m = (ymax - u).max(0.0) + 1.0;
            BigMInstance { program: p, y, threshold: u, big_m }
        })
        .collect()
}

/// Connected components of `cells` on a rows×cols grid with the given
/// neighbour offsets.
fn components(cells: &[bool], rows: usize, cols: usize, nbrs: &[(i64, i64)]) -> usize {
    let mut seen = vec![false; cells.len()];
    let mut count = 0;
    for start in 0..cells.len() {
        if !cells[start] || seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(c) = stack.pop() {
            let (r, q) = ((c / cols) as i64, (c % cols) as i64);
            for &(dr, dq) in nbrs {
                let (nr, nq) = (r + dr, q + dq);
                if nr < 0 || nq < 0 || nr >= rows as i64 || nq >= cols as i64 {
                    continue;
                }
                let n = nr as usize * cols + nq as usize;
                if cells[n] && !seen[n] {
                    seen[n] = true;
                    stack.push(n);
                }
            }
        }
    }
    count
}

const FOUR: [(i64, i64); 4] = [(0, 1), (1, 0), (0, -1), (-1, 0)];
const EIGHT: [(i64, i64); 8] = [(0, 1), (1, 0), (0, -1), (-1, 0), (1, 1), (1, -1), (-1, 1), (-1, -1)];

/// 4-connected foreground components minus holes, where holes are the
/// bounded 8-connected background components.
pub fn flood_fill_ec(active: &[bool], rows: usize, cols: usize) -> i64 {
    let fg = components(active, rows, cols, &FOUR) as i64;
    let (pr, pc) = (rows + 2, cols + 2);
    let mut bg = vec![true; pr * pc];
    for r in 0..rows {
        for c in 0..cols {
            bg[(r + 1) * pc + c + 1] = !active[r * cols + c];
        }
    }
    let holes = components(&bg, pr, pc, &EIGHT) as i64 - 1;
    fg - holes
}
