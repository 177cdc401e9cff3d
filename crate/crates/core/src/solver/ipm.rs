//! Mehrotra predictor-corrector interior-point method for convex QPs.
//!
//! Inequalities get slacks s (A_in x + s = b_in), finite bounds get slacks
//! w_l = x − lb, w_u = ub − x. Bound multipliers are eliminated into a
//! diagonal, leaving the quasidefinite system
//!
//! ```text
//! [ Q + D_b + ρI   A_eqᵀ   A_inᵀ          ] [dx]
//! [ A_eq           −δI     0              ] [dy]
//! [ A_in           0       −S Z⁻¹ − δI    ] [dz]
//! ```
//!
//! factored once per iteration and reused for both the predictor and the
//! corrector solve, with iterative refinement against the unregularized
//! matrix.

use serde::{Deserialize, Serialize};

use super::kkt::{kkt_residuals, Duals, KktResiduals};
use super::ldl::{sym_upper_matvec, LdlFactor};
use crate::error::{Error, Result};
use crate::sparse::{CscMatrix, Triplets};
use crate::transcription::{dot, TranscribedProgram};

const STATIC_REG: f64 = 1e-9;
const MAX_STATIC_REG: f64 = 1e-5;
const STEP_FRACTION: f64 = 0.99;
const DIVERGENCE: f64 = 1e10;
const REFINE_STEPS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    MaxIterations,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Record (x, duals) at every iterate.
    pub keep_trace: bool,
    /// Replace the least-squares primal starting point.
    pub initial_x: Option<Vec<f64>>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-8, max_iter: 200, keep_trace: false, initial_x: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualSummary {
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepSizes {
    pub affine: f64,
    pub combined: f64,
}

/// One line of the iteration log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterLog {
    pub iter: usize,
    pub mu: f64,
    pub residuals: ResidualSummary,
    pub step: StepSizes,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Iterate {
    pub x: Vec<f64>,
    pub duals: Duals,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub x: Vec<f64>,
    pub objective: f64,
    pub status: SolveStatus,
    pub kkt: KktResiduals,
    pub iterations: usize,
    pub duals: Duals,
    pub log: Vec<IterLog>,
    pub trace: Vec<Iterate>,
    /// Scale used for the relative stopping test: 1 + largest |data entry|.
    pub data_scale: f64,
}

impl SolveResult {
    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
}

pub fn solve_qp(program: &TranscribedProgram) -> Result<SolveResult> {
    solve_qp_with(program, &SolverOptions::default())
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Largest α ≤ 1 keeping v + α dv ≥ 0.
fn max_step(v: &[f64], dv: &[f64]) -> f64 {
    v.iter()
        .zip(dv)
        .filter(|(_, &d)| d < 0.0)
        .map(|(&a, &d)| -a / d)
        .fold(1.0, f64::min)
}

struct Problem<'a> {
    p: &'a TranscribedProgram,
    n: usize,
    /// A_eq plus one row per fixed variable.
    a: Triplets,
    b: Vec<f64>,
    fixed: Vec<usize>,
    lidx: Vec<usize>,
    uidx: Vec<usize>,
}

impl<'a> Problem<'a> {
    fn new(p: &'a TranscribedProgram) -> Self {
        let n = p.num_vars();
        let mut a = p.a_eq.clone();
        let mut b = p.b_eq.clone();
        let mut fixed = Vec::new();
        let mut lidx = Vec::new();
        let mut uidx = Vec::new();
        for j in 0..n {
            if p.lb[j] == p.ub[j] {
                fixed.push(j);
                a.push_row(&[(j, 1.0)]);
                b.push(p.lb[j]);
                continue;
            }
            if p.lb[j].is_finite() {
                lidx.push(j);
            }
            if p.ub[j].is_finite() {
                uidx.push(j);
            }
        }
        Problem { p, n, a, b, fixed, lidx, uidx }
    }
}

/// State of the primal-dual iteration.
#[derive(Clone)]
struct State {
    x: Vec<f64>,
    y: Vec<f64>,
    z: Vec<f64>,
    s: Vec<f64>,
    wl: Vec<f64>,
    zl: Vec<f64>,
    wu: Vec<f64>,
    zu: Vec<f64>,
}

struct Residuals {
    rd: Vec<f64>,
    rp: Vec<f64>,
    rg: Vec<f64>,
    rl: Vec<f64>,
    ru: Vec<f64>,
}

struct Direction {
    dx: Vec<f64>,
    dy: Vec<f64>,
    dz: Vec<f64>,
    ds: Vec<f64>,
    dwl: Vec<f64>,
    dzl: Vec<f64>,
    dwu: Vec<f64>,
    dzu: Vec<f64>,
}

/// The augmented matrix: fixed pattern, per-iteration diagonal.
struct Kkt {
    upper: CscMatrix,
    diag_pos: Vec<usize>,
    factor: LdlFactor,
    vals: Vec<f64>,
    vals_true: Vec<f64>,
}

impl Kkt {
    fn new(pr: &Problem) -> Result<Self> {
        let (n, me, mi) = (pr.n, pr.b.len(), pr.p.b_in.len());
        let dim = n + me + mi;
        let mut t = Triplets::new(dim, dim);
        let q = &pr.p.q;
        for k in 0..q.nnz() {
            if q.rows[k] <= q.cols[k] {
                t.push(q.rows[k], q.cols[k], q.vals[k]);
            }
        }
        for k in 0..pr.a.nnz() {
            t.push(pr.a.cols[k], n + pr.a.rows[k], pr.a.vals[k]);
        }
        let g = &pr.p.a_in;
        for k in 0..g.nnz() {
            t.push(g.cols[k], n + me + g.rows[k], g.vals[k]);
        }
        for i in 0..dim {
            t.push(i, i, 0.0);
        }
        let upper = t.to_csc();
        let diag_pos = (0..dim)
            .map(|j| {
                let r = upper.colptr[j]..upper.colptr[j + 1];
                r.start + upper.rowind[r].binary_search(&j).expect("diagonal present")
            })
            .collect();
        let signs: Vec<f64> = (0..dim).map(|i| if i < n { 1.0 } else { -1.0 }).collect();
        let factor = LdlFactor::analyze(&upper, &signs)?;
        let vals = upper.vals.clone();
        Ok(Kkt { vals_true: vals.clone(), vals, upper, diag_pos, factor })
    }

    /// Set the diagonal shifts (added to the base values) and factor.
    fn refactor(&mut self, n: usize, dx: &[f64], dz: &[f64]) -> Result<()> {
        self.vals.copy_from_slice(&self.upper.vals);
        let dim = self.diag_pos.len();
        for i in 0..dim {
            let extra = if i < n {
                dx[i]
            } else if i < dim - dz.len() {
                0.0
            } else {
                -dz[i - (dim - dz.len())]
            };
            self.vals[self.diag_pos[i]] += extra;
        }
        self.vals_true.copy_from_slice(&self.vals);
        // Tiny pivots can cascade into overflow on degenerate LPs; retry with
        // stronger regularization and let refinement absorb the difference.
        let mut reg = STATIC_REG;
        loop {
            for i in 0..dim {
                let shift = if i < n { reg } else { -reg };
                self.vals[self.diag_pos[i]] = self.vals_true[self.diag_pos[i]] + shift;
            }
            match self.factor.factor(&self.vals) {
                Err(Error::Solver(_)) if reg < MAX_STATIC_REG => reg *= 100.0,
                other => return other,
            }
        }
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = self.factor.solve(rhs);
        for _ in 0..REFINE_STEPS {
            let kx = sym_upper_matvec(&self.upper, &self.vals_true, &x);
            let r: Vec<f64> = rhs.iter().zip(&kx).map(|(b, k)| b - k).collect();
            if inf_norm(&r) <= 1e-14 * (1.0 + inf_norm(rhs)) {
                break;
            }
            let d = self.factor.solve(&r);
            for (xi, di) in x.iter_mut().zip(&d) {
                *xi += di;
            }
        }
        x
    }
}

fn residuals(pr: &Problem, st: &State) -> Residuals {
    let p = pr.p;
    let mut rd = p.q.matvec(&st.x);
    let aty = pr.a.matvec_t(&st.y);
    let gtz = p.a_in.matvec_t(&st.z);
    for j in 0..pr.n {
        rd[j] += p.c[j] + aty[j] + gtz[j];
    }
    for (k, &j) in pr.lidx.iter().enumerate() {
        rd[j] -= st.zl[k];
    }
    for (k, &j) in pr.uidx.iter().enumerate() {
        rd[j] += st.zu[k];
    }
    let rp = pr.a.matvec(&st.x).iter().zip(&pr.b).map(|(a, b)| a - b).collect();
    let gx = p.a_in.matvec(&st.x);
    let rg = (0..gx.len()).map(|i| gx[i] + st.s[i] - p.b_in[i]).collect();
    let rl = pr.lidx.iter().enumerate().map(|(k, &j)| st.x[j] - st.wl[k] - p.lb[j]).collect();
    let ru = pr.uidx.iter().enumerate().map(|(k, &j)| st.x[j] + st.wu[k] - p.ub[j]).collect();
    Residuals { rd, rp, rg, rl, ru }
}

fn complementarity(st: &State) -> (f64, usize) {
    let total = dot(&st.s, &st.z) + dot(&st.wl, &st.zl) + dot(&st.wu, &st.zu);
    (total, st.s.len() + st.wl.len() + st.wu.len())
}

/// Newton direction for the given complementarity right-hand sides
/// (r_sz = target of s∘z, etc.).
fn direction(pr: &Problem, kkt: &Kkt, st: &State, r: &Residuals, rsz: &[f64], rsl: &[f64], rsu: &[f64]) -> Direction {
    let (n, me) = (pr.n, pr.b.len());
    let mi = st.s.len();
    let mut rhs = vec![0.0; n + me + mi];
    for j in 0..n {
        rhs[j] = -r.rd[j];
    }
    for (k, &j) in pr.lidx.iter().enumerate() {
        rhs[j] -= (rsl[k] + st.zl[k] * r.rl[k]) / st.wl[k];
    }
    for (k, &j) in pr.uidx.iter().enumerate() {
        rhs[j] += (rsu[k] - st.zu[k] * r.ru[k]) / st.wu[k];
    }
    for i in 0..me {
        rhs[n + i] = -r.rp[i];
    }
    for i in 0..mi {
        rhs[n + me + i] = -r.rg[i] + rsz[i] / st.z[i];
    }
    let sol = kkt.solve(&rhs);
    let dx = sol[..n].to_vec();
    let dy = sol[n..n + me].to_vec();
    let dz = sol[n + me..].to_vec();
    let ds = (0..mi).map(|i| -(rsz[i] + st.s[i] * dz[i]) / st.z[i]).collect();
    let dwl: Vec<f64> = pr.lidx.iter().enumerate().map(|(k, &j)| dx[j] + r.rl[k]).collect();
    let dzl = (0..dwl.len()).map(|k| -(rsl[k] + st.zl[k] * dwl[k]) / st.wl[k]).collect();
    let dwu: Vec<f64> = pr.uidx.iter().enumerate().map(|(k, &j)| -r.ru[k] - dx[j]).collect();
    let dzu = (0..dwu.len()).map(|k| -(rsu[k] + st.zu[k] * dwu[k]) / st.wu[k]).collect();
    Direction { dx, dy, dz, ds, dwl, dzl, dwu, dzu }
}

fn step_length(st: &State, d: &Direction) -> f64 {
    [
        max_step(&st.s, &d.ds),
        max_step(&st.z, &d.dz),
        max_step(&st.wl, &d.dwl),
        max_step(&st.zl, &d.dzl),
        max_step(&st.wu, &d.dwu),
        max_step(&st.zu, &d.dzu),
    ]
    .into_iter()
    .fold(1.0, f64::min)
}

fn axpy(v: &mut [f64], a: f64, d: &[f64]) {
    for (x, dx) in v.iter_mut().zip(d) {
        *x += a * dx;
    }
}

fn export_duals(pr: &Problem, st: &State) -> Duals {
    let n = pr.n;
    let me = pr.p.b_eq.len();
    let mut z_lb = vec![0.0; n];
    let mut z_ub = vec![0.0; n];
    for (k, &j) in pr.lidx.iter().enumerate() {
        z_lb[j] = st.zl[k];
    }
    for (k, &j) in pr.uidx.iter().enumerate() {
        z_ub[j] = st.zu[k];
    }
    for (k, &j) in pr.fixed.iter().enumerate() {
        let yf = st.y[me + k];
        z_ub[j] = yf.max(0.0);
        z_lb[j] = (-yf).max(0.0);
    }
    Duals { y: st.y[..me].to_vec(), z: st.z.clone(), z_lb, z_ub }
}

/// True when the (normalized) multipliers prove primal infeasibility:
/// A_eqᵀy + A_inᵀz − z_l + z_u ≈ 0 with b_eqᵀy + b_inᵀz − lbᵀz_l + ubᵀz_u < 0.
fn farkas_certificate(pr: &Problem, st: &State, dual_max: f64) -> bool {
    if dual_max < 1e6 {
        return false;
    }
    let p = pr.p;
    let mut r = pr.a.matvec_t(&st.y);
    let gtz = p.a_in.matvec_t(&st.z);
    let mut val = dot(&pr.b, &st.y) + dot(&p.b_in, &st.z);
    for j in 0..pr.n {
        r[j] += gtz[j];
    }
    for (k, &j) in pr.lidx.iter().enumerate() {
        r[j] -= st.zl[k];
        val -= p.lb[j] * st.zl[k];
    }
    for (k, &j) in pr.uidx.iter().enumerate() {
        r[j] += st.zu[k];
        val += p.ub[j] * st.zu[k];
    }
    let val = val / dual_max;
    val < -1e-6 && inf_norm(&r) / dual_max <= 1e-6 * val.abs()
}

fn data_scale(p: &TranscribedProgram) -> f64 {
    let finite = |v: &[f64]| v.iter().filter(|x| x.is_finite()).fold(0.0f64, |m, x| m.max(x.abs()));
    let mats = [&p.q, &p.a_eq, &p.a_in].iter().map(|m| inf_norm(&m.vals)).fold(0.0, f64::max);
    1.0 + [inf_norm(&p.c), inf_norm(&p.b_eq), inf_norm(&p.b_in), finite(&p.lb), finite(&p.ub), mats]
        .into_iter()
        .fold(0.0, f64::max)
}

pub fn solve_qp_with(program: &TranscribedProgram, opts: &SolverOptions) -> Result<SolveResult> {
    program.validate()?;
    if !(opts.tol > 0.0) {
        return Err(Error::param(format!("tol must be > 0, got {}", opts.tol)));
    }
    let pr = Problem::new(program);
    let (n, me, mi) = (pr.n, pr.b.len(), program.b_in.len());
    let (nl, nu) = (pr.lidx.len(), pr.uidx.len());
    let scale = data_scale(program);
    let mut kkt = Kkt::new(&pr)?;

    // least-squares start: min ½xᵀ(Q+I)x + cᵀx + ½‖A_in x − b_in‖² s.t. A_eq x = b_eq
    let x0 = match &opts.initial_x {
        Some(x) if x.len() == n => x.clone(),
        Some(x) => return Err(Error::input(format!("initial_x has length {}, expected {n}", x.len()))),
        None => {
            kkt.refactor(n, &vec![1.0; n], &vec![1.0; mi])?;
            let mut rhs = vec![0.0; n + me + mi];
            for j in 0..n {
                rhs[j] = -program.c[j];
            }
            rhs[n..n + me].copy_from_slice(&pr.b);
            rhs[n + me..].copy_from_slice(&program.b_in);
            kkt.solve(&rhs)[..n].to_vec()
        }
    };
    let gx0 = program.a_in.matvec(&x0);
    let mut st = State {
        s: (0..mi).map(|i| (program.b_in[i] - gx0[i]).max(1.0)).collect(),
        z: vec![1.0; mi],
        wl: pr.lidx.iter().map(|&j| (x0[j] - program.lb[j]).max(1.0)).collect(),
        zl: vec![1.0; nl],
        wu: pr.uidx.iter().map(|&j| (program.ub[j] - x0[j]).max(1.0)).collect(),
        zu: vec![1.0; nu],
        y: vec![0.0; me],
        x: x0,
    };

    let bnorm = 1.0 + inf_norm(&pr.b);
    let hnorm = 1.0 + inf_norm(&program.b_in);
    let cnorm = 1.0 + inf_norm(&program.c);
    let mut log = Vec::new();
    let mut trace = Vec::new();
    let mut status = SolveStatus::MaxIterations;
    let mut iterations = 0;

    for iter in 0..=opts.max_iter {
        let r = residuals(&pr, &st);
        let (comp, m) = complementarity(&st);
        let mu = if m > 0 { comp / m as f64 } else { 0.0 };
        let pobj = program.objective(&st.x);
        let pres = (inf_norm(&r.rp) / bnorm)
            .max(inf_norm(&r.rg) / hnorm)
            .max(inf_norm(&r.rl) / scale)
            .max(inf_norm(&r.ru) / scale);
        let dres = inf_norm(&r.rd) / cnorm.max(1.0 + inf_norm(&program.q.matvec(&st.x)));
        let gap = comp / (1.0 + pobj.abs());
        if opts.keep_trace {
            trace.push(Iterate { x: st.x.clone(), duals: export_duals(&pr, &st) });
        }
        iterations = iter;
        if pres <= opts.tol && dres <= opts.tol && gap <= opts.tol {
            status = SolveStatus::Optimal;
            break;
        }
        if st.x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Solver("interior-point iterate became non-finite".into()));
        }
        if inf_norm(&st.x) > DIVERGENCE {
            status = SolveStatus::Unbounded;
            break;
        }
        let dual_max = [inf_norm(&st.y), inf_norm(&st.z), inf_norm(&st.zl), inf_norm(&st.zu)]
            .into_iter()
            .fold(0.0, f64::max);
        if dual_max > DIVERGENCE || farkas_certificate(&pr, &st, dual_max) {
            status = SolveStatus::Infeasible;
            break;
        }
        if iter == opts.max_iter {
            break;
        }

        let mut db = vec![0.0; n];
        for (k, &j) in pr.lidx.iter().enumerate() {
            db[j] += st.zl[k] / st.wl[k];
        }
        for (k, &j) in pr.uidx.iter().enumerate() {
            db[j] += st.zu[k] / st.wu[k];
        }
        let sz: Vec<f64> = (0..mi).map(|i| st.s[i] / st.z[i]).collect();
        kkt.refactor(n, &db, &sz)?;

        // predictor
        let rsz: Vec<f64> = (0..mi).map(|i| st.s[i] * st.z[i]).collect();
        let rsl: Vec<f64> = (0..nl).map(|k| st.wl[k] * st.zl[k]).collect();
        let rsu: Vec<f64> = (0..nu).map(|k| st.wu[k] * st.zu[k]).collect();
        let aff = direction(&pr, &kkt, &st, &r, &rsz, &rsl, &rsu);
        let alpha_aff = step_length(&st, &aff);

        let sigma = if m > 0 {
            let after = |v: &[f64], dv: &[f64], w: &[f64], dw: &[f64]| -> f64 {
                (0..v.len()).map(|i| (v[i] + alpha_aff * dv[i]) * (w[i] + alpha_aff * dw[i])).sum()
            };
            let comp_aff = after(&st.s, &aff.ds, &st.z, &aff.dz)
                + after(&st.wl, &aff.dwl, &st.zl, &aff.dzl)
                + after(&st.wu, &aff.dwu, &st.zu, &aff.dzu);
            (comp_aff / comp).clamp(0.0, 1.0).powi(3)
        } else {
            0.0
        };

        // corrector
        let target = sigma * mu;
        let rsz: Vec<f64> = (0..mi).map(|i| rsz[i] + aff.ds[i] * aff.dz[i] - target).collect();
        let rsl: Vec<f64> = (0..nl).map(|k| rsl[k] + aff.dwl[k] * aff.dzl[k] - target).collect();
        let rsu: Vec<f64> = (0..nu).map(|k| rsu[k] + aff.dwu[k] * aff.dzu[k] - target).collect();
        let d = direction(&pr, &kkt, &st, &r, &rsz, &rsl, &rsu);
        let alpha = (STEP_FRACTION * step_length(&st, &d)).min(1.0);

        axpy(&mut st.x, alpha, &d.dx);
        axpy(&mut st.y, alpha, &d.dy);
        axpy(&mut st.z, alpha, &d.dz);
        axpy(&mut st.s, alpha, &d.ds);
        axpy(&mut st.wl, alpha, &d.dwl);
        axpy(&mut st.zl, alpha, &d.dzl);
        axpy(&mut st.wu, alpha, &d.dwu);
        axpy(&mut st.zu, alpha, &d.dzu);

        log.push(IterLog {
            iter,
            mu,
            residuals: ResidualSummary { primal: pres, dual: dres, gap },
            step: StepSizes { affine: alpha_aff, combined: alpha },
            sigma,
        });
    }

    let duals = export_duals(&pr, &st);
    let kkt_res = kkt_residuals(program, &st.x, &duals)?;
    Ok(SolveResult {
        objective: program.objective(&st.x),
        x: st.x,
        status,
        kkt: kkt_res,
        iterations,
        duals,
        log,
        trace,
        data_scale: scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_above_one() {
        let mut p = TranscribedProgram::new();
        p.add_block("x", &[1], 1.0, f64::INFINITY).unwrap();
        p.add_quadratic(0, 0, 2.0);
        let r = solve_qp(&p).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.x[0] - 1.0).abs() < 1e-7);
        assert!((r.objective - 1.0).abs() < 1e-7);
        assert!((r.duals.z_lb[0] - 2.0).abs() < 1e-6);
    }

    #[test]
    fn simplex_vertex() {
        let mut p = TranscribedProgram::new();
        p.add_block("x", &[3], 0.0, f64::INFINITY).unwrap();
        p.c = vec![3.0, 1.0, 2.0];
        p.add_eq(&[(0, 1.0), (1, 1.0), (2, 1.0)], 1.0);
        let r = solve_qp(&p).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective - 1.0).abs() < 1e-7);
        assert!((r.x[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn equality_only_qp() {
        // min ½(x0² + x1²) s.t. x0 + x1 = 2
        let mut p = TranscribedProgram::new();
        p.add_block("x", &[2], f64::NEG_INFINITY, f64::INFINITY).unwrap();
        p.add_quadratic(0, 0, 1.0);
        p.add_quadratic(1, 1, 1.0);
        p.add_eq(&[(0, 1.0), (1, 1.0)], 2.0);
        let r = solve_qp(&p).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.x[0] - 1.0).abs() < 1e-8 && (r.x[1] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn fixed_variable() {
        let mut p = TranscribedProgram::new();
        p.add_block("x", &[2], 0.0, 5.0).unwrap();
        p.set_bounds(0, 2.0, 2.0);
        p.c = vec![1.0, -1.0];
        let r = solve_qp(&p).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.x[0] - 2.0).abs() < 1e-8);
        assert!((r.x[1] - 5.0).abs() < 1e-6);
        assert!((r.duals.z_lb[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn detects_unbounded() {
        let mut p = TranscribedProgram::new();
        p.add_block("x", &[1], 0.0, f64::INFINITY).unwrap();
        p.c = vec![-1.0];
        let r = solve_qp(&p).unwrap();
        assert_eq!(r.status, SolveStatus::Unbounded);
    }

    #[test]
    fn detects_infeasible() {
        let mut p = TranscribedProgram::new();
        p.add_block("x", &[1], 0.0, 1.0).unwrap();
        p.add_le(&[(0, -1.0)], -2.0);
        let r = solve_qp(&p).unwrap();
        assert!(matches!(r.status, SolveStatus::Infeasible | SolveStatus::MaxIterations), "{:?}", r.status);
        assert_ne!(r.status, SolveStatus::Optimal);
    }
}
