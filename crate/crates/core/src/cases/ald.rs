//! Atomic layer deposition in a pore: precursor y_p diffuses in and reacts
//! with free surface sites y_θ at a spatially random sticking rate ξ(x).
//!
//! Each time step is fully implicit. The site equation is pointwise, so θ
//! is eliminated exactly, θ = θ_prev / (1 + dt·η·ξ·p), leaving a
//! tridiagonal Newton system in p alone.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grf::{sample_field, FieldEnsemble};
use crate::grid::GridDomain;
use crate::kernels::{Kernel, MeanSpec};
use crate::par;
use crate::solver::golden_section;
use crate::transcription::quadrature_weights;

const MAX_HALVINGS: u32 = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AldConfig {
    /// D in μm²/s.
    pub diffusivity: f64,
    /// γ in 1/s.
    pub gamma: f64,
    /// η in μm³/s.
    pub eta: f64,
    pub t_end: f64,
    pub length: f64,
    pub time_points: usize,
    pub space_points: usize,
    pub samples: usize,
    pub field_mean: f64,
    /// Field standard deviation.
    pub field_sigma: f64,
    /// ℓ in exp(−r²/ℓ).
    pub field_scale: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub zp_lo: f64,
    pub zp_hi: f64,
    pub zp_tol: f64,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub seed: u64,
}

impl Default for AldConfig {
    fn default() -> Self {
        AldConfig {
            diffusivity: 2.81e6,
            gamma: 6.912e8,
            eta: 1.538e7,
            t_end: 10.0,
            length: 500.0,
            time_points: 10,
            space_points: 100,
            samples: 10,
            field_mean: 2e-4,
            field_sigma: 3e-4,
            field_scale: 1.8e5,
            rho1: 500.0,
            rho2: 0.15,
            zp_lo: 0.0,
            zp_hi: 0.1,
            zp_tol: 1e-6,
            newton_tol: 1e-10,
            newton_max_iter: 50,
            seed: 0,
        }
    }
}

impl AldConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("diffusivity", self.diffusivity),
            ("gamma", self.gamma),
            ("eta", self.eta),
            ("t_end", self.t_end),
            ("length", self.length),
            ("field_scale", self.field_scale),
            ("rho1", self.rho1),
            ("rho2", self.rho2),
            ("zp_tol", self.zp_tol),
            ("newton_tol", self.newton_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(format!("{name} must be > 0, got {v}")));
            }
        }
        if self.time_points < 2 || self.space_points < 3 {
            return Err(Error::param("need >= 2 time points and >= 3 space points"));
        }
        if self.samples == 0 || self.newton_max_iter == 0 {
            return Err(Error::param("samples and newton_max_iter must be >= 1"));
        }
        if !(self.field_sigma >= 0.0 && self.field_mean >= 0.0) {
            return Err(Error::param("field mean and sigma must be >= 0"));
        }
        if !(0.0 <= self.zp_lo && self.zp_lo < self.zp_hi) {
            return Err(Error::param(format!("z_p interval [{}, {}] invalid", self.zp_lo, self.zp_hi)));
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        linspace(0.0, self.t_end, self.time_points)
    }

    pub fn positions(&self) -> Vec<f64> {
        linspace(0.0, self.length, self.space_points)
    }

    /// ȳ_θ(x) = 1 − 1/(1 + exp(ρ₂(x − ρ₁/2))).
    pub fn setpoint(&self, x: f64) -> f64 {
        1.0 - 1.0 / (1.0 + (self.rho2 * (x - 0.5 * self.rho1)).exp())
    }

    /// ξ samples clamped to [0, 1]; `deterministic` gives one sample at the mean.
    pub fn field(&self, deterministic: bool) -> Result<FieldEnsemble> {
        self.validate()?;
        let grid = GridDomain::uniform(&[(0.0, self.length, self.space_points)])?;
        if deterministic || self.field_sigma == 0.0 {
            let k = if deterministic { 1 } else { self.samples };
            let mu = vec![self.field_mean.clamp(0.0, 1.0); self.space_points];
            return FieldEnsemble::new(grid, vec![mu; k], self.seed, "mean");
        }
        // unit variance then scaled, so the Cholesky sees an O(1) matrix
        let beta = (0.5 * self.field_scale).sqrt();
        let unit = sample_field(&Kernel::squared_exponential(1.0, beta), &MeanSpec::constant(0.0), &grid, self.samples, self.seed)?;
        let (m, s) = (self.field_mean, self.field_sigma);
        unit.map_values(|v| (m + s * v).clamp(0.0, 1.0))
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect()
}

/// Trajectories of one sample, row-major (time, position).
#[derive(Debug, Clone, PartialEq)]
pub struct AldTrajectory {
    pub precursor: Vec<f64>,
    pub sites: Vec<f64>,
    /// Time steps that needed sub-stepping.
    pub halved_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AldSimulation {
    pub z_p: f64,
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
    /// 1 − y_θ per sample, row-major (time, position).
    pub coverage: Vec<Vec<f64>>,
    #[serde(skip)]
    pub trajectories: Vec<AldTrajectory>,
}

impl AldSimulation {
    pub fn final_coverage(&self, k: usize) -> &[f64] {
        let n = self.positions.len();
        let c = &self.coverage[k];
        &c[c.len() - n..]
    }
}

struct Stepper<'a> {
    cfg: &'a AldConfig,
    xi: &'a [f64],
    inv_h2: f64,
}

impl Stepper<'_> {
    /// D·(Lap p)_i with a ghost node enforcing zero flux at the far end.
    fn lap(&self, p: &[f64], i: usize) -> f64 {
        let n = p.len();
        if i + 1 == n {
            2.0 * (p[n - 2] - p[n - 1]) * self.inv_h2
        } else {
            (p[i - 1] - 2.0 * p[i] + p[i + 1]) * self.inv_h2
        }
    }

    /// One implicit step of size dt; None if Newton does not converge.
    fn step(&self, p_prev: &[f64], th_prev: &[f64], z_p: f64, dt: f64) -> Option<(Vec<f64>, Vec<f64>)> {
        let cfg = self.cfg;
        let n = p_prev.len();
        let d = cfg.diffusivity;
        let c: Vec<f64> = self.xi.iter().map(|x| dt * cfg.eta * x).collect();
        let residual = |p: &[f64]| -> Vec<f64> {
            let mut r = vec![0.0; n];
            r[0] = p[0] - z_p;
            for i in 1..n {
                r[i] = (p[i] - p_prev[i]) / dt - d * self.lap(p, i)
                    + cfg.gamma * self.xi[i] * p[i] * th_prev[i] / (1.0 + c[i] * p[i]);
            }
            r
        };
        let mut p: Vec<f64> = p_prev.iter().map(|v| v.max(0.0)).collect();
        p[0] = z_p;
        let mut r = residual(&p);
        let (mut lo, mut diag, mut up) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        for _ in 0..cfg.newton_max_iter {
            diag[0] = 1.0;
            up[0] = 0.0;
            for i in 1..n {
                let g = 1.0 + c[i] * p[i];
                diag[i] = 1.0 / dt + 2.0 * d * self.inv_h2 + cfg.gamma * self.xi[i] * th_prev[i] / (g * g);
                if i + 1 == n {
                    lo[i] = -2.0 * d * self.inv_h2;
                } else {
                    lo[i] = -d * self.inv_h2;
                    up[i] = -d * self.inv_h2;
                }
            }
            let neg: Vec<f64> = r.iter().map(|v| -v).collect();
            let delta = thomas(&lo, &diag, &up, &neg)?;
            // damp to keep the precursor nonnegative
            let mut a = 1.0;
            while a > 1e-12 && p.iter().zip(&delta).any(|(pi, di)| pi + a * di < 0.0) {
                a *= 0.5;
            }
            let mut step = 0.0f64;
            for (pi, di) in p.iter_mut().zip(&delta) {
                *pi = (*pi + a * di).max(0.0);
                step = step.max((a * di).abs());
            }
            r = residual(&p);
            if !r.iter().all(|v| v.is_finite()) {
                return None;
            }
            if step <= cfg.newton_tol {
                let th = (0..n).map(|i| th_prev[i] / (1.0 + c[i] * p[i])).collect();
                return Some((p, th));
            }
        }
        None
    }

    fn advance(&self, p: &[f64], th: &[f64], z_p: f64, dt: f64, depth: u32, halved: &mut usize) -> Option<(Vec<f64>, Vec<f64>)> {
        if let Some(s) = self.step(p, th, z_p, dt) {
            return Some(s);
        }
        if depth >= MAX_HALVINGS {
            return None;
        }
        *halved += 1;
        let (p1, th1) = self.advance(p, th, z_p, 0.5 * dt, depth + 1, halved)?;
        self.advance(&p1, &th1, z_p, 0.5 * dt, depth + 1, halved)
    }
}

/// Tridiagonal solve; `lo[0]` and `up[n-1]` are ignored.
fn thomas(lo: &[f64], diag: &[f64], up: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut m = diag[0];
    if m == 0.0 {
        return None;
    }
    c[0] = up[0] / m;
    d[0] = rhs[0] / m;
    for i in 1..n {
        m = diag[i] - lo[i] * c[i - 1];
        if m == 0.0 || !m.is_finite() {
            return None;
        }
        c[i] = if i + 1 < n { up[i] / m } else { 0.0 };
        d[i] = (rhs[i] - lo[i] * d[i - 1]) / m;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Some(d)
}

/// Simulate one sample of ξ.
pub fn ald_trajectory(config: &AldConfig, xi: &[f64], z_p: f64) -> Result<AldTrajectory> {
    if !(z_p >= 0.0 && z_p.is_finite()) {
        return Err(Error::param(format!("z_p must be >= 0, got {z_p}")));
    }
    let n = config.space_points;
    if xi.len() != n {
        return Err(Error::input(format!("field has {} points, grid {n}", xi.len())));
    }
    let x = config.positions();
    let h = x[1] - x[0];
    let st = Stepper { cfg: config, xi, inv_h2: 1.0 / (h * h) };
    let t = config.times();
    let mut p = vec![0.0; n];
    let mut th = vec![1.0; n];
    let mut out = AldTrajectory { precursor: p.clone(), sites: th.clone(), halved_steps: 0 };
    for s in 1..t.len() {
        let mut halved = 0;
        let (p1, th1) = st.advance(&p, &th, z_p, t[s] - t[s - 1], 0, &mut halved).ok_or_else(|| {
            Error::Simulation(format!(
                "Newton failed on step {s} (t = {}) after {MAX_HALVINGS} halvings, z_p = {z_p}",
                t[s]
            ))
        })?;
        if halved > 0 {
            out.halved_steps += 1;
        }
        if th1.iter().any(|v| !(0.0..=1.0).contains(v)) || p1.iter().any(|v| *v < 0.0) {
            return Err(Error::Invariant(format!("state left its physical range on step {s}")));
        }
        out.precursor.extend_from_slice(&p1);
        out.sites.extend_from_slice(&th1);
        p = p1;
        th = th1;
    }
    Ok(out)
}

/// Coverage ensemble 1 − y_θ(t, x, ξ_k).
pub fn ald_simulate_on(config: &AldConfig, field: &FieldEnsemble, z_p: f64) -> Result<AldSimulation> {
    config.validate()?;
    let runs = par::map_indexed(field.len(), |k| ald_trajectory(config, field.sample(k), z_p));
    let trajectories = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let coverage = trajectories.iter().map(|tr| tr.sites.iter().map(|s| 1.0 - s).collect()).collect();
    Ok(AldSimulation { z_p, times: config.times(), positions: config.positions(), coverage, trajectories })
}

pub fn ald_simulate(config: &AldConfig, z_p: f64, deterministic: bool) -> Result<AldSimulation> {
    let field = config.field(deterministic)?;
    ald_simulate_on(config, &field, z_p)
}

/// 𝔼[∫(y_θ(T, x) − ȳ_θ(x))² dx] over the ensemble.
pub fn ald_tracking_error(config: &AldConfig, field: &FieldEnsemble, z_p: f64) -> Result<f64> {
    let x = config.positions();
    let w = quadrature_weights(&x)?;
    let target: Vec<f64> = x.iter().map(|&xi| config.setpoint(xi)).collect();
    let n = x.len();
    let errs = par::map_indexed(field.len(), |k| -> Result<f64> {
        let tr = ald_trajectory(config, field.sample(k), z_p)?;
        let last = &tr.sites[tr.sites.len() - n..];
        Ok((0..n).map(|i| w[i] * (last[i] - target[i]).powi(2)).sum())
    });
    let errs = errs.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(errs.iter().sum::<f64>() / errs.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AldOptimum {
    pub z_p: f64,
    pub tracking_error: f64,
    pub deterministic: bool,
    /// Coarse scan (z_p, error) used to spot-check unimodality.
    pub scan: Vec<(f64, f64)>,
}

/// Golden-section search for z_p on [zp_lo, zp_hi].
pub fn ald_optimize_on(config: &AldConfig, field: &FieldEnsemble, deterministic: bool) -> Result<AldOptimum> {
    config.validate()?;
    let (z, err) = golden_section(|z| ald_tracking_error(config, field, z), config.zp_lo, config.zp_hi, config.zp_tol)?;
    let scan = (0..=10)
        .map(|i| {
            let z = config.zp_lo + (config.zp_hi - config.zp_lo) * i as f64 / 10.0;
            ald_tracking_error(config, field, z).map(|e| (z, e))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AldOptimum { z_p: z, tracking_error: err, deterministic, scan })
}

pub fn ald_optimize(config: &AldConfig, deterministic: bool) -> Result<AldOptimum> {
    let field = config.field(deterministic)?;
    ald_optimize_on(config, &field, deterministic)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> AldConfig {
        AldConfig { space_points: 30, samples: 3, ..Default::default() }
    }

    #[test]
    fn no_precursor_no_coverage() {
        let s = ald_simulate(&small(), 0.0, false).unwrap();
        assert!(s.coverage.iter().flatten().all(|&c| c == 0.0));
        assert!(s.trajectories.iter().all(|t| t.precursor.iter().all(|&p| p == 0.0)));
    }

    #[test]
    fn zero_field_decouples() {
        let c = small();
        let xi = vec![0.0; c.space_points];
        let tr = ald_trajectory(&c, &xi, 0.05).unwrap();
        assert!(tr.sites.iter().all(|&s| s == 1.0));
        // pure diffusion: check the implicit heat step against a dense solve
        let n = c.space_points;
        let x = c.positions();
        let h = x[1] - x[0];
        let dt = c.times()[1];
        let k = c.diffusivity * dt / (h * h);
        let mut a = vec![vec![0.0; n]; n];
        a[0][0] = 1.0;
        for i in 1..n {
            a[i][i] = 1.0 + 2.0 * k;
            if i + 1 == n {
                a[i][i - 1] = -2.0 * k;
            } else {
                a[i][i - 1] = -k;
                a[i][i + 1] = -k;
            }
        }
        let mut b = vec![0.0; n];
        b[0] = 0.05;
        // Gaussian elimination without pivoting (diagonally dominant)
        for col in 0..n {
            for row in col + 1..n {
                let f = a[row][col] / a[col][col];
                if f != 0.0 {
                    for j in col..n {
                        a[row][j] -= f * a[col][j];
                    }
                    b[row] -= f * b[col];
                }
            }
        }
        let mut y = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| a[i][j] * y[j]).sum();
            y[i] = (b[i] - s) / a[i][i];
        }
        for i in 0..n {
            assert!((tr.precursor[n + i] - y[i]).abs() < 1e-10, "{i}");
        }
    }

    #[test]
    fn coverage_monotone_in_time_and_bounded() {
        let c = small();
        let s = ald_simulate(&c, 0.07, false).unwrap();
        let n = c.space_points;
        for cov in &s.coverage {
            assert!(cov.iter().all(|&v| (0.0..=1.0).contains(&v)));
            for t in 1..c.time_points {
                for i in 0..n {
                    assert!(cov[t * n + i] >= cov[(t - 1) * n + i] - 1e-15);
                }
            }
        }
    }

    #[test]
    fn setpoint_midpoint() {
        let c = AldConfig::default();
        assert!((c.setpoint(250.0) - 0.5).abs() < 1e-15);
        assert!(c.setpoint(0.0) < 1e-15);
    }

    #[test]
    fn thomas_matches_known_system() {
        let x = thomas(&[0.0, 1.0, 1.0], &[2.0, 3.0, 2.0], &[1.0, 1.0, 0.0], &[3.0, 5.0, 3.0]).unwrap();
        for v in x {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }
}
