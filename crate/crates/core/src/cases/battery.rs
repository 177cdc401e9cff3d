//! Grid-connected battery sizing under random electricity prices.
//!
//! Per sample k and time t_i the decision is grid power y_g, battery state
//! y_b, and one shared capacity z_b. Backward Euler on the balance
//! dy_b/dt = y_g − z_d, trapezoid weights on the purchase cost.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grf::{sample_field, FieldEnsemble};
use crate::grid::GridDomain;
use crate::kernels::{Kernel, MeanSpec};
use crate::par;
use crate::solver::{solve_qp, SolveStatus};
use crate::transcription::{quadrature_weights, Block, TranscribedProgram};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BatteryConfig {
    pub horizon: f64,
    pub points: usize,
    pub samples: usize,
    /// Price standard deviation; the kernel variance is its square.
    /// Zero disables sampling and every sample equals the mean.
    pub sigma: f64,
    pub beta: f64,
    pub mean_amplitude: f64,
    pub mean_period: f64,
    pub mean_offset: f64,
    pub demand: f64,
    pub capacity_cost: f64,
    pub capacity_lb: f64,
    pub capacity_ub: f64,
    /// State bounds as fractions of z_b.
    pub state_lo: f64,
    pub state_hi: f64,
    /// y_b(0) = y_b(T) = boundary · z_b.
    pub boundary: f64,
    /// Optional cap on grid power; `None` leaves it unbounded.
    pub grid_ub: Option<f64>,
    pub seed: u64,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        BatteryConfig {
            horizon: 24.0,
            points: 49,
            samples: 100,
            sigma: 0.6,
            beta: 1.5,
            mean_amplitude: 1.0,
            mean_period: 24.0,
            mean_offset: 3.0,
            demand: 1.0,
            capacity_cost: 0.3,
            capacity_lb: 0.0,
            capacity_ub: 100.0,
            state_lo: 0.2,
            state_hi: 1.0,
            boundary: 0.5,
            grid_ub: None,
            seed: 0,
        }
    }
}

impl BatteryConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("horizon", self.horizon),
            ("beta", self.beta),
            ("mean_period", self.mean_period),
            ("demand", self.demand),
            ("capacity_cost", self.capacity_cost),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::param(format!("sigma must be >= 0, got {}", self.sigma)));
        }
        if self.points < 2 {
            return Err(Error::param(format!("points must be >= 2, got {}", self.points)));
        }
        if self.samples == 0 {
            return Err(Error::param("samples must be >= 1"));
        }
        if !(0.0 <= self.capacity_lb && self.capacity_lb <= self.capacity_ub && self.capacity_ub.is_finite()) {
            return Err(Error::param(format!(
                "capacity bounds [{}, {}] invalid",
                self.capacity_lb, self.capacity_ub
            )));
        }
        if !(0.0 <= self.state_lo && self.state_lo <= self.boundary && self.boundary <= self.state_hi) {
            return Err(Error::param("need 0 <= state_lo <= boundary <= state_hi"));
        }
        if let Some(g) = self.grid_ub {
            if !(g >= 0.0) {
                return Err(Error::param(format!("grid_ub must be >= 0, got {g}")));
            }
        }
        Ok(())
    }

    pub fn time_grid(&self) -> Result<GridDomain> {
        GridDomain::uniform(&[(0.0, self.horizon, self.points)])
    }

    pub fn mean(&self) -> MeanSpec {
        MeanSpec::sinusoid(self.mean_amplitude, self.mean_period, self.mean_offset)
    }

    /// Price ensemble; `deterministic` gives one sample equal to μ(t).
    pub fn prices(&self, deterministic: bool) -> Result<FieldEnsemble> {
        self.validate()?;
        let grid = self.time_grid()?;
        let mu = self.mean().vector(&grid)?;
        if deterministic || self.sigma == 0.0 {
            let k = if deterministic { 1 } else { self.samples };
            return FieldEnsemble::new(grid, vec![mu; k], self.seed, "mean");
        }
        let kernel = Kernel::squared_exponential(self.sigma * self.sigma, self.beta);
        sample_field(&kernel, &self.mean(), &grid, self.samples, self.seed)
    }
}

/// Optimal design and per-sample operation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatteryResult {
    pub z_b: f64,
    pub expected_cost: f64,
    pub status: SolveStatus,
    pub iterations: usize,
    pub times: Vec<f64>,
    /// Purchase cost Σ β_i ξ_k(t_i) y_g,k(t_i) per sample.
    pub sample_costs: Vec<f64>,
    #[serde(skip)]
    pub y_g: Vec<Vec<f64>>,
    #[serde(skip)]
    pub y_b: Vec<Vec<f64>>,
}

struct Built {
    program: TranscribedProgram,
    y_g: Block,
    y_b: Block,
    z_b: usize,
}

fn build(config: &BatteryConfig, prices: &FieldEnsemble, z_fixed: Option<f64>) -> Result<Built> {
    let n = config.points;
    let k = prices.len();
    if prices.points() != n {
        return Err(Error::input(format!("price ensemble has {} points, config {n}", prices.points())));
    }
    let grid = config.time_grid()?;
    let t = grid.axis(0).coords();
    let w = quadrature_weights(t)?;
    let mut p = TranscribedProgram::new();
    let y_g = p.add_block("y_g", &[k, n], 0.0, config.grid_ub.unwrap_or(f64::INFINITY))?;
    let y_b = p.add_block("y_b", &[k, n], 0.0, f64::INFINITY)?;
    let zb = p.add_block("z_b", &[1], config.capacity_lb, config.capacity_ub)?.offset;
    if let Some(z) = z_fixed {
        if !(config.capacity_lb <= z && z <= config.capacity_ub) {
            return Err(Error::Input(format!(
                "z_b = {z} infeasible: outside [{}, {}]",
                config.capacity_lb, config.capacity_ub
            )));
        }
        p.set_bounds(zb, z, z);
    }
    p.add_linear(zb, config.capacity_cost);
    let inv_k = 1.0 / k as f64;
    for s in 0..k {
        // y_g(t_0) does not enter the backward-Euler balance
        let g0 = y_g.at(&[s, 0]);
        p.set_bounds(g0, 0.0, 0.0);
        for i in 0..n {
            p.add_linear(y_g.at(&[s, i]), inv_k * w[i] * prices.value(s, i));
        }
        for i in 1..n {
            let dt = t[i] - t[i - 1];
            p.add_eq(
                &[(y_b.at(&[s, i]), 1.0 / dt), (y_b.at(&[s, i - 1]), -1.0 / dt), (y_g.at(&[s, i]), -1.0)],
                -config.demand,
            );
        }
        p.add_eq(&[(y_b.at(&[s, 0]), 1.0), (zb, -config.boundary)], 0.0);
        p.add_eq(&[(y_b.at(&[s, n - 1]), 1.0), (zb, -config.boundary)], 0.0);
        for i in 0..n {
            let b = y_b.at(&[s, i]);
            p.add_le(&[(b, 1.0), (zb, -config.state_hi)], 0.0);
            p.add_le(&[(b, -1.0), (zb, config.state_lo)], 0.0);
        }
    }
    Ok(Built { program: p, y_g, y_b, z_b: zb })
}

fn purchase_costs(config: &BatteryConfig, prices: &FieldEnsemble, y_g: &[Vec<f64>]) -> Result<Vec<f64>> {
    let grid = config.time_grid()?;
    let w = quadrature_weights(grid.axis(0).coords())?;
    Ok((0..prices.len())
        .map(|s| {
            let g = if y_g.len() == 1 { &y_g[0] } else { &y_g[s] };
            (0..w.len()).map(|i| w[i] * prices.value(s, i) * g[i]).sum()
        })
        .collect())
}

fn solve_built(config: &BatteryConfig, prices: &FieldEnsemble, built: Built) -> Result<BatteryResult> {
    let r = solve_qp(&built.program)?;
    if !r.is_optimal() {
        return Err(Error::Solver(format!("battery LP ended with status {:?}", r.status)));
    }
    let k = prices.len();
    let n = config.points;
    let rows = |b: &Block| -> Vec<Vec<f64>> { (0..k).map(|s| (0..n).map(|i| r.x[b.at(&[s, i])]).collect()).collect() };
    let y_g = rows(&built.y_g);
    let y_b = rows(&built.y_b);
    let z_b = r.x[built.z_b];
    let sample_costs = purchase_costs(config, prices, &y_g)?;
    Ok(BatteryResult {
        z_b,
        expected_cost: r.objective,
        status: r.status,
        iterations: r.iterations,
        times: config.time_grid()?.axis(0).coords().to_vec(),
        sample_costs,
        y_g,
        y_b,
    })
}

/// Solve the sample-average battery LP on a given price ensemble.
pub fn battery_solve_on(config: &BatteryConfig, prices: &FieldEnsemble) -> Result<BatteryResult> {
    config.validate()?;
    let built = build(config, prices, None)?;
    solve_built(config, prices, built)
}

/// Sample prices from the config and solve; `deterministic` replaces the
/// ensemble with the mean price curve.
pub fn battery_solve(config: &BatteryConfig, deterministic: bool) -> Result<(BatteryResult, FieldEnsemble)> {
    let prices = config.prices(deterministic)?;
    let r = battery_solve_on(config, &prices)?;
    Ok((r, prices))
}

/// How the grid power is chosen when a fixed design is evaluated.
#[derive(Debug, Clone, PartialEq)]
pub enum BatteryPolicy {
    /// Re-optimize y_g for each sample with z_b fixed.
    Recourse,
    /// Apply one y_g trajectory to every sample.
    Fixed(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatteryEvaluation {
    pub z_b: f64,
    pub expected_cost: f64,
    pub sample_costs: Vec<f64>,
}

/// Expected total cost of design `z_b` on `prices`.
pub fn battery_evaluate(
    config: &BatteryConfig,
    z_b: f64,
    policy: &BatteryPolicy,
    prices: &FieldEnsemble,
) -> Result<BatteryEvaluation> {
    config.validate()?;
    let capacity = config.capacity_cost * z_b;
    let sample_costs = match policy {
        BatteryPolicy::Recourse => {
            let per = par::map_indexed(prices.len(), |s| -> Result<f64> {
                let one = FieldEnsemble::new(
                    prices.domain().clone(),
                    vec![prices.sample(s).to_vec()],
                    prices.seed(),
                    prices.provenance(),
                )?;
                let built = build(config, &one, Some(z_b))?;
                let r = solve_built(config, &one, built).map_err(|e| match e {
                    Error::Solver(m) => Error::Solver(format!("z_b = {z_b} infeasible for sample {s}: {m}")),
                    other => other,
                })?;
                Ok(r.sample_costs[0])
            });
            per.into_iter().collect::<Result<Vec<_>>>()?
        }
        BatteryPolicy::Fixed(g) => {
            if g.len() != config.points {
                return Err(Error::input(format!("policy has {} points, config {}", g.len(), config.points)));
            }
            check_fixed_policy(config, z_b, g)?;
            purchase_costs(config, prices, std::slice::from_ref(g))?
        }
    };
    let expected = sample_costs.iter().sum::<f64>() / sample_costs.len() as f64 + capacity;
    Ok(BatteryEvaluation { z_b, expected_cost: expected, sample_costs })
}

/// The state trajectory under a fixed policy does not depend on prices, so
/// feasibility is checked once.
fn check_fixed_policy(config: &BatteryConfig, z_b: f64, g: &[f64]) -> Result<()> {
    let t = config.time_grid()?.axis(0).coords().to_vec();
    let tol = 1e-6 * (1.0 + z_b);
    let mut y = config.boundary * z_b;
    for i in 1..t.len() {
        y += (t[i] - t[i - 1]) * (g[i] - config.demand);
        if y < config.state_lo * z_b - tol || y > config.state_hi * z_b + tol {
            return Err(Error::Input(format!("policy leaves the state bounds at t = {}", t[i])));
        }
    }
    if (y - config.boundary * z_b).abs() > tol {
        return Err(Error::Input("policy violates the terminal boundary condition".into()));
    }
    Ok(())
}

/// Open-loop illustration: y_g = 0 up to `switch_time`, then `level`,
/// integrated from y_b(0) = boundary·z_b without the lower state bound.
pub fn battery_policy_simulation(config: &BatteryConfig, z_b: f64, switch_time: f64, level: f64) -> Result<Vec<(f64, f64)>> {
    config.validate()?;
    let t = config.time_grid()?.axis(0).coords().to_vec();
    let mut y = config.boundary * z_b;
    let mut out = vec![(t[0], y)];
    for i in 1..t.len() {
        let g = if t[i] > switch_time { level } else { 0.0 };
        y = (y + (t[i] - t[i - 1]) * (g - config.demand)).min(config.state_hi * z_b);
        out.push((t[i], y));
    }
    Ok(out)
}
