//! Heating a plate with spatially random diffusivity while limiting the
//! probability that its temperature anywhere exceeds a safety threshold.
//!
//! y_c(t, x, ξ_k) per sample, one heater policy y_g(t, x) shared by all
//! samples. Backward Euler in time, 5-point Laplacian in space, zero initial
//! and Dirichlet boundary values.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grf::{sample_field, FieldEnsemble};
use crate::grid::GridDomain;
use crate::kernels::{Kernel, MeanSpec};
use crate::solver::{epsilon_bisection, multiplier_sweep, Scalarized, SolveStatus, SolverOptions, SweepPoint};
use crate::transcription::{
    big_m_excursion_on, derivative_rows, expectation_objective, grid_weights, round_binaries, DerivativeScheme,
    ExcursionVars, ObjectiveTerms, PointCost, TranscribedProgram, DEFAULT_ROUNDING_TOL,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiffusionConfig {
    pub t_end: f64,
    pub half_width: f64,
    pub time_points: usize,
    pub space_points: usize,
    pub samples: usize,
    pub beta: f64,
    pub nu: f64,
    pub field_mean: f64,
    /// Field standard deviation.
    pub field_sigma: f64,
    pub heater_max: f64,
    pub setpoint: f64,
    pub threshold: f64,
    pub big_m: f64,
    /// Lower bound on y_c; `None` leaves it free.
    pub temperature_lb: Option<f64>,
    pub lambdas: Vec<f64>,
    pub epsilons: Vec<f64>,
    pub lambda_max: f64,
    pub seed: u64,
}

impl Default for DiffusionConfig {
    fn default() -> Self {
        DiffusionConfig {
            t_end: 1.0,
            half_width: 1.0,
            time_points: 6,
            space_points: 13,
            samples: 7,
            beta: 0.25,
            nu: 1.5,
            field_mean: 0.5,
            field_sigma: 1.0,
            heater_max: 0.1,
            setpoint: 0.2,
            threshold: 0.25,
            big_m: 1.0,
            temperature_lb: Some(0.0),
            lambdas: vec![0.0, 5.0, 20.0, 100.0, 1000.0],
            epsilons: Vec::new(),
            lambda_max: 1e4,
            seed: 0,
        }
    }
}

impl DiffusionConfig {
    /// The 10×31×31 grid.
    pub fn full_scale(self) -> Self {
        DiffusionConfig { time_points: 10, space_points: 31, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("t_end", self.t_end),
            ("half_width", self.half_width),
            ("beta", self.beta),
            ("nu", self.nu),
            ("heater_max", self.heater_max),
            ("big_m", self.big_m),
            ("lambda_max", self.lambda_max),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(self.threshold > self.setpoint) {
            return Err(Error::param(format!(
                "threshold {} must exceed setpoint {}",
                self.threshold, self.setpoint
            )));
        }
        if self.time_points < 2 || self.space_points < 3 {
            return Err(Error::param("need >= 2 time points and >= 3 points per space axis"));
        }
        if self.samples == 0 {
            return Err(Error::param("samples must be >= 1"));
        }
        if !(self.field_sigma >= 0.0) {
            return Err(Error::param("field_sigma must be >= 0"));
        }
        Ok(())
    }

    pub fn space_grid(&self) -> Result<GridDomain> {
        let (a, n) = (self.half_width, self.space_points);
        GridDomain::uniform(&[(-a, a, n), (-a, a, n)])
    }

    /// Grid over (t, x₁, x₂).
    pub fn grid(&self) -> Result<GridDomain> {
        let (a, n) = (self.half_width, self.space_points);
        GridDomain::uniform(&[(0.0, self.t_end, self.time_points), (-a, a, n), (-a, a, n)])
    }

    pub fn field(&self) -> Result<FieldEnsemble> {
        self.validate()?;
        let grid = self.space_grid()?;
        if self.field_sigma == 0.0 {
            return FieldEnsemble::new(grid, vec![vec![self.field_mean; self.space_points.pow(2)]; self.samples], self.seed, "mean");
        }
        let kernel = Kernel::matern(self.field_sigma * self.field_sigma, self.beta, self.nu);
        sample_field(&kernel, &MeanSpec::constant(self.field_mean), &grid, self.samples, self.seed)
    }
}

/// Transcribed program with handles to its pieces.
#[derive(Debug, Clone)]
pub struct DiffusionProgram {
    pub program: TranscribedProgram,
    pub excursion: ExcursionVars,
    pub excursion_terms: ObjectiveTerms,
    pub tracking: ObjectiveTerms,
    pub grid: GridDomain,
}

/// Build the program with objective excursion + 0·tracking; the caller
/// adds λ·tracking.
pub fn diffusion_program(config: &DiffusionConfig, field: &FieldEnsemble) -> Result<DiffusionProgram> {
    config.validate()?;
    let grid = config.grid()?;
    let space = config.space_grid()?;
    let ns = space.len();
    if field.points() != ns {
        return Err(Error::input(format!("field has {} points, space grid {ns}", field.points())));
    }
    let n = grid.len();
    let k = field.len();
    let mut p = TranscribedProgram::new();
    let yc = p.add_block("y_c", &[n, k], config.temperature_lb.unwrap_or(f64::NEG_INFINITY), f64::INFINITY)?;
    let yg = p.add_block("y_g", &[n], 0.0, config.heater_max)?;

    let dt_rows = derivative_rows(&grid, DerivativeScheme::BackwardEulerTime { axis: 0 })?;
    let lap = derivative_rows(&grid, DerivativeScheme::CentralLaplacian2d { axes: [1, 2] })?;
    let lap_rows: HashMap<usize, &Vec<(usize, f64)>> = lap.anchors.iter().copied().zip(&lap.rows).collect();
    let dyn_rows: HashMap<usize, &Vec<(usize, f64)>> = dt_rows.anchors.iter().copied().zip(&dt_rows.rows).collect();

    let mut interior = Vec::new();
    for i in 0..n {
        match (dyn_rows.get(&i), lap_rows.get(&i)) {
            (Some(d), Some(l)) => {
                interior.push(i);
                let xi_idx = i % ns;
                for s in 0..k {
                    let xi = field.value(s, xi_idx);
                    let mut row: Vec<(usize, f64)> = d.iter().map(|&(j, v)| (yc.at(&[j, s]), v)).collect();
                    row.extend(l.iter().map(|&(j, v)| (yc.at(&[j, s]), -xi * v)));
                    row.push((yg.at(&[i]), -1.0));
                    p.add_eq(&row, 0.0);
                }
            }
            _ => {
                // initial or boundary point: y_c = 0, heater has no effect
                for s in 0..k {
                    p.add_eq(&[(yc.at(&[i, s]), 1.0)], 0.0);
                }
                p.set_bounds(yg.at(&[i]), 0.0, 0.0);
            }
        }
    }

    let w = grid_weights(&grid)?;
    let costs: Vec<Vec<Vec<PointCost>>> = (0..k)
        .map(|s| {
            (0..n)
                .map(|i| vec![PointCost::Tracking { var: yc.at(&[i, s]), target: config.setpoint, coef: 1.0 }])
                .collect()
        })
        .collect();
    let tracking = expectation_objective(&costs, &w)?;
    // initial and boundary temperatures are pinned to zero < u
    let (mut p, vars) = big_m_excursion_on(p, "y_c", &interior, config.threshold, Some(config.big_m))?;
    let excursion_terms = ObjectiveTerms { linear: vars.probability_terms(), ..Default::default() };
    excursion_terms.add_to(&mut p);
    Ok(DiffusionProgram { program: p, excursion: vars, excursion_terms, tracking, grid })
}

fn scalarize(base: &DiffusionProgram, lambda: f64) -> Scalarized {
    let mut program = base.program.clone();
    base.tracking.clone().scaled(lambda).add_to(&mut program);
    Scalarized { program, excursion: base.excursion_terms.clone(), tracking: base.tracking.clone() }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffusionSolution {
    pub lambda: f64,
    pub status: Option<SolveStatus>,
    /// Expected tracking error ε at the solution.
    pub tracking: f64,
    pub relaxed_probability: f64,
    /// (1/K) Σ round(q_k).
    pub probability: f64,
    /// Fraction of samples whose maximum exceeds the threshold.
    pub indicator_probability: f64,
    pub min_temperature: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip)]
    pub policy: Vec<f64>,
    #[serde(skip)]
    pub mean_temperature: Vec<f64>,
}

fn summarize(config: &DiffusionConfig, base: &DiffusionProgram, point: SweepPoint) -> Result<DiffusionSolution> {
    if let Some(e) = point.error {
        return Ok(DiffusionSolution {
            lambda: point.lambda,
            status: point.status,
            tracking: f64::NAN,
            relaxed_probability: f64::NAN,
            probability: f64::NAN,
            indicator_probability: f64::NAN,
            min_temperature: f64::NAN,
            error: Some(e),
            policy: Vec::new(),
            mean_temperature: Vec::new(),
        });
    }
    let x = &point.x;
    let vars = &base.excursion;
    let q: Vec<usize> = vars.q.range().collect();
    let rounded = round_binaries(x, &q, DEFAULT_ROUNDING_TOL)?;
    let yc = base.program.block("y_c")?;
    let yg = base.program.block("y_g")?;
    let (n, k) = (yc.dims[0], yc.dims[1]);
    let tol = config.big_m * DEFAULT_ROUNDING_TOL;
    let exceed = (0..k)
        .filter(|&s| (0..n).any(|i| x[yc.at(&[i, s])] > config.threshold + tol))
        .count();
    let mean_temperature = (0..n).map(|i| (0..k).map(|s| x[yc.at(&[i, s])]).sum::<f64>() / k as f64).collect();
    Ok(DiffusionSolution {
        lambda: point.lambda,
        status: point.status,
        tracking: point.tracking,
        relaxed_probability: vars.probability(x),
        probability: vars.probability(&rounded),
        indicator_probability: exceed as f64 / k as f64,
        min_temperature: x[yc.range()].iter().copied().fold(f64::INFINITY, f64::min),
        error: None,
        policy: x[yg.range()].to_vec(),
        mean_temperature,
    })
}

/// Solve min (1/K)Σq_k + λ·tracking for one λ.
pub fn diffusion_solve(config: &DiffusionConfig, field: &FieldEnsemble, lambda: f64) -> Result<DiffusionSolution> {
    let mut pts = diffusion_pareto(config, field, &[lambda])?;
    let p = pts.remove(0);
    match (&p.error, p.status) {
        (Some(e), _) => Err(Error::Solver(e.clone())),
        (None, Some(SolveStatus::Optimal)) => Ok(p),
        (None, s) => Err(Error::Solver(format!("diffusion QP ended with status {s:?}"))),
    }
}

/// Multiplier sweep over `lambdas`, sorted by tracking error. Failed points
/// carry their error and sort last.
pub fn diffusion_pareto(config: &DiffusionConfig, field: &FieldEnsemble, lambdas: &[f64]) -> Result<Vec<DiffusionSolution>> {
    let base = diffusion_program(config, field)?;
    let pts = multiplier_sweep(|l| Ok(scalarize(&base, l)), lambdas, &SolverOptions::default());
    let mut out = pts.into_iter().map(|p| summarize(config, &base, p)).collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| a.tracking.total_cmp(&b.tracking).then(a.lambda.total_cmp(&b.lambda)));
    Ok(out)
}

/// The ε-constrained form: smallest-excursion point with tracking ≤ ε,
/// found by bisection on λ to relative accuracy 1e-3.
pub fn diffusion_epsilon(config: &DiffusionConfig, field: &FieldEnsemble, epsilon: f64) -> Result<DiffusionSolution> {
    if !(epsilon > 0.0) {
        return Err(Error::param(format!("epsilon must be > 0, got {epsilon}")));
    }
    let base = diffusion_program(config, field)?;
    let p = epsilon_bisection(
        |l| Ok(scalarize(&base, l)),
        epsilon,
        0.0,
        config.lambda_max,
        1e-3 * epsilon,
        60,
        &SolverOptions::default(),
    )?;
    summarize(config, &base, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> DiffusionConfig {
        DiffusionConfig { time_points: 3, space_points: 5, samples: 3, ..Default::default() }
    }

    #[test]
    fn zero_lambda_gives_zero_probability() {
        let c = tiny();
        let f = c.field().unwrap();
        let s = diffusion_solve(&c, &f, 0.0).unwrap();
        assert_eq!(s.probability, 0.0);
        assert_eq!(s.indicator_probability, 0.0);
    }

    #[test]
    fn probabilities_are_sample_fractions() {
        let c = tiny();
        let f = c.field().unwrap();
        for p in diffusion_pareto(&c, &f, &[0.0, 10.0, 1e3]).unwrap() {
            let scaled = p.probability * c.samples as f64;
            assert!((scaled - scaled.round()).abs() < 1e-12);
            assert_eq!(p.probability, p.indicator_probability);
        }
    }

    #[test]
    fn constant_positive_field_stays_nonnegative() {
        let c = DiffusionConfig { field_sigma: 0.0, temperature_lb: None, ..tiny() };
        let f = c.field().unwrap();
        let s = diffusion_solve(&c, &f, 100.0).unwrap();
        assert!(s.min_temperature >= -1e-8);
        assert_eq!(s.probability, 0.0);
    }

    #[test]
    fn rejects_threshold_below_setpoint() {
        let c = DiffusionConfig { threshold: 0.1, ..tiny() };
        assert!(c.validate().is_err());
    }
}
