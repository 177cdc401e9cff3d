use serde::Serialize;

use super::ipm::{solve_qp_with, SolveStatus, SolverOptions};
use crate::error::{Error, Result};
use crate::par;
use crate::transcription::{ObjectiveTerms, TranscribedProgram};

/// A program scalarized as excursion-term + λ·tracking-term, with both
/// terms kept separately so they can be reported at the solution.
#[derive(Debug, Clone)]
pub struct Scalarized {
    pub program: TranscribedProgram,
    pub excursion: ObjectiveTerms,
    pub tracking: ObjectiveTerms,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub lambda: f64,
    pub status: Option<SolveStatus>,
    pub excursion: f64,
    pub tracking: f64,
    pub objective: f64,
    #[serde(skip)]
    pub x: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn solve_point<B>(build: &B, lambda: f64, opts: &SolverOptions) -> SweepPoint
where
    B: Fn(f64) -> Result<Scalarized>,
{
    let failed = |e: Error| SweepPoint {
        lambda,
        status: None,
        excursion: f64::NAN,
        tracking: f64::NAN,
        objective: f64::NAN,
        x: Vec::new(),
        error: Some(e.to_string()),
    };
    if !(lambda >= 0.0) {
        return failed(Error::param(format!("lambda must be >= 0, got {lambda}")));
    }
    let s = match build(lambda) {
        Ok(s) => s,
        Err(e) => return failed(e),
    };
    match solve_qp_with(&s.program, opts) {
        Ok(r) => SweepPoint {
            lambda,
            status: Some(r.status),
            excursion: s.excursion.evaluate(&r.x),
            tracking: s.tracking.evaluate(&r.x),
            objective: r.objective,
            x: r.x,
            error: None,
        },
        Err(e) => failed(e),
    }
}

/// Solve min excursion + λ·tracking for every λ. Failures are recorded per
/// point and do not stop the sweep; points run concurrently.
pub fn multiplier_sweep<B>(build: B, lambdas: &[f64], opts: &SolverOptions) -> Vec<SweepPoint>
where
    B: Fn(f64) -> Result<Scalarized> + Sync + Send,
{
    par::map_indexed(lambdas.len(), |i| solve_point(&build, lambdas[i], opts))
}

/// Bisection on λ (geometric once λ > 0) for the point whose tracking term
/// is within `eps_tol` of `target`. Tracking is nonincreasing in λ, so the
/// bracket is [lo, hi] with tracking(lo) ≥ target ≥ tracking(hi).
pub fn epsilon_bisection<B>(
    build: B,
    target: f64,
    lo: f64,
    hi: f64,
    eps_tol: f64,
    max_iter: usize,
    opts: &SolverOptions,
) -> Result<SweepPoint>
where
    B: Fn(f64) -> Result<Scalarized>,
{
    if !(0.0 <= lo && lo < hi) {
        return Err(Error::input(format!("need 0 <= lo < hi, got [{lo}, {hi}]")));
    }
    let eval = |l: f64| -> Result<SweepPoint> {
        let p = solve_point(&build, l, opts);
        match &p.error {
            Some(e) => Err(Error::Solver(e.clone())),
            None => Ok(p),
        }
    };
    let mut a = eval(lo)?;
    if a.tracking <= target + eps_tol {
        return Ok(a);
    }
    let mut b = eval(hi)?;
    if b.tracking > target + eps_tol {
        return Err(Error::Solver(format!(
            "tracking target {target} not reached at lambda {hi} (tracking {})",
            b.tracking
        )));
    }
    for _ in 0..max_iter {
        if (b.tracking - target).abs() <= eps_tol {
            return Ok(b);
        }
        let mid = if a.lambda > 0.0 { (a.lambda * b.lambda).sqrt() } else { 0.1 * b.lambda };
        let m = eval(mid)?;
        if m.tracking > target {
            a = m;
        } else {
            b = m;
        }
        if (b.lambda - a.lambda).abs() <= 1e-12 * b.lambda {
            break;
        }
    }
    Ok(b)
}
