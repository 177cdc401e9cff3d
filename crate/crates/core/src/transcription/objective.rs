use serde::{Deserialize, Serialize};

use super::program::TranscribedProgram;
use crate::error::{Error, Result};

/// Cost attached to one (sample, point) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PointCost {
    /// coef · x[var]
    Linear { var: usize, coef: f64 },
    /// coef · (x[var] − target)²
    Tracking { var: usize, target: f64, coef: f64 },
}

/// Objective pieces in the ½xᵀQx + cᵀx + constant convention. `quadratic`
/// entries are Q_ij values for i ≤ j (mirrored on insertion).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ObjectiveTerms {
    pub quadratic: Vec<(usize, usize, f64)>,
    pub linear: Vec<(usize, f64)>,
    pub constant: f64,
}

impl ObjectiveTerms {
    pub fn scaled(mut self, s: f64) -> Self {
        self.quadratic.iter_mut().for_each(|e| e.2 *= s);
        self.linear.iter_mut().for_each(|e| e.1 *= s);
        self.constant *= s;
        self
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let q: f64 = self
            .quadratic
            .iter()
            .map(|&(i, j, v)| if i == j { 0.5 * v * x[i] * x[i] } else { v * x[i] * x[j] })
            .sum();
        q + self.linear.iter().map(|&(i, v)| v * x[i]).sum::<f64>() + self.constant
    }

    pub fn add_to(&self, program: &mut TranscribedProgram) {
        for &(i, j, v) in &self.quadratic {
            program.add_quadratic(i, j, v);
        }
        for &(i, v) in &self.linear {
            program.add_linear(i, v);
        }
        program.constant += self.constant;
    }
}

/// (1/K) Σ_k Σ_i β_i · cost_{k,i}, where `costs[k][i]` lists the terms at
/// point i of sample k.
pub fn expectation_objective(costs: &[Vec<Vec<PointCost>>], weights: &[f64]) -> Result<ObjectiveTerms> {
    if costs.is_empty() {
        return Err(Error::input("need at least one sample"));
    }
    let inv_k = 1.0 / costs.len() as f64;
    let mut out = ObjectiveTerms::default();
    for (k, sample) in costs.iter().enumerate() {
        if sample.len() != weights.len() {
            return Err(Error::input(format!(
                "sample {k} has {} points, weights have {}",
                sample.len(),
                weights.len()
            )));
        }
        for (terms, &beta) in sample.iter().zip(weights) {
            let s = beta * inv_k;
            for t in terms {
                match *t {
                    PointCost::Linear { var, coef } => out.linear.push((var, s * coef)),
                    PointCost::Tracking { var, target, coef } => {
                        out.quadratic.push((var, var, 2.0 * s * coef));
                        out.linear.push((var, -2.0 * s * coef * target));
                        out.constant += s * coef * target * target;
                    }
                }
            }
        }
    }
    Ok(out)
}
