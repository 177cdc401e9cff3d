use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transcription::TranscribedProgram;

/// Lagrange multipliers: `y` for equalities, `z ≥ 0` for A_in x ≤ b_in,
/// `z_lb ≥ 0` / `z_ub ≥ 0` for the bounds (zero where a bound is infinite).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Duals {
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub z_lb: Vec<f64>,
    pub z_ub: Vec<f64>,
}

/// ∞-norms of the four KKT residual groups.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct KktResiduals {
    pub stationarity: f64,
    pub primal: f64,
    pub dual: f64,
    pub complementarity: f64,
}

impl KktResiduals {
    pub fn max(&self) -> f64 {
        self.stationarity.max(self.primal).max(self.dual).max(self.complementarity)
    }
}

fn inf_norm(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Residuals of the KKT conditions of `program` at (x, duals):
///
/// - stationarity: Qx + c + A_eqᵀy + A_inᵀz − z_lb + z_ub
/// - primal: equality violation and positive parts of inequality and bound violations
/// - dual: negative parts of z, z_lb, z_ub
/// - complementarity: z ∘ (b_in − A_in x) and bound products
pub fn kkt_residuals(program: &TranscribedProgram, x: &[f64], duals: &Duals) -> Result<KktResiduals> {
    let n = program.num_vars();
    if x.len() != n
        || duals.y.len() != program.b_eq.len()
        || duals.z.len() != program.b_in.len()
        || duals.z_lb.len() != n
        || duals.z_ub.len() != n
    {
        return Err(Error::input("kkt_residuals: shapes of x and duals do not match the program"));
    }
    let mut grad = program.q.matvec(x);
    let aty = program.a_eq.matvec_t(&duals.y);
    let gtz = program.a_in.matvec_t(&duals.z);
    for j in 0..n {
        grad[j] += program.c[j] + aty[j] + gtz[j] - duals.z_lb[j] + duals.z_ub[j];
    }
    let ax = program.a_eq.matvec(x);
    let gx = program.a_in.matvec(x);
    let eq = ax.iter().zip(&program.b_eq).map(|(a, b)| a - b);
    let ineq = gx.iter().zip(&program.b_in).map(|(g, h)| (g - h).max(0.0));
    let lo = (0..n).map(|j| (program.lb[j] - x[j]).max(0.0));
    let hi = (0..n).map(|j| (x[j] - program.ub[j]).max(0.0));
    let primal = inf_norm(eq.chain(ineq).chain(lo).chain(hi));
    let dual = inf_norm(
        duals.z.iter().chain(&duals.z_lb).chain(&duals.z_ub).map(|&v| v.min(0.0)),
    );
    let comp_in = duals.z.iter().zip(gx.iter().zip(&program.b_in)).map(|(z, (g, h))| z * (h - g));
    let comp_lb = (0..n).filter(|&j| program.lb[j].is_finite()).map(|j| duals.z_lb[j] * (x[j] - program.lb[j]));
    let comp_ub = (0..n).filter(|&j| program.ub[j].is_finite()).map(|j| duals.z_ub[j] * (program.ub[j] - x[j]));
    Ok(KktResiduals {
        stationarity: inf_norm(grad),
        primal,
        dual,
        complementarity: inf_norm(comp_in.chain(comp_lb).chain(comp_ub)),
    })
}
