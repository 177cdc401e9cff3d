//! Interior-point QP solver, KKT diagnostics, scalar search and
//! multiplier sweeps.

mod ipm;
mod kkt;
pub mod ldl;
mod scalar;
mod sweep;

pub use ipm::{
    solve_qp, solve_qp_with, IterLog, Iterate, ResidualSummary, SolveResult, SolveStatus, SolverOptions, StepSizes,
};
pub use kkt::{kkt_residuals, Duals, KktResiduals};
pub use scalar::golden_section;
pub use sweep::{epsilon_bisection, multiplier_sweep, Scalarized, SweepPoint};
