//! The three case studies: battery sizing, atomic layer deposition and
//! plate heating.

mod ald;
mod battery;
mod diffusion;

pub use ald::{
    ald_optimize, ald_optimize_on, ald_simulate, ald_simulate_on, ald_tracking_error, ald_trajectory, AldConfig,
    AldOptimum, AldSimulation, AldTrajectory,
};
pub use battery::{
    battery_evaluate, battery_policy_simulation, battery_solve, battery_solve_on, BatteryConfig, BatteryEvaluation,
    BatteryPolicy, BatteryResult,
};
pub use diffusion::{
    diffusion_epsilon, diffusion_pareto, diffusion_program, diffusion_solve, DiffusionConfig, DiffusionProgram,
    DiffusionSolution,
};
