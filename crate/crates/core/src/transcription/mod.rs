//! Direct transcription of random-field problems into finite convex
//! programs: variable layout, quadrature, derivative stencils, sample-average
//! objectives, Euler–Maruyama paths and the big-M excursion reformulation.

mod bigm;
mod layout;
mod objective;
mod program;
mod sde;
mod stencil;

pub use bigm::{big_m_excursion, big_m_excursion_on, round_binaries, ExcursionVars, DEFAULT_ROUNDING_TOL};
pub use layout::{Block, VariableLayout};
pub use objective::{expectation_objective, ObjectiveTerms, PointCost};
pub use program::TranscribedProgram;
pub use sde::{euler_maruyama, explicit_euler, SdePath};
pub use stencil::{derivative_rows, grid_weights, quadrature_weights, DerivativeScheme, Stencil};

pub(crate) use program::dot;
