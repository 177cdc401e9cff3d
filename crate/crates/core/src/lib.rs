#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

//! Random field optimization toolkit.
//!
//! Gaussian random fields over tensor grids, summarizing measures (excursion
//! sets, Euler characteristics, upcrossings, CVaR), direct transcription of
//! random-field-constrained problems into sparse convex programs, and a
//! primal-dual interior-point solver for the resulting LP/QP instances. The
//! [`cases`] module wires these together into three end-to-end studies.

pub mod cases;
pub mod dense;
pub mod error;
pub mod grf;
pub mod grid;
pub mod kernels;
pub mod measures;
pub mod rng;
pub mod solver;
pub mod sparse;
pub mod special;
pub mod transcription;

mod par;

pub use error::{Error, Result};
pub use grf::FieldEnsemble;
pub use grid::{Axis, GridDomain};
pub use kernels::{Kernel, KernelFamily, MeanSpec};
