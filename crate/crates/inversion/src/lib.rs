//! Physics-driven velocity inversion.
//!
//! Minimizes `1/2 sum_shots ||d - f(m)||^2 + lambda * R(m)` by preconditioned
//! steepest descent with a backtracking line search. The data-term gradient
//! comes from the exact discrete adjoint of the forward stepper (one forward
//! pass with stored pressure history plus one time-reversed sweep per shot),
//! so finite-difference and dot-product checks close to near round-off.
//!
//! The forward operator is frozen per inversion: its time step derives from
//! the velocity upper bound, not the current iterate, so the objective is a
//! fixed function of the model. `simulate_observed` builds data under that
//! same operator.

mod adjoint;
mod invert;
mod regularize;
mod report;

pub use adjoint::{gradient_adjoint, misfit, objective_gradient, simulate_observed, ObjectiveEval};
pub use invert::{
    invert, invert_with_observer, precondition, InversionConfig, InversionState, IterRow,
    LineSearchParams,
};
pub use regularize::Regularizer;
pub use report::write_report_csv;

use thiserror::Error;
use wavesim::WaveError;

#[derive(Debug, Error)]
pub enum InvertError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Wave(#[from] WaveError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, InvertError>;

/// Fixed discretization of the forward operator for one inversion run.
#[derive(Debug, Clone, Copy)]
pub struct ForwardSpec {
    pub dt: f64,
}

impl ForwardSpec {
    /// CFL-safe step for any model whose velocities stay at or below
    /// `v_max_bound` on a grid with spacing `dx`.
    pub fn for_bound(dx: f64, v_max_bound: f64) -> Self {
        Self { dt: 0.9 * dx / (v_max_bound * std::f64::consts::SQRT_2) }
    }
}
