//! 2D constant-density acoustic forward modeling.
//!
//! The propagator solves the first-order velocity-pressure form of the
//! acoustic wave equation on a staggered grid (pressure at cell centers,
//! particle velocities at half-offset nodes), second order in time and
//! space, with convolutional PML absorbing layers on all four sides.
//!
//! A shot is one source firing recorded by a line of receivers; the
//! recording carries two channels per receiver (pressure and vertical
//! particle velocity), resampled onto a fixed output time grid.

mod error;
mod grid;
mod io;
mod record;
mod solver;
mod wavelet;

pub use error::WaveError;
pub use grid::{Grid2D, VelocityModel};
pub use io::{read_shot_record, read_velocity_model, write_shot_record, write_velocity_model};
pub use record::{Acquisition, ShotRecord};
pub use solver::{
    kernel, residual_energy, simulate_shot, simulate_shot_opts, stable_dt, SimOptions,
    WavefieldHistory,
};
pub use wavelet::{ricker, SourceWavelet};

pub type Result<T> = std::result::Result<T, WaveError>;
