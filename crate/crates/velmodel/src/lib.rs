//! Procedural generation of layered-earth velocity models.
//!
//! Two families: `St` (straight, tilted, parallel layer interfaces on a
//! 100x100 grid) and `Curved` (more layers with cosine-perturbed interfaces
//! on a 150x100 grid). Velocities are drawn per layer and sorted so speed
//! never decreases with depth; most models carry a small dip-slip fault
//! that throws one side down by a few cells.
//!
//! Generation is a pure function of `(config, sample index)`: every sample
//! gets its own counter-mode RNG stream, so datasets rebuild bit-for-bit.

mod config;
mod generate;

pub use config::{Family, GenConfig};
pub use generate::{gen_model, vertical_profile, FaultSpec, LayerSpec};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("cannot fit {layers} layers of minimum thickness {min_thickness} into {rows} usable rows")]
    CannotFit { layers: usize, min_thickness: usize, rows: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Wave(#[from] wavesim::WaveError),
}

pub type Result<T> = std::result::Result<T, GenError>;
