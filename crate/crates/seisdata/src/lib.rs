//! Dataset assembly over the model generator and wave solver.
//!
//! A sample pairs a normalized `(receivers, time, channels)` seismic tensor
//! with its normalized velocity image. Channels are shot-major: channels
//! `(2s, 2s+1)` hold the pressure and vertical-particle-velocity recordings
//! of shot `s`. Everything lands in `(-1, 1)`: traces divide by one global
//! scale (the 99.9th-percentile absolute amplitude of a calibration pass,
//! clamped), labels map the configured velocity range linearly.
//!
//! Datasets persist as one shard file per split plus a human-readable
//! manifest (key=value lines with the generator, acquisition, and
//! normalization parameters, split index lists, and shard CRC-32s).

mod build;
mod manifest;
mod sample;
mod shard;

pub use build::{build_dataset, load_batch, load_split, DEFAULT_CALIBRATION_SAMPLES};
pub use manifest::{read_manifest, write_manifest, DatasetManifest, ShardEntry};
pub use sample::{build_sample, Normalization, Sample, SampleMeta, N_CHANNELS};
pub use shard::{read_shard_samples, write_shard, ShardReader};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("sample {index}: {source}")]
    Sample { index: usize, source: wavesim::WaveError },
    #[error(transparent)]
    Gen(#[from] velmodel::GenError),
    #[error(transparent)]
    Wave(#[from] wavesim::WaveError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad manifest: {0}")]
    Manifest(String),
    #[error("shard {path} is corrupt: {reason}")]
    Corrupt { path: String, reason: String },
}

pub type Result<T> = std::result::Result<T, DataError>;
