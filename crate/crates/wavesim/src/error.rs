use thiserror::Error;

#[derive(Debug, Error)]
pub enum WaveError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("wavefield instability: non-finite value at time step {step}")]
    Instability { step: usize },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad file format: {0}")]
    Format(String),
}
