use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("non-finite sample at node {node}")]
    NonFiniteSample { node: usize },

    #[error("non-finite spectral coefficient at mode index {mode}")]
    NonFiniteMode { mode: usize },

    #[error("slope quotient is undefined at alpha = 0; use the derivative instead")]
    ZeroShift,

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("weight error: {0}")]
    Weight(String),

    #[error("calibration error: {0}")]
    Calibration(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}
