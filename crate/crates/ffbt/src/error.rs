//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// A sampled generator returned NaN or infinity at a grid node.
    #[error("sampling error: non-finite value at node ({x}, {y})")]
    NonFiniteSample { x: f64, y: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// `pi^2 |k|^2` came within the relative guard of `z_{m,n}^2`; the
    /// coefficient would be numerically meaningless.
    #[error("near-resonance: pi^2|k|^2 within 1e-9 of z^2 for k=({k1},{k2}), (m,n)=({m},{n})")]
    NearResonance { k1: i64, k2: i64, m: i32, n: usize },

    #[error("out of regime: {0}")]
    OutOfRegime(String),

    #[error("missing constant: {0}")]
    MissingConstant(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
