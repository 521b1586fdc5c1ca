use thiserror::Error;

use crate::spectral::SpectralField;

pub type Result<T> = std::result::Result<T, ZkbError>;

#[derive(Debug, Error)]
pub enum ZkbError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("dimension mismatch: expected {expected:?}, got {got:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },

    #[error("Hermitian symmetry violated: relative defect {defect:e} exceeds {tol:e}")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("non-finite multiplier value at mode ({kx}, {ky})")]
    NonFiniteMultiplier { kx: i64, ky: i64 },

    #[error("remapped frequency not representable on target grid: {0}")]
    OutOfBand(String),

    #[error("time {t} outside window [{t0}, {t1}]")]
    OutsideWindow { t: f64, t0: f64, t1: f64 },

    #[error("window too short to resolve modulation L = {l}: tau spacing {spacing} > L/4")]
    UnresolvedModulation { l: f64, spacing: f64 },

    #[error("unsupported norm: {0}")]
    UnsupportedNorm(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("blow-up at step {step} (t = {t}): non-finite values")]
    BlowUp {
        step: usize,
        t: f64,
        last_frame: Box<SpectralField>,
    },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("snapshot format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl ZkbError {
    pub fn param(msg: impl Into<String>) -> Self {
        ZkbError::InvalidParameter(msg.into())
    }
}
