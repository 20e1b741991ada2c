use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("index {index} exceeds the supported maximum {max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("state is not normalized: squared norm {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("duplicate multi-index {0} in superposition")]
    DuplicateIndex(String),

    #[error("assembled Wigner value has imaginary residual {imag:e}")]
    NonHermitianResidual { imag: f64 },

    #[error(
        "off-diagonal quadrature called with identical indices {0}; use the exact diagonal path"
    )]
    DiagonalPair(String),

    #[error("polynomial leaves the eigenspace: residual coefficient {residual:e} at exponent {exponent}")]
    EigenspaceViolation { exponent: String, residual: f64 },

    #[error("angle {theta} has no exact representation; use floating coefficients")]
    InexactAngle { theta: f64 },

    #[error("degree mismatch: |start| = {start}, |target| = {target}")]
    DegreeMismatch { start: u32, target: u32 },

    #[error("rotation step from {from} to {to} has zero coefficient")]
    ChainBroken { from: String, to: String },
}
