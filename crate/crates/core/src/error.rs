use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("inadmissible impedance: {0}")]
    Admissibility(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error(
        "system is singular at zero absorption (omega = {omega}); the frequency is at or near \
         a cavity resonance, retry with delta > 0 or use limiting absorption"
    )]
    NearResonance { omega: f64 },

    #[error("linear solve residual {residual:e} exceeds tolerance {tol:e}")]
    Residual { residual: f64, tol: f64 },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
