use thiserror::Error;

/// Exit status of the `cavity` binary.
pub const EXIT_OK: u8 = 0;
pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_SINGULAR: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("{0}")]
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse { .. } | CliError::Io(_) => EXIT_PARSE,
            CliError::Singular(_) => EXIT_SINGULAR,
            CliError::Validation(_) | CliError::Solver(_) => EXIT_VALIDATION,
        }
    }
}

impl From<cavity::Error> for CliError {
    fn from(e: cavity::Error) -> Self {
        use cavity::Error as E;
        match e {
            E::Parse { line, message } => CliError::Parse {
                location: format!("mesh line {line}"),
                message,
            },
            E::Io(e) => CliError::Io(e.to_string()),
            E::NearResonance { omega } => CliError::Singular(format!(
                "the undamped system is singular at ω = {omega}, which is at or near a resonance; \
                 use δ > 0 or the limiting-absorption command"
            )),
            E::Singular(m) => CliError::Singular(m),
            E::Residual { .. } => CliError::Singular(e.to_string()),
            E::InvalidArgument(_) | E::Validation(_) | E::Degenerate(_) | E::Admissibility(_) => {
                CliError::Validation(e.to_string())
            }
            E::Consistency(m) => CliError::Solver(format!("internal consistency check failed: {m}")),
        }
    }
}
