use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("qubit index {index} out of range for {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("operation requires a density-operator state")]
    RequiresDensity,

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("deliberation did not produce a flagged action within {0} attempts")]
    AttemptCap(u64),

    #[error("flag policy exhausted: no rewarded action is still flagged")]
    PolicyExhausted,

    #[error("schedule error: {0}")]
    Schedule(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether the failure comes from user input (config, arguments, files)
    /// rather than from the numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::InvalidArgument(_) | Error::Config(_) | Error::Io(_) | Error::Schedule(_))
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
