//! Error types shared across the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument violated an operation's precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// No detector power in the solver bracket reaches the requested ENOB.
    /// Happens when the RIN-imposed SNR ceiling sits below the target
    /// precision for the given data rate.
    #[error("no feasible P_PD-opt in [-90, +30] dBm for B={bits} at {datarate_gsps} GS/s")]
    InfeasiblePrecision { bits: f64, datarate_gsps: f64 },

    /// A file failed to parse. `line` is 1-based; 0 means the error is not
    /// tied to a specific line.
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    /// Consecutive model layers disagree on tensor dimensions.
    #[error("dimension chain mismatch between '{prev}' and '{layer}': {msg}")]
    DimensionChain {
        prev: String,
        layer: String,
        msg: String,
    },

    /// Inconsistent run configuration (e.g. a missing baseline cell).
    #[error("configuration error: {0}")]
    Config(String),

    /// An internal invariant was violated; indicates a bug.
    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
