//! Crate-wide error type.

use thiserror::Error;

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Unified error type for construction, simulation, and io failures.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter failed a documented precondition.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Dimension or qubit-index mismatch between operands.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Amplitudes do not form a normalized state.
    #[error("state is not normalized: |norm^2 - 1| = {deviation:.3e}")]
    NotNormalized { deviation: f64 },

    /// The two prepared states are numerically orthogonal, so the
    /// amplification plane and its rotation angle are undefined.
    #[error("states are numerically orthogonal (|overlap| = {overlap:.3e}); the rotation plane is undefined")]
    OrthogonalStates { overlap: f64 },

    /// The two prepared states coincide, so no two-dimensional invariant
    /// plane exists.
    #[error("states are numerically identical (|overlap| = {overlap:.6}); the invariant plane is degenerate")]
    DegeneratePlane { overlap: f64 },

    /// A requested operator power exceeds the configured cap.
    #[error("requested power {requested} exceeds the cap {cap}")]
    PowerCap { requested: i64, cap: i64 },

    /// Peak search found no admissible peak.
    #[error("no admissible spectral peak: {0}")]
    NoPeak(String),

    /// Angle extraction found zero or several candidates consistent with the
    /// peak position.
    #[error("ambiguous angle unwrap at magnification {m}: {candidates} candidates match the peak")]
    AmbiguousUnwrap { m: i64, candidates: usize },

    /// Successive ladder rungs produced inconsistent angle intervals.
    #[error("ladder rung m={m} produced no candidate inside the interval [{lo:.6}, {hi:.6}]")]
    LadderMismatch { m: i64, lo: f64, hi: f64 },

    /// Text parse failure (observable files, CSV artifacts).
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Underlying filesystem failure.
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
