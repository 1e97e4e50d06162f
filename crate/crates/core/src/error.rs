use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors produced by the model, filter, estimation, and I/O layers.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// State propagation produced a value outside the representable range.
    #[error("state propagation failed at t={t}: {reason}")]
    Propagation { t: usize, reason: String },

    /// Every particle weight vanished (no finite log-weight).
    #[error("all particle weights vanished")]
    WeightsVanished,

    /// Particle filter degenerated at a specific time step.
    #[error("particle filter failed at t={t}: all weights vanished")]
    FilterFailure { t: usize },

    /// A replicated likelihood evaluation failed in one replicate.
    #[error("filter failure in replicate {replicate}")]
    ReplicateFailure {
        replicate: usize,
        #[source]
        source: Box<Error>,
    },

    /// The iterated-filtering update lost all parameter spread.
    #[error(
        "degenerate update for `{param}` at t={t}: prediction variance {variance:e} \
         is below the floor; increase the perturbation sd"
    )]
    DegenerateUpdate {
        param: String,
        t: usize,
        variance: f64,
    },

    /// An iterated-filtering pass aborted mid-run.
    #[error("iterated filtering aborted at iteration {iteration}")]
    MifAbort {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    /// A data file had an unparseable or invalid row.
    #[error("{}: malformed row at line {line}: {reason}", path.display())]
    MalformedRow {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    /// A data file could not be used at all (missing column, wrong shape, ...).
    #[error("{}: {reason}", path.display())]
    BadInput { path: PathBuf, reason: String },

    /// An operation that needs observations received none.
    #[error("empty series: {0}")]
    EmptySeries(String),

    /// File-level I/O failure with the offending path attached.
    #[error("{}: {source}", path.display())]
    IoAt {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn io_at(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::IoAt {
            path: path.into(),
            source,
        }
    }

    /// True for failures that arise while running a filter or an update,
    /// as opposed to invalid inputs.
    pub fn is_runtime(&self) -> bool {
        matches!(
            self,
            Error::Propagation { .. }
                | Error::WeightsVanished
                | Error::FilterFailure { .. }
                | Error::ReplicateFailure { .. }
                | Error::DegenerateUpdate { .. }
                | Error::MifAbort { .. }
        )
    }
}
