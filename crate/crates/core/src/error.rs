use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input violates a documented precondition or type invariant.
    #[error("domain error: {0}")]
    Domain(String),

    /// The `D` divisor vanished, or left the upper half plane where the
    /// principal square root is continuous.
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    /// The brute-force quadrature did not reach its self-consistency target
    /// within the node budget.
    #[error("quadrature oracle did not converge: last relative change {last_change:.3e} at {nodes} nodes per axis")]
    OracleFailure { last_change: f64, nodes: usize },

    /// A partially-coherent average came out significantly negative.
    #[error("numerical consistency error: {0}")]
    NumericalConsistency(String),

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
