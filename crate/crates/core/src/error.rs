use std::path::PathBuf;

use crate::hawkes_sim::SpikeRecord;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Model parameters violate an admissibility condition.
    #[error("model error: {0}")]
    Model(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("no convergence after {iterations} iterations ({detail}); last contraction ratio {last_ratio:.4e}")]
    NonConvergence {
        iterations: usize,
        last_ratio: f64,
        detail: String,
    },

    #[error("intensity of neuron {neuron} cannot be dominated at t = {time}: {detail}")]
    NonDominatable {
        neuron: usize,
        time: f64,
        detail: String,
    },

    /// The explosion guard tripped. The partial record covers `[0, stopped_at]`.
    #[error("explosion guard: more than {limit} events before t = {stopped_at}")]
    Explosion {
        limit: usize,
        stopped_at: f64,
        partial: Box<SpikeRecord>,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error in {what}: {detail}")]
    Parse { what: String, detail: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the numerics themselves (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. } | Error::NonDominatable { .. } | Error::Explosion { .. }
        )
    }
}
