use thiserror::Error;

use crate::ogomp::SynthesisResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The least-squares system did not have full column rank.
    #[error("rank-deficient system: detected rank {rank} of {cols} columns")]
    RankDeficient { rank: usize, cols: usize },

    #[error("pattern generation failed: {0}")]
    Generation(String),

    #[error("pattern file error: {0}")]
    PatternFile(String),

    /// Mode-2 OMP could not reach the threshold even with full support.
    #[error("threshold unreachable; best achieved {best:.6e}")]
    Infeasible { best: f64 },

    /// Mode-2 OGOMP exhausted every sparsity level. The best result is attached.
    #[error("xi target unreachable; best xi {:.6e} at K={}", .0.metrics.xi, .0.solution.support.len())]
    InfeasibleSynthesis(Box<SynthesisResult>),

    #[error("position refinement failed: {0}")]
    Refinement(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
