use thiserror::Error;

use crate::entanglement::DensityMatrix;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the range on which a kernel is validated.
    #[error("argument out of validated range: {0}")]
    Range(String),

    /// A caller broke an input contract (shape, hermiticity, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A parameter lies outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("post-selection produced a zero-norm state: {0}")]
    PostSelection(String),

    /// Lattice / guard-band configuration cannot support the requested walk.
    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("probability leaked into the guard band: {leaked:.3e} > {limit:.1e}")]
    GuardLeakage { leaked: f64, limit: f64 },

    #[error("projector quorum is not tomographically complete: {0}")]
    QuorumIncomplete(String),

    #[error("incomplete count data: {0}")]
    IncompleteData(String),

    #[error("maximum-likelihood fit did not converge after {iterations} iterations")]
    Convergence {
        iterations: usize,
        best: Box<DensityMatrix>,
    },

    #[error("unsupported dimension: {0}")]
    UnsupportedDimension(String),
}

impl Error {
    /// True for errors caused by bad input values rather than by a numerical
    /// contract failing at run time.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Range(_)
                | Error::Domain(_)
                | Error::PostSelection(_)
                | Error::Configuration(_)
                | Error::IncompleteData(_)
                | Error::UnsupportedDimension(_)
        )
    }
}
