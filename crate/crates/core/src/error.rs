use thiserror::Error;

use crate::numerics::LimitEstimate;

/// Errors raised by every module of the toolkit.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("limit did not converge after {} terms (best estimate {})", .best.terms_used, .best.value)]
    NonConvergent { best: Box<LimitEstimate> },

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("depth overflow: {0}")]
    DepthOverflow(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("inhomogeneous system at depth {depth}: bridge-length spread {spread:.4} exceeds {threshold}")]
    InhomogeneousSystem {
        depth: usize,
        spread: f64,
        threshold: f64,
    },

    #[error("point is not in the set: it falls in a gap at depth {depth}")]
    NotInSet { depth: usize },

    #[error("incompatible words: {0}")]
    IncompatibleWords(String),

    #[error("inversion out of range: relative infinitesimal {xtilde} is not below the scale {epsilon}")]
    InversionOutOfRange { xtilde: String, epsilon: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// The best estimate carried by a [`Error::NonConvergent`], if any.
    pub fn best_estimate(&self) -> Option<&LimitEstimate> {
        match self {
            Error::NonConvergent { best } => Some(best),
            _ => None,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
