use thiserror::Error;

/// Errors raised by the numerical layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate kinematics: {0}")]
    DegenerateKinematics(String),

    #[error("state norm {norm:e} is below the zero-norm threshold")]
    ZeroNormState { norm: f64 },

    #[error("invalid photon index pair ({i}, {j}); expected two distinct indices in 1..=3")]
    Index { i: usize, j: usize },

    #[error("basis error: {0}")]
    Basis(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("weight {weight:e} exceeds rejection envelope {envelope:e} at x = ({x1}, {x2})")]
    EnvelopeExceeded {
        weight: f64,
        envelope: f64,
        x1: f64,
        x2: f64,
    },
}

impl Error {
    /// True for failures of an iterative or stochastic numerical procedure,
    /// as opposed to invalid inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoConvergence(_) | Error::EnvelopeExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
