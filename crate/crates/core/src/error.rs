use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A precondition on an input parameter does not hold.
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    /// The operation is undefined for the given geometry (e.g. zero barrier width).
    #[error("degenerate geometry: {0}")]
    Degenerate(&'static str),
    /// An iterative or quadrature procedure did not reach its tolerance.
    #[error("no convergence in {what}: reached {achieved:e}, wanted {tolerance:e}")]
    Convergence {
        what: &'static str,
        achieved: f64,
        tolerance: f64,
    },
    #[error("singular matching system")]
    Singular,
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
}

impl Error {
    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }

    /// True for errors raised by a numerical procedure rather than by input validation.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Convergence { .. } | Error::Singular)
    }
}
