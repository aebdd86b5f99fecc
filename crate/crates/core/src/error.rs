use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// `(g, n)` with `2g - 2 + n <= 0`.
    #[error("unstable type (g, n) = ({g}, {n}): need 2g - 2 + n > 0")]
    Unstable { g: u32, n: usize },

    /// A precondition of the operation is not met by the input.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("insufficient truncation: need order {needed}, have {available}")]
    InsufficientTruncation { needed: usize, available: usize },

    #[error("compute budget exceeded: {0}")]
    Budget(String),

    #[error("tolerance {target:e} not reached (achieved {achieved:e})")]
    Tolerance { target: f64, achieved: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub(crate) fn check_stable(g: u32, n: usize) -> Result<()> {
    if 2 * g as i64 - 2 + n as i64 > 0 {
        Ok(())
    } else {
        Err(Error::Unstable { g, n })
    }
}
