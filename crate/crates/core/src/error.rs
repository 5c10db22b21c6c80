use thiserror::Error;

/// Errors raised by the simulator, operator builders, solvers and drivers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// `<psi|A|psi>` was not strictly positive, so the cost is undefined.
    #[error("singular cost: <psi|A|psi> = {0:e} is not positive")]
    SingularCost(f64),

    #[error("matrix is singular to working precision")]
    SingularMatrix,

    #[error("explicit scheme unstable: delta = {0} exceeds 1/2")]
    Unstable(f64),

    /// A time integration produced non-finite values.
    #[error("solution diverged at step {0}")]
    Diverged(usize),

    #[error("state error: {0}")]
    State(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
