use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),
    #[error("empty input sequence")]
    EmptyInput,
    /// A scan cell would exceed its big-integer operation budget.
    #[error("resource limit: cell {cell} needs {needed} big-integer operations, budget is {budget}")]
    ResourceLimit { cell: u64, needed: u64, budget: u64 },
    #[error("root solver did not converge: {0}")]
    Convergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
