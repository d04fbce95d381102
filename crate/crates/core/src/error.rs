use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is not in NS (singular, or some column has content > 1)")]
    NotNS,
    #[error("matrix is not in terminal form")]
    NotTerminal,
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("no 1-block of size n-1 under any column permutation")]
    NoLargeBlock,
    #[error("matrix is unimodular")]
    Unimodular,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("bad column subset: {0}")]
    BadSubset(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("bad column: {0}")]
    BadColumn(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("{0} is not square-free")]
    NotSquareFree(u64),
    #[error("{0} exceeds the factorization limit")]
    FactorizationLimit(u64),
    #[error("argument out of range: {0}")]
    RangeError(String),
    #[error("matrix does not lie in F(n,k)")]
    NotInF,
    #[error("bad X block: {0}")]
    BadX(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::SizeLimit(_) | Error::Budget(_) | Error::FactorizationLimit(_) => 2,
            _ => 3,
        }
    }
}
