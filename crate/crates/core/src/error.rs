use thiserror::Error;

/// Failures surfaced by the library.
///
/// The split matters to callers: input and domain problems ("the math says
/// no") map to exit code 1, numerical-protocol problems ("the numerics gave
/// up") map to exit code 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("edge `{edge}` references unknown vertex `{vertex}`")]
    DanglingEndpoint { edge: String, vertex: String },
    #[error("unknown path `{0}`")]
    UnknownPath(String),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("truncation too small: {0}")]
    Truncation(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("window unstable: {0}")]
    WindowUnstable(String),
    #[error("closure overflow: dimension {dim} exceeds limit {max}")]
    ClosureOverflow { dim: usize, max: usize },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("candidate explosion: {0}")]
    CandidateExplosion(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::WindowUnstable(_)
            | Error::ClosureOverflow { .. }
            | Error::Numerical(_)
            | Error::CandidateExplosion(_)
            | Error::Verification(_) => 2,
            _ => 1,
        }
    }

    /// True for failures of the numerical protocol rather than of the input.
    pub fn is_numerical(&self) -> bool {
        self.exit_code() == 2
    }
}

pub type Result<T> = std::result::Result<T, Error>;
