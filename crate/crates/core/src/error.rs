use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("invalid Katz block size {0}: must be 1, 2 or odd")]
    InvalidKatzBlock(usize),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("not a bistochastic matrix: {0}")]
    NotBistochastic(String),

    #[error("not a correlation matrix: {0}")]
    NotCorrelation(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("dimension {n} exceeds the cap of {cap}")]
    DimensionCap { n: usize, cap: usize },

    #[error("simplex iteration cap of {0} exceeded")]
    IterationCap(usize),

    #[error("map is not self-dual (Choi deviation {deviation:.3e})")]
    NotSelfDual { deviation: f64 },

    #[error("map does not fix diagonal matrices (deviation {deviation:.3e})")]
    NotDiagonalFixing { deviation: f64 },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("malformed input: {0}")]
    Input(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code: 2 for invalid input, 3 for resource caps.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DimensionCap { .. } | Error::IterationCap(_) => 3,
            _ => 2,
        }
    }
}
