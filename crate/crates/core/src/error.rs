use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(
        "design matrix is rank deficient (column `{column}` is collinear with earlier columns)"
    )]
    RankDeficient { column: String },

    #[error("non-finite working weights or linear predictor during IRLS")]
    NonFiniteWeights,

    #[error("constructed column `{column}` is constant")]
    DegenerateColumn { column: String },

    #[error("no admissible split threshold for covariate {variable}")]
    EmptyGrid { variable: usize },

    #[error("every split candidate was degenerate")]
    AllCandidatesDegenerate,

    #[error("{failed} of {n} LOOCV folds failed")]
    TooManyFailedFolds { failed: usize, n: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
