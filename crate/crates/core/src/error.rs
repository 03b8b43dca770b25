use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("journal id {id} out of range for {n} journals")]
    UnknownJournal { id: usize, n: usize },

    #[error("unknown journal name `{0}`")]
    UnknownName(String),

    #[error("duplicate journal name `{0}`")]
    DuplicateName(String),

    #[error("conflicting metadata rows for journal `{0}`")]
    MetadataConflict(String),

    #[error("indicator undefined: {0}")]
    Undefined(&'static str),

    #[error("invalid weights: {0}")]
    InvalidWeights(&'static str),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("probability vector sums to {sum}, expected 1")]
    NotNormalized { sum: f64 },

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(&'static str),

    #[error("not enough observations: need {needed}, have {have}")]
    TooFewObservations { needed: usize, have: usize },

    #[error("requested {requested} factors but correlation matrix has rank {rank}")]
    Rank { requested: usize, rank: usize },

    #[error("column length mismatch: expected {expected}, got {got}")]
    ColumnLength { expected: usize, got: usize },

    #[error("unknown column `{0}`")]
    UnknownColumn(String),

    #[error("empty input: {0}")]
    Empty(&'static str),
}

impl Error {
    /// True for failures of numerical routines (as opposed to bad input data).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Overflow(_) | Error::UndefinedCorrelation(_) | Error::Rank { .. } | Error::NotNormalized { .. }
        )
    }
}
