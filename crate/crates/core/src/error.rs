use thiserror::Error;

pub type Result<T> = std::result::Result<T, VarregError>;

#[derive(Debug, Error)]
pub enum VarregError {
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("index set mismatch: {0}")]
    IndexSetMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty grid or sample set: {0}")]
    Empty(String),

    #[error("level {level} has non-uniform operator weights; the level-wise prox needs a constant weight per level")]
    NonuniformLevelWeight { level: usize },

    #[error("oracle is capped at {cap} coordinates, got {n}")]
    DimensionCap { n: usize, cap: usize },

    #[error("parameter search failed to bracket the discrepancy window after {expansions} expansions")]
    BracketFail { expansions: usize },

    #[error("divergence: {0}")]
    Divergence(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl VarregError {
    /// Numeric failures map to CLI exit code 2, everything else to 1.
    pub fn is_numeric_failure(&self) -> bool {
        matches!(self, VarregError::BracketFail { .. } | VarregError::Divergence(_))
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        VarregError::InvalidParameter(msg.into())
    }
}
