use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("not invertible at this precision: {0}")]
    NotInvertible(String),

    #[error("undecidable at precision {precision}: {what}")]
    UndecidableAtPrecision { what: String, precision: u32 },

    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error("lattice containment violated: {0}")]
    Containment(String),

    #[error("rank mismatch: {0}")]
    Rank(String),

    #[error("precision-degenerate pivot (valuation {valuation} at precision {precision})")]
    DegeneratePivot { valuation: u32, precision: u32 },

    #[error("cache error: {0}")]
    Cache(String),

    #[error("unknown check id: {0}")]
    UnknownCheck(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}
