use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("not a unit modulo {p}: {value}")]
    NonUnit { value: String, p: u64 },

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("degenerate polytope: support spans dimension {dim} < {n}")]
    Degenerate { dim: usize, n: usize },

    #[error("origin is not an interior point of the polytope")]
    OriginNotInterior,

    #[error("{0} is not a vertex")]
    NotAVertex(String),

    #[error("variable count mismatch: {0} vs {1}")]
    VariableMismatch(usize, usize),

    #[error("Hasse-Witt condition fails: det = {det} mod {p}")]
    HasseWitt { det: String, p: u64 },

    #[error("incompatible Frobenius lift: {0}")]
    IncompatibleLift(String),

    #[error("non-integral coefficient: {0}")]
    NonIntegral(String),

    #[error("linear system is rank deficient: {pivots} pivots for {unknowns} unknowns")]
    RankDeficient { pivots: usize, unknowns: usize },

    #[error("residual does not vanish: {0}")]
    Residual(String),

    #[error("log terms survive in the Yukawa coupling: {0}")]
    ResidualLog(String),

    #[error("operator is not of maximal unipotent monodromy at t = 0")]
    NotMum,

    #[error("unknown or unsupported preset: {0}")]
    UnknownPreset(String),

    #[error("truncation too small: {0}")]
    Truncation(String),

    #[error("prime p = {0} is excluded here")]
    ExcludedPrime(u64),

    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
