use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("no value assigned to symbol `{0}`")]
    MissingAssignment(String),
    #[error("denominator is the zero polynomial")]
    ZeroDenominator,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("malformed JSON at line {line}, column {column}: {msg}")]
    Json { line: usize, column: usize, msg: String },
    #[error("invalid equation: {0}")]
    InvalidEquation(String),
    #[error("invalid candidate: {0}")]
    InvalidCandidate(String),
    #[error("term {0} is not an exact derivative")]
    NotExactDerivative(String),
    #[error("no positive integer m balances the equation: {0}")]
    NoBalance(String),
    #[error("Newton iteration did not converge from any of {restarts} restarts")]
    NoConvergence { restarts: usize },
    #[error("branch denominator vanishes at xi = {xi}")]
    Pole { xi: f64 },
    #[error("phi vanishes at xi = {xi} while the profile has negative powers")]
    PhiZero { xi: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid branch: {0}")]
    InvalidBranch(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json {
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        }
    }
}
