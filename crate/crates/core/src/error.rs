use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid degree distribution: {0}")]
    InvalidDistribution(String),

    #[error("infeasible ensemble: {0}")]
    Infeasible(String),

    #[error("parity-check matrix is rank deficient: rank {rank} < {checks} checks")]
    RankDeficient { rank: usize, checks: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    /// A check with no remaining neighbors carries parity one. Impossible for a
    /// consistent erasure pattern, so it means the graph or its parities are corrupt.
    #[error("parity contradiction at check {check}")]
    Contradiction { check: usize },

    #[error("check {check} has degree {degree}, expected {expected}")]
    BadCheckDegree {
        check: usize,
        degree: usize,
        expected: usize,
    },

    #[error("iteration cap {0} exceeded")]
    IterationCap(usize),

    #[error("unresolved variables remain: {0:?}")]
    Unresolved(Vec<usize>),

    #[error("no BP stall at eps={eps} (threshold {threshold})")]
    NoStall { eps: f64, threshold: f64 },

    #[error("degenerate r1 curve: {0}")]
    Degenerate(String),

    #[error("integrator blowup at t={t}: {what}")]
    StepSize { t: f64, what: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
