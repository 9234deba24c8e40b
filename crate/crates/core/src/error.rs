use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero denominator in rational function")]
    ZeroDenominator,
    #[error("variable {0} does not occur where required")]
    UnknownVariable(String),
    #[error("insertion points must be pairwise distinct (got repeated {0})")]
    RepeatedPoint(String),
    #[error("series cutoff mismatch: {0} vs {1}")]
    CutoffMismatch(i64, i64),
    #[error("cannot set rho to zero: negative power of handle {0} present")]
    NegativeRhoPower(usize),
    #[error("state is not quasiprimary; decompose it into translation descendants of quasiprimary states and reduce each descendant")]
    NotQuasiprimary,
    #[error("mode index out of the admissible range: {0}")]
    ModeOutOfRange(String),
    #[error("limit-point list must contain {expected} pairwise distinct points, got {got}")]
    BadKernelNodes { expected: usize, got: usize },
    #[error("Gram matrix is singular at weight {0}")]
    SingularGram(u32),
    #[error("linear system is singular or inconsistent")]
    SingularSystem,
    #[error("sewing parameter rho must be nonzero on handle {0}")]
    ZeroRho(usize),
    #[error("isometric circles overlap or touch: handles {0} and {1}")]
    CirclesOverlap(usize, usize),
    #[error("spectral radius estimate {0} is not below the contraction threshold {1}")]
    SpectralRadius(f64, f64),
    #[error("Vandermonde solve is ill-conditioned (condition estimate {0:.3e})")]
    IllConditioned(f64),
    #[error("weights must match: {0} vs {1}")]
    WeightMismatch(i64, i64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }
}
