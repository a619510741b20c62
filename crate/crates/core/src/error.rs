use thiserror::Error;

/// Everything that can go wrong across the lab.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degree sequence is empty")]
    EmptySequence,

    #[error("vertex {index} has degree {degree}; every degree must be at least 1")]
    ZeroOrNegativeDegree { index: usize, degree: i64 },

    #[error("total degree {total} is odd; half-edges cannot be paired")]
    OddTotalDegree { total: u64 },

    #[error("degree {degree} of vertex {index} does not fit in 32 bits")]
    DegreeOverflow { index: usize, degree: i64 },

    #[error("infeasible targets: {0}")]
    InfeasibleTargets(String),

    #[error("series diverge: need 2*p2 < d, got p2 = {p2}, d = {d}")]
    SeriesDivergence { p2: f64, d: f64 },

    #[error("nu is infinite (exceeds cap); simplicity formulas do not apply")]
    NuInfinite,

    #[error("product undefined: 2*n1 = {} exceeds total degree {ell}", 2 * .n1)]
    InfeasibleProduct { n1: u64, ell: u64 },

    #[error("total degree {ell} exceeds enumeration cap {cap}")]
    TooLarge { ell: u64, cap: u64 },

    #[error("vertex {vertex}: prescribed degree {expected}, realized degree {realized}")]
    DegreeMismatch {
        vertex: usize,
        expected: u32,
        realized: u64,
    },

    #[error("conditioning on simplicity rejected all {replicates} replicates")]
    ZeroAcceptedSamples { replicates: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
