use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum Error {
    #[error("not invertible")]
    NotInvertible,

    #[error("negative exponent of {var} under a non-monomial image")]
    NegativeExponent { var: &'static str },

    #[error("zero assigned to variable {var} occurring with negative exponent")]
    ZeroToNegativePower { var: &'static str },

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("state sum too large: {crossings} classical crossings exceeds limit {limit}")]
    StateSumTooLarge { crossings: usize, limit: usize },

    #[error("crossing {id} not found or not classical")]
    NoSuchClassicalCrossing { id: usize },

    #[error("incomplete smoothing state: crossing {id} has no choice")]
    IncompleteState { id: usize },

    #[error("graph construction unsupported; use diagram oracle")]
    UnsupportedGraph,

    #[error("edge label outside {{+, 0}}")]
    BadEdgeLabel,

    #[error("stray variable {var} in Tutte polynomial")]
    StrayVariable { var: &'static str },

    #[error("degenerate family parameter: {msg}")]
    BadFamilyParameter { msg: String },

    #[error("parity defined for knots only")]
    ParityKnotsOnly,

    #[error("root finding on the zero polynomial")]
    ZeroPolynomialRoots,

    #[error("unsupported family for this operation: {id}")]
    UnsupportedFamily { id: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
