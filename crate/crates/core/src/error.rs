use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("scalar moduli differ")]
    ModulusMismatch,
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("element is not invertible modulo the given polynomial")]
    NoInverse,
    #[error("cyclotomic index {0} out of range 1..=30")]
    CyclotomicOutOfRange(u32),
    #[error("ring presentations differ")]
    PresentationMismatch,
    #[error("series argument has a nonzero constant term")]
    NonzeroConstantTerm,
    #[error("element is not a unit")]
    NotAUnit,
    #[error("exponent vector {0:?} does not fit the ring presentation")]
    ExponentOutOfRange(Vec<u32>),
    #[error("expected {expected} entries, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("invalid factor index set: {0}")]
    InvalidIndexSet(String),
    #[error("total Chern class must have constant term 1")]
    ChernNotNormalized,
    #[error("series must have constant coefficient 1")]
    SeriesNotNormalized,
    #[error("malformed Chern root: {0}")]
    MalformedRoot(String),
    #[error("malformed eigen-line data: {0}")]
    MalformedEigenLine(String),
    #[error("morphism data is inconsistent: {0}")]
    InvalidMorphism(String),
    #[error("localization criterion failed: {0}")]
    LocalizationFailure(String),
    #[error("truncation orders differ")]
    TruncationMismatch,
    #[error("matrix is not strictly upper triangular")]
    NotStrictlyUpperTriangular,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
