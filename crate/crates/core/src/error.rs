use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("empty coefficient list")]
    EmptyInput,
    #[error("all coefficients are zero")]
    AllZero,
    #[error("malformed coefficient #{index}: {token:?}")]
    MalformedToken { index: usize, token: String },
    #[error("unknown constant {0:?}")]
    UnknownConstant(String),
    #[error("certificate unavailable: {0}")]
    CertificateUnavailable(String),
    #[error("precision failure in inner sum j={j} after retry")]
    PrecisionFailure { j: usize },
    #[error("N={n} exceeds the configured cap {cap}")]
    TooManyTerms { n: usize, cap: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: form has {expected} coefficients, point has {got}")]
    DimensionMismatch { expected: usize, got: usize },
}
