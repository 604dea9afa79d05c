use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("ball does not meet the domain")]
    EmptyIntersection,

    #[error("ball meets the domain in a set of zero measure")]
    DegenerateBall,

    #[error("sample point {0} lies outside the domain")]
    SampleOutsideDomain(String),

    #[error("Luxemburg bracket search exhausted its cap of 2^{0}")]
    BracketExhausted(u32),

    #[error("every grid value is infinite")]
    AllInfinite,

    #[error("gauge set does not contain 0 in its interior: {0}")]
    InteriorCheck(String),

    #[error("envelope window too small: {0}")]
    WindowTooSmall(String),

    #[error("enumeration cap exceeded: {0}")]
    EnumerationCap(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("out of scope: {0}")]
    OutOfScope(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
