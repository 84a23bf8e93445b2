use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("p must be an odd prime (got {0})")]
    NotOddPrime(u64),
    #[error("level must be at least 1")]
    LevelZero,
    #[error("parameters out of range: {0}")]
    OutOfRange(String),
    #[error("{a} is not invertible modulo {m}")]
    NotCoprime { a: u64, m: u64 },
    #[error("class index {index} out of range 0..{bound}")]
    IndexOutOfRange { index: u64, bound: u64 },
    #[error("insufficient data: have {have} bits, need at least {need}")]
    InsufficientData { have: usize, need: usize },
    #[error("field degree {0} outside supported range 1..={max}", max = crate::gf2::MAX_DEGREE)]
    DegreeOutOfRange(usize),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("zero has no multiplicative order")]
    ZeroOrder,
    #[error("field elements belong to different contexts")]
    ContextMismatch,
    #[error("{m} does not divide 2^{degree} - 1")]
    NotDivisor { m: u64, degree: usize },
    #[error("element order does not divide {bound}")]
    OrderNotDividing { bound: u64 },
    #[error("invalid trace degrees: Tr_{k}^{n} inside GF(2^{ambient})")]
    TraceDegrees { n: usize, k: usize, ambient: usize },
    #[error("element is not in the subfield of degree {0}")]
    NotInSubfield(usize),
    #[error(
        "p={p} is a Wieferich prime (lambda={lambda}, t0={t0}): defining/trace construction unsupported, detection only"
    )]
    Wieferich { p: u64, lambda: u64, t0: u32 },
    #[error("requires r >= 2 (got r={0}); enable the extended mode for r = 1")]
    LevelTooSmall(u32),
    #[error("evaluation at u={u} produced a non-bit field element")]
    NonBit { u: u64 },
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
