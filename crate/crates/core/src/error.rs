use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("p = {0} is not an odd prime")]
    InvalidPrime(u64),
    #[error("extension degree must be at least 1")]
    InvalidDegree,
    #[error("field order {order} exceeds the configured bound {limit}")]
    FieldTooLarge { order: u128, limit: u64 },
    #[error("minimal polynomial {0:?} must be monic of degree a with entries in [0, p)")]
    MalformedMinPoly(Vec<u64>),
    #[error("minimal polynomial {poly:?} is reducible over F_{p}")]
    ReducibleMinPoly { poly: Vec<u64>, p: u64 },
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("element {0:?} does not belong to this field")]
    ForeignElement(Vec<u64>),
    #[error("precision N = {n} must be at least 1 (p = {p})")]
    InvalidPrecision { n: u32, p: u64 },
    #[error("p^N = {p}^{n} does not fit the 40-bit residue bound")]
    ModulusTooLarge { p: u64, n: u32 },
    #[error("substitution requires a unit, got {0:?}")]
    NonUnit(Vec<u64>),
    #[error("lambda must be nonzero")]
    ZeroLambda,
    #[error("degree {d} of f is not coprime to p = {p}")]
    DegreeNotCoprime { d: usize, p: u64 },
    #[error("f must have zero constant term here")]
    ConstantTerm,
    #[error("splitting table reaches x^{have}, the matrix needs x^{need}")]
    TruncationTooShort { have: usize, need: usize },
    #[error("Artin-Hasse coefficient u_{0} is not p-integral")]
    NotIntegral(usize),
    #[error("polygon needs exact points at both endpoints")]
    MissingEndpoint,
    #[error("cannot compare uncertified polygons")]
    Uncertified,
    #[error("enumerating {size} field elements exceeds the oracle bound {limit}; use the Dwork pipeline")]
    OracleTooLarge { size: u128, limit: u64 },
    #[error("inexact division by {0} in Z[zeta_p]")]
    InexactDivision(u64),
    #[error("L-polynomial has a nonzero coefficient at s^{index} beyond degree {degree}")]
    DegreeMismatch { degree: usize, index: usize },
    #[error("operation is only defined on the reduced ring T")]
    FormalRing,
}
