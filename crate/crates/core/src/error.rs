use num_bigint::BigInt;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("not coprime: {0} has no inverse modulo {1}")]
    NotCoprime(BigInt, BigInt),
    #[error("factorization incomplete: unfactored cofactor {0}")]
    FactorizationIncomplete(BigInt),
    #[error("reversal degree too small: degree {degree} exceeds {n}")]
    ReversalDegreeTooSmall { degree: usize, n: usize },
    #[error("singular matrix")]
    SingularMatrix,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("discriminant of a constant polynomial")]
    ConstantPolynomial,
    #[error("even-prime-only test called with p = {0}")]
    EvenPrimeOnly(BigInt),
    #[error("polynomial is not in F2[x^2]")]
    NotInKx2,
    #[error("singular curve: disc(4P + Q^2) = 0")]
    SingularCurve,
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("not reducible: coefficient of x^{0} in Q is odd")]
    NotReducible(usize),
    #[error("non-integral result: {0}")]
    NonIntegral(String),
    #[error("not normalized at {0}")]
    NotNormalized(BigInt),
    #[error("not a pointed equation: {0}")]
    PointedShape(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("oracle timeout: {0}")]
    OracleTimeout(String),
    #[error("internal error: {0}")]
    Internal(String),
}
