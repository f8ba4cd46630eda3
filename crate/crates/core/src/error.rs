use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("valuation of zero undefined")]
    ValuationOfZero,
    #[error("{0} is not prime")]
    NotPrime(String),
    #[error("{what} out of range: {detail}")]
    OutOfRange { what: &'static str, detail: String },
    #[error("guard exceeded: {what} = {size} (limit {limit})")]
    Guard {
        what: &'static str,
        size: String,
        limit: String,
    },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("duplicate interpolation point {0}")]
    DuplicatePoint(String),
    #[error("denominator {den} not invertible modulo {modulus}")]
    NotInvertible { den: String, modulus: String },
    #[error("denominator {den} divisible by the context prime {p}")]
    NotPLocal { den: String, p: String },
    #[error("no distribution exists: N = {n} outside [{lo}, {hi}]")]
    NoDistribution { n: i64, lo: i64, hi: i64 },
    #[error("incongruence certificate violated: {0}")]
    IncongruenceViolated(String),
    #[error("delta numerator not p-integral: coefficient {0}")]
    DeltaNotIntegral(String),
    #[error("polynomial has a constant term")]
    ConstantTerm,
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(String, String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn guard(what: &'static str, size: impl ToString, limit: impl ToString) -> Error {
    Error::Guard {
        what,
        size: size.to_string(),
        limit: limit.to_string(),
    }
}
