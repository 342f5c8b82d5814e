use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("characteristic {0} exceeds the 2^31 trial-division cap")]
    CharacteristicTooLarge(u64),
    #[error("modulus is reducible over GF({p})")]
    ReducibleModulus { p: u64 },
    #[error("expected a monic modulus of degree {expected}, got degree {got}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("{0} is not a primitive element")]
    NotPrimitive(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("operation is undefined at zero")]
    ZeroInput,
    #[error("field of order {order} exceeds the limit {limit}")]
    FieldTooLarge { order: u128, limit: u64 },
    #[error("domain of size {size} exceeds the limit {limit}")]
    DomainTooLarge { size: u64, limit: u64 },
    #[error("set of size {size} exceeds the limit {limit}")]
    SetTooLarge { size: u64, limit: u64 },
    #[error("empty domain")]
    EmptyDomain,
    #[error("polynomial is constant")]
    ConstantPolynomial,
    #[error("degree {degree} exceeds the supported bound {limit}")]
    DegreeTooHigh { degree: u64, limit: u64 },
    #[error("expected characteristic {expected}, got {got}")]
    WrongCharacteristic { expected: String, got: u64 },
    #[error("element is not in the subfield GF({sub_order})")]
    NotInSubfield { sub_order: u64 },
    #[error("{0} does not divide the extension degree")]
    NotASubfield(usize),
    #[error("invalid element: {0}")]
    InvalidElement(String),
    #[error("singular matrix")]
    SingularMatrix,
    #[error("hypothesis `{hypothesis}` violated (witness: {witness})")]
    HypothesisViolated { hypothesis: &'static str, witness: String },
    #[error("diagram hypotheses not verified: {0}")]
    HypothesesNotVerified(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("size gate exceeded: {0}")]
    GateExceeded(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn hypothesis(hypothesis: &'static str, witness: impl Into<String>) -> Self {
        Error::HypothesisViolated { hypothesis, witness: witness.into() }
    }
}
