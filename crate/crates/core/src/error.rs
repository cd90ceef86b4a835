use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{what} = {value} exceeds the configured ceiling {ceiling}")]
    CeilingExceeded {
        what: &'static str,
        value: u128,
        ceiling: u128,
    },

    #[error("zero has no inverse or discrete logarithm")]
    ZeroElement,

    #[error("prime {prime} in P({h}) divides coefficient {coefficient}")]
    ExceptionalPrimeDivides { prime: u64, h: usize, coefficient: i64 },

    #[error("gcd(q^h - 1, c_{index}) = {gcd} for q = {q}, c_{index} = {coefficient}")]
    NotAdmissible {
        q: u64,
        index: usize,
        coefficient: i64,
        gcd: u64,
    },

    #[error("element {value} lies outside the box [-{bound}, {bound}]")]
    BoxBoundViolated { value: i64, bound: i64 },

    #[error("declared multiplicity {declared} is below the measured multiplicity {measured}")]
    MultiplicityMismatch { declared: u64, measured: u64 },

    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

impl Error {
    /// Stable machine-readable code, used by the command-line tool.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::CeilingExceeded { .. } => "ceiling_exceeded",
            Error::ZeroElement => "zero_element",
            Error::ExceptionalPrimeDivides { .. } => "exceptional_prime",
            Error::NotAdmissible { .. } => "not_admissible",
            Error::BoxBoundViolated { .. } => "box_bound_violated",
            Error::MultiplicityMismatch { .. } => "multiplicity_mismatch",
            Error::VerificationFailed(_) => "verification_failed",
        }
    }

    /// Process exit status: 1 verification failed, 2 invalid input, 3 ceiling exceeded.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::VerificationFailed(_) | Error::MultiplicityMismatch { .. } => 1,
            Error::CeilingExceeded { .. } => 3,
            _ => 2,
        }
    }
}
