use thiserror::Error;

/// Everything that can go wrong inside the library.
///
/// Variants map onto the CLI exit-code contract: every variant is a
/// domain error (exit code 1); usage errors never reach this type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("field context mismatch: Q(sqrt(-{left})) vs Q(sqrt(-{right}))")]
    FieldMismatch { left: u64, right: u64 },

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("infinite valuation: the element is zero")]
    InfiniteValuation,

    #[error("zero input: {0}")]
    ZeroInput(String),

    #[error("not integral: {0}")]
    NotIntegral(String),

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("prime factor {0} exceeds the supported range")]
    PrimeTooLarge(String),

    #[error("equation does not hold: {0}")]
    EquationNotSatisfied(String),

    #[error("singular curve: {0}")]
    SingularCurve(String),

    #[error("unclassified: {0}")]
    Unclassified(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("solution not in W_K: {0}")]
    NotInWk(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("contradiction: {0}")]
    Contradiction(String),

    #[error("not a T_K-unit: {0}")]
    NotTkUnit(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("form not eliminated: {0}")]
    FormNotEliminated(String),

    #[error("schema violation at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }
}
