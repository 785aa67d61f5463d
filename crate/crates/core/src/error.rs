use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// Variants map one-to-one onto the failure modes of the public
/// operations; the CLI turns them into exit codes via [`Error::exit_code`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("polynomial is reducible over Q: {0}")]
    ReduciblePolynomial(String),
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("element is zero")]
    ZeroElement,
    #[error("inputs are equal")]
    EqualInputs,
    #[error("no simple root modulo {0}")]
    NoSimpleRoot(u64),
    #[error("prime {p} divides the discriminant of the defining polynomial{}", level.map(|l| format!(" (tower level {l})")).unwrap_or_default())]
    IndexPrime { p: u64, level: Option<usize> },
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("bad prime {0} for this curve")]
    BadPrime(u64),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("singular curve (discriminant zero)")]
    SingularCurve,
    #[error("point is not on the curve")]
    NotOnCurve,
    #[error("points lie on different curves or fields")]
    Mismatch,
    #[error("point at infinity has no affine height")]
    InfinityPoint,
    #[error("coordinate blowup: {0}")]
    CoordinateBlowup(String),
    #[error("fewer than two usable reduction places below {0}")]
    InsufficientPrimes(u64),
    #[error("dimension error: {0}")]
    DimensionError(String),
    #[error("no kernel vector")]
    NoKernel,
    #[error("section vanishes identically on the image up to order {0}")]
    IdenticallyZeroOnImage(usize),
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("all jet coefficients vanish up to order {0}")]
    AllZero(usize),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::PrecisionExhausted(_) => 3,
            Error::CapExceeded(_) | Error::CoordinateBlowup(_) | Error::SearchExhausted(_) => 4,
            Error::Config(_) | Error::Io(_) => 2,
            _ => 1,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}
