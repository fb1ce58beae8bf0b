use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("leading coefficient {0:e} is too close to zero to invert")]
    SingularLeadingCoefficient(f64),
    #[error("fractional power {exponent} of negative real base {base}; promote to complex first")]
    NegativeBaseRealFractionalPower { base: f64, exponent: f64 },
    #[error("index {index} out of range for order {order}")]
    IndexOutOfRange { index: usize, order: usize },
    #[error("matrix dimension {0} is below the minimum of 2")]
    DimensionTooSmall(usize),
    #[error("degree {degree} exceeds the supported maximum {max}")]
    DegreeTooLarge { degree: usize, max: usize },
    #[error("width parameter must be positive, got {0}")]
    NonpositiveWidth(f64),
    #[error("denominator 1 + a x^2 vanishes at x = {0}")]
    SingularDenominator(f64),
    #[error("1 + 4 tau a = {0} is not positive; the real branch does not exist")]
    BranchViolation(f64),
    #[error("{function} is undefined at {argument}")]
    DomainError {
        function: &'static str,
        argument: String,
    },
    #[error("{function} is not differentiable at {argument}")]
    NonDifferentiablePoint {
        function: &'static str,
        argument: String,
    },
    #[error("syntax error at offset {offset}: expected {expected}")]
    Syntax { offset: usize, expected: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("finite differences support derivative orders 1..=4, got {0}")]
    UnsupportedOrder(usize),
    #[error("adaptive quadrature exceeded depth {0} without meeting tolerance")]
    MaxDepthExceeded(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn domain(function: &'static str, argument: impl std::fmt::Debug) -> Self {
        Error::DomainError {
            function,
            argument: format!("{argument:?}"),
        }
    }
}
