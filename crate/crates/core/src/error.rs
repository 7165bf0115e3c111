use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("variable x{index} out of range for chart dimension {dim}")]
    VariableOutOfRange { index: usize, dim: usize },

    #[error("parameter #{0} has no value")]
    UnboundParameter(usize),

    #[error("metric is not positive definite at {point:?}")]
    SingularMetric { point: Vec<f64> },

    #[error("covariant derivative not supported for valence {0}")]
    UnsupportedValence(String),

    #[error("two-form fails antisymmetry by {0:e}")]
    NotAntisymmetric(f64),

    #[error("structure is not contact metric (residual {residual:e})")]
    NotContactMetric { residual: f64 },

    #[error("unknown condition `{0}`")]
    UnknownCondition(String),

    #[error("base structure fails the axioms (residual {residual:e})")]
    AxiomFailure { residual: f64 },

    #[error("family degenerate: {rejected} of {total} samples fail the axioms")]
    FamilyDegenerate { rejected: usize, total: usize },

    #[error("{what}: expected {expected}, found {found}")]
    DimensionMismatch { what: String, expected: usize, found: usize },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl Error {
    /// Errors caused by evaluating a well-formed structure, as opposed to
    /// malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Domain(_) | Error::SingularMetric { .. } | Error::NotAntisymmetric(_)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownIdentifier,
    DimensionMismatch,
    NonOddDimension,
}

/// A located parse failure. Lines and columns are 1-based.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
    /// Tokens that would have been accepted (syntax errors only).
    pub expected: Vec<String>,
}
