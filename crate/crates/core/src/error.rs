use thiserror::Error;

/// Every failure the library can report.
///
/// Variants split into two families: input validation problems and
/// numerical failures. The CLI maps them onto exit codes 2 and 3.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("closure violation: {0}")]
    ClosureViolation(String),
    #[error("purity violation: {0}")]
    PurityViolation(String),
    #[error("metric unrealizable: {0}")]
    MetricUnrealizable(String),
    #[error("degenerate simplex: {0}")]
    DegenerateSimplex(String),
    #[error("degree {degree} out of range for a complex of dimension {dim}")]
    DegreeOutOfRange { degree: usize, dim: usize },
    #[error("degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("complex is not orientable: {0}")]
    NotOrientable(String),
    #[error("complex cannot be written in the text format: {0}")]
    NotSimplicial(String),
    #[error("point is not inside the simplex")]
    PointNotInSimplex,
    #[error("mass matrix is not positive definite: {0}")]
    SingularMass(String),
    #[error("no positive eigenvalue: {0}")]
    NoPositiveEigenvalue(String),
    #[error("no ambient chart available: {0}")]
    ChartUnavailable(String),
    #[error("empty point set")]
    EmptyPointSet,
    #[error("chain is not a cycle (boundary residual {0:e})")]
    NotACycle(f64),
    #[error("cycle is not a boundary")]
    NotABoundary,
    #[error("slope is not rational: {0}")]
    IrrationalSlope(String),
    #[error("degenerate geodesic: {0}")]
    DegenerateGeodesic(String),
    #[error("cochain is not coexact (kernel fraction {0:e})")]
    NotCoexact(f64),
    #[error("coefficient {0} is not rational within tolerance")]
    NotRational(f64),
    #[error("operation requires a 3-dimensional complex, got dimension {0}")]
    DimensionNot3(usize),
    #[error("complex is disconnected")]
    Disconnected,
    #[error("zero homology class")]
    ZeroClass,
    #[error("class has no component along the dominant eigenvector")]
    DegenerateClass,
    #[error("constant `{0}` must be positive")]
    NonPositiveConstant(String),
    #[error("linear program too large for exact mode ({0} variables, limit 200)")]
    ProblemTooLarge(usize),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// True for input validation errors, false for numerical failures.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::SingularMass(_)
                | Error::NoPositiveEigenvalue(_)
                | Error::Numerical(_)
                | Error::DegenerateSimplex(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
