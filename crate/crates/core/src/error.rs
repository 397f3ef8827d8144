use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("state is not physical at this truncation: tail mass {tail:.3e} exceeds guard {guard:.1e}")]
    NonPhysicalState { tail: f64, guard: f64 },

    #[error("expectation value of a Hermitian operator has imaginary part {0:.3e}")]
    ComplexExpectation(f64),

    #[error("series did not converge after {terms} terms")]
    DivergentSeries { terms: usize },

    #[error("lower parameter c = {0} is a pole of the series")]
    PoleAtC(f64),

    #[error("invalid representation parameter: {0}")]
    InvalidRepParameter(String),

    #[error("zero parameter: {0}")]
    ZeroParameter(&'static str),

    #[error("no normalizable solution: {0}")]
    NonNormalizable(String),

    #[error("parameter outside the unit disk: |xi| = {0}")]
    OutOfDisk(f64),

    #[error("eigenvalue equation has no solution in the truncated space (last-row residual {0:.3e})")]
    NoSolutionInTruncation(f64),

    #[error("invalid Bogoliubov pair: {0}")]
    InvalidBogoliubov(String),

    #[error("invalid squeeze frame: |u|^2 - |v|^2 = {0}")]
    InvalidFrame(f64),

    #[error("matrix too large for principal-minor enumeration: n = {0} (max 8)")]
    TooLarge(usize),

    #[error("singular transformation")]
    SingularTransform,

    #[error("degenerate frame: |u| = |v|")]
    DegenerateFrame,

    #[error("singular frame matrix")]
    SingularFrameMatrix,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("uncertainty matrix is not positive definite")]
    SingularSigma,

    #[error("scale parameter is zero or negative")]
    ZeroScale,

    #[error("zero denominator in g-functional")]
    ZeroDenominator,

    #[error("characteristic coefficient is not positive: {0}")]
    NonPositiveCoefficient(f64),

    #[error("initial data violate the Wronskian condition: drift {0:.3e}")]
    WronskianViolation(f64),

    #[error("time step too large: omega*dt = {0}")]
    StepTooLarge(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
