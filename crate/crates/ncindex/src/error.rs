use thiserror::Error;

/// Errors shared across the numeric layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("input not Hermitian within tolerance: {0}")]
    NonHermitianInput(String),
    #[error("iteration failed to converge: {0}")]
    NonConvergence(String),
    #[error("function undefined on spectrum: {0}")]
    DomainError(String),
    #[error("Schatten exponent must be >= 1, got {0}")]
    InvalidExponent(f64),
    #[error("evaluation at a pole: {0}")]
    PoleError(String),
    #[error("heat trace has no asymptotic growth over the window: {0}")]
    DegenerateWindow(String),
    #[error("ill-conditioned fit, condition number {0:.3e}")]
    IllConditionedFit(f64),
    #[error("resolvent parameter inside spectrum: {0}")]
    SingularResolvent(String),
    #[error("symbol degree exceeds truncation: {0}")]
    DegreeOverflow(String),
    #[error("unsupported lattice dimension {0}")]
    InvalidDimension(usize),
    #[error("deformation parameter must be positive, got {0}")]
    InvalidTheta(f64),
    #[error("doubling mass must be positive, got {0}")]
    InvalidMu(f64),
    #[error("zero in the spectrum, phase undefined: {0}")]
    SingularPhase(String),
    #[error("operator is not an involution: {0}")]
    NotAnInvolution(String),
    #[error("parity mismatch: {0}")]
    ParityMismatch(String),
    #[error("cannot lower arity below zero")]
    ArityUnderflow,
    #[error("not idempotent: {0}")]
    NotIdempotent(String),
    #[error("not unitary: {0}")]
    NotUnitary(String),
    #[error("no zeta model available for coefficient operator: {0}")]
    MissingZetaModel(String),
    #[error("singular values cluster near the kernel threshold: {0}")]
    AmbiguousGap(String),
    #[error("contour abscissa outside the admissible interval: {0}")]
    ContourViolation(String),
    #[error("heat-fit model unfit: {0}")]
    UnfitModel(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
