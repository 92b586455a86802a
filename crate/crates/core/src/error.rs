use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("ragged input: matrix {0} is not {1}x{1}")]
    RaggedInput(usize, usize),
    #[error("tuple must contain at least one matrix")]
    EmptyTuple,
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero polynomial has no roots")]
    ZeroPolynomial,
    #[error("invalid rational literal: {0:?}")]
    BadRational(String),
    #[error("transform matrix is singular")]
    SingularTransform,
    #[error("eigenvalue iteration failed to converge for a {0}x{0} matrix")]
    NonConvergence(usize),
    #[error("interpolation samples inconsistent with a degree-{degree} polynomial (residual {residual:.3e})")]
    InterpolationInconsistent { degree: usize, residual: f64 },
    #[error("no integer shift in 1..={0} makes every matrix invertible")]
    ShiftSearchFailed(i64),
    #[error("branch multiplicity profile inconsistent across directions: {0}")]
    MultiplicityProfile(String),
    #[error("branch collision unresolved on path segment {segment} (min gap {gap:.3e})")]
    PathCollision { segment: usize, gap: f64 },
    #[error("component degrees and multiplicities do not account for the matrix size: {0}")]
    DecompositionInconsistent(String),
    #[error("tuple not admissible for subset {0:?}: projection normalization constant vanishes")]
    NotAdmissibleForSubset(Vec<usize>),
    #[error("contour too close to an excluded eigenvalue; try radius <= {suggested:.6}")]
    ContourTooTight { suggested: f64 },
    #[error("ill-conditioned projection: eigenvalue of P*P^* in the dead zone near {0:.3e}")]
    IllConditionedProjection(f64),
    #[error("trivial subspace (rank {0} of {1})")]
    TrivialSubspace(usize, usize),
    #[error("size cap exceeded: N={n}, n={nvars} (cap N<={cap_n}, n<={cap_vars})")]
    SizeCapExceeded {
        n: usize,
        nvars: usize,
        cap_n: usize,
        cap_vars: usize,
    },
    #[error("no admissible transformation found in {tries} tries: {last}")]
    AdmissibleSamplingFailed { tries: usize, last: String },
    #[error("certificate disagreement: {0}")]
    CertificateDisagreement(String),
    #[error("too many components for subset enumeration: {0} > {1}")]
    TooManyComponents(usize, usize),
    #[error("self-adjoint criterion requires a self-adjoint tuple")]
    ModeMismatch,
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
