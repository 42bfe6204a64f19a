use thiserror::Error;

/// Every failure the library can report.
///
/// Variants marked "bug signal" correspond to identities that are theorems:
/// seeing one means the implementation (or the floating point budget) broke,
/// not that the input was bad.
#[derive(Debug, Error)]
pub enum Error {
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("polynomial is not real-rooted (imaginary residual {residual_imag:e})")]
    NotRealRooted { residual_imag: f64 },
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("size gate exceeded: {0}")]
    SizeLimitExceeded(String),
    #[error("rank {rank} exceeds the allowed {k}")]
    RankTooHigh { rank: usize, k: usize },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig:e})")]
    NotPsd { min_eig: f64 },
    #[error("invalid instance: {0}")]
    InstanceInvalid(String),
    #[error("psi is not divisible by x^{0} (bug signal)")]
    DivisibilityFailure(usize),
    #[error("hypothesis out of range: {0}")]
    HypothesisOutOfRange(String),
    #[error("affine linearity violated, max coefficient gap {0:e} (bug signal)")]
    AffineLinearityViolation(f64),
    #[error("point is not above the roots: {0}")]
    NotAboveRoots(String),
    #[error("slice minroot {0:e} is negative (bug signal)")]
    MinrootNegative(f64),
    #[error("barrier value increased in direction {direction}: {before:e} -> {after:e} (bug signal)")]
    MonotonicityViolation { direction: usize, before: f64, after: f64 },
    #[error("siblings at depth {depth} have no common interlacing (bug signal)")]
    InterlacingCheckFailed { depth: usize },
    #[error("assignment path has length {got}, expected {expected}")]
    IncompletePath { got: usize, expected: usize },
    #[error("sum of the pieces is not a contraction (max eigenvalue {0:e})")]
    NotContraction(f64),
    #[error("infeasible request: {0}")]
    Infeasible(String),
    #[error("whitening matrix is singular (min eigenvalue {0:e})")]
    WhiteningSingular(f64),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("bound violated: {0} (bug signal)")]
    BoundViolated(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
