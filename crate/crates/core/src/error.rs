use alloc::boxed::Box;
use alloc::string::String;

/// Errors raised by the shape-clustering core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("curve {curve}: T < 3 (got {len} samples)")]
    TooFewSamples { curve: String, len: usize },

    #[error("inconsistent dimension: curve {curve} has p={got}, expected p={expected}")]
    InconsistentDimension { curve: String, got: usize, expected: usize },

    #[error("curve {curve}: ragged point array (length {len} is not a multiple of p={dim})")]
    RaggedPoints { curve: String, len: usize, dim: usize },

    #[error("empty set")]
    Empty,

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("degenerate curve: zero total length")]
    ZeroLength,

    #[error("degenerate constant curve: SRVF has zero norm")]
    ZeroNorm,

    #[error("operation requires an open curve")]
    ClosedCurve,

    #[error("grid mismatch: {left} vs {right} samples")]
    GridMismatch { left: usize, right: usize },

    #[error("dimension mismatch: p={left} vs p={right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("domain mismatch: cannot compare open and closed curves")]
    DomainMismatch,

    #[error("reparameterization is not monotone nondecreasing at index {0}")]
    NonMonotone(usize),

    #[error("reparameterization violates boundary conditions")]
    BadBoundary,

    #[error("SVD failed on non-finite input")]
    SvdFailure,

    #[error("covariance {0} is not symmetric positive definite")]
    NotSpd(usize),

    #[error("invalid mixture: {0}")]
    InvalidMixture(&'static str),

    #[error("unknown template '{0}'")]
    UnknownTemplate(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("pair ({i},{j}): {source}")]
    Pair { i: usize, j: usize, source: Box<Error> },

    #[error(
        "nonpositive marginal-likelihood bracket {bracket} at theta={theta} \
         (theta too large for S, or S is indefinite)"
    )]
    NonPositiveBracket { theta: f64, bracket: f64 },

    #[error("every theta grid point has zero marginal likelihood")]
    DegenerateThetaGrid,

    #[error("cluster index {index} out of range (K={k})")]
    ClusterOutOfRange { index: usize, k: usize },

    #[error("observation {index} is not in cluster {cluster}")]
    NotInCluster { index: usize, cluster: usize },

    #[error("block-sum cache is inconsistent with S and the partition")]
    InconsistentCache,

    #[error("all-zero (nonnegative) spectrum")]
    ZeroSpectrum,

    #[error("n={0} is too large for exhaustive enumeration (max 10)")]
    TooLargeToEnumerate(usize),

    #[error("empty trace")]
    EmptyTrace,

    #[error("no threshold yields {k0} clusters; sample more posteriors or re-sample the chain")]
    ThresholdFailed { k0: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
