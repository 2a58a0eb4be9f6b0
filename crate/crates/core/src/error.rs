use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Rejected argument: bad manifold parameters, non-positive bandwidth,
    /// weights that do not normalize, and similar construction failures.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A point or vector does not match the ambient dimension in play.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The Gaussian row at a query point carries no usable mass. `n_eff` is
    /// the sum of the raw kernel weights (the unweighted count of samples
    /// the row effectively sees).
    #[error("bandwidth too small for sample: theta={theta:.3e}, n_eff={n_eff:.3e} with n={n}")]
    BandwidthTooSmall { theta: f64, n_eff: f64, n: usize },

    /// A scalar field was evaluated somewhere it is not defined, or does not
    /// fit the cloud it was paired with.
    #[error("field not evaluable: {0}")]
    FieldDomain(String),

    /// The requested spec/operation combination has no implementation
    /// (for example an analytic value that only exists for coordinate
    /// fields, or a quadrature grid on a sphere of dimension other than 2).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A cloud file failed to parse; `line` is 1-based.
    #[error("malformed cloud file at line {line}: {msg}")]
    MalformedFile { line: usize, msg: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// A numeric search ran past its cap without reaching the target.
    #[error("not attainable: {0}")]
    NotAttainable(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
