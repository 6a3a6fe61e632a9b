use alloc::string::String;

/// Errors raised by table construction and block-level operations.
///
/// Failed certifications are never errors; they come back as reports.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("duplicate irrep id `{0}`")]
    DuplicateId(String),
    #[error("irrep `{0}` has dimension 0")]
    ZeroDimension(String),
    #[error("more than one trivial label (`{0}` and `{1}`)")]
    MultipleTrivial(String, String),
    #[error("trivial label `{0}` must have dimension 1, got {1}")]
    TrivialDimension(String, usize),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("operands live on different tables")]
    TableMismatch,
    #[error("block at `{label}` is {rows}×{cols}, expected {expected}×{expected}")]
    BlockShape { label: String, rows: usize, cols: usize, expected: usize },
    #[error("label `{0}` has no block")]
    MissingBlock(String),
    #[error("trivial block must be {expected}, found a different value")]
    TrivialBlock { expected: &'static str },
    #[error("family is not normalized (trivial block ≠ [1])")]
    NotNormalized,
    #[error("block at `{label}` is not Hermitian (residual {residual:e})")]
    NotSymmetric { label: String, residual: f64 },
    #[error("block at `{label}` has eigenvalue {eigenvalue:e} below -tol")]
    NegativeEigenvalue { label: String, eigenvalue: f64 },
    #[error("block at `{label}` has norm {norm} > 1 + tol")]
    NotContractive { label: String, norm: f64 },
    #[error("group element is not reduced or has an invalid exponent")]
    InvalidElement,
    #[error("elements belong to different groups")]
    GroupMismatch,
    #[error("invalid group spec: {0}")]
    InvalidGroupSpec(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = core::result::Result<T, Error>;
