use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty tensor product")]
    EmptyTensorProduct,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("entry count {len} does not form a {dim}x{dim} matrix")]
    NotSquare { dim: usize, len: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("non-positive Gram operator (Bloch norm {norm} >= 1/2)")]
    NonPositiveGram { norm: f64 },

    #[error("matrix is not Hermitian (residual {0:e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("negative eigenvalue {0:e} on positive-semidefinite path")]
    NegativeEigenvalue(f64),

    #[error("matrix is not normal (residual {0:e})")]
    NotNormal(f64),

    #[error("singular operator{}", party.map(|p| format!(" at party {}", p + 1)).unwrap_or_default())]
    Singular { party: Option<usize> },

    #[error("non-unitary factor at element {}, party {}", element + 1, party + 1)]
    NonUnitary { element: usize, party: usize },

    #[error("closure violation: product of elements {} and {} is not in the group", left + 1, right + 1)]
    ClosureViolation { left: usize, right: usize },

    #[error("group does not contain the identity")]
    MissingIdentity,

    #[error("symmetry verification failed for element {} (residual {residual:e})", element + 1)]
    SymmetryVerification { element: usize, residual: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("party index {} out of range for {parties} parties", party + 1)]
    PartyOutOfRange { party: usize, parties: usize },

    #[error("stale certificate: {0}")]
    StaleCertificate(String),

    #[error("probability {0} outside the open interval (0, 1)")]
    InvalidProbability(f64),

    #[error("completeness violated at round {path} (residual {residual:e})")]
    Completeness { path: String, residual: f64 },

    #[error("invalid protocol: {0}")]
    InvalidProtocol(String),

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("operation requires a concrete seed state")]
    RequiresConcreteSeed,

    #[error("states belong to different seeds")]
    SeedMismatch,

    #[error("sampling failed: {0}")]
    SamplingFailed(String),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
