use thiserror::Error;

/// Errors produced by space construction, state builders and optimizers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate mode (region={0}, port={1}, species={2})")]
    DuplicateMode(String, u32, u32),

    #[error("space dimension {dim} exceeds the configured limit {limit}")]
    DimensionOverflow { dim: usize, limit: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("no modes given")]
    EmptyModeList,

    #[error("occupation vector length {got} does not match mode count {expected}")]
    OccupationLength { expected: usize, got: usize },

    #[error("state not in basis")]
    NotInBasis,

    #[error("amplitudes not normalized: |alpha|^2 + |beta|^2 = {0}")]
    NotNormalized(f64),

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("trace is {0}, expected 1")]
    TraceNotOne(f64),

    #[error("state is not pure (purity {0})")]
    MixedState(f64),

    #[error("separable spec invalid: {0}")]
    InvalidSpec(String),

    #[error("spec incompatible with the given space: {0}")]
    IncompatibleSpace(String),

    #[error("particle count {0} exceeds the 2^N enumeration cap ({1})")]
    TooManyParticles(u32, u32),

    #[error("density matrix support leaks outside the designated block (weight {0:.3e})")]
    SupportLeak(f64),

    #[error("grid oracle unsupported: compressed block of dimension {0} (> 2)")]
    OracleUnsupported(usize),

    #[error("unknown scenario '{0}'")]
    UnknownScenario(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
