use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("operand kinds differ: cannot combine a pure state with a density operator")]
    KindMismatch,

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("subsystem dimensions {dims:?} do not multiply to {len}")]
    BadDims { dims: Vec<usize>, len: usize },

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("trace is not 1 (got {0})")]
    BadTrace(f64),

    #[error("partial trace must keep at least one subsystem")]
    EmptyKeep,

    #[error("subsystem index {index} out of range for {count} subsystems")]
    SubsystemOutOfRange { index: usize, count: usize },

    #[error("vibrational truncation {n_max} too small for level {n}")]
    TruncationTooSmall { n: usize, n_max: usize },

    #[error("reservoir temperature required and must be positive")]
    MissingTemperature,

    #[error("overdamped: A_n = {rate} >= 2g*sqrt(n+1) = {limit}")]
    Overdamped { rate: f64, limit: f64 },

    #[error("empty time grid")]
    EmptyGrid,

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("need at least {needed} points for the fit, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("rates must be positive (got {0} at n = {1})")]
    NonPositiveRate(f64, usize),

    #[error("duplicate particle id {0}")]
    DuplicateParticle(u32),

    #[error("particle {0} is not part of the collection")]
    UnknownParticle(u32),

    #[error("measurement selects no particles")]
    EmptySelection,

    #[error("cat state must contain at least one particle")]
    EmptyCat,

    #[error("bit list length {bits} does not match particle count {particles}")]
    BitCount { bits: usize, particles: usize },

    #[error("basis state must live on exactly the selected particles")]
    BasisMismatch,

    #[error("dense oracle limited to {limit} particles, got {got}")]
    TooManyParticles { got: usize, limit: usize },

    #[error("unknown user {0}")]
    UnknownUser(String),

    #[error("duplicate user {0}")]
    DuplicateUser(String),

    #[error("expected a bipartite state, got {0} parties")]
    NotBipartite(usize),

    #[error("total dimension {0} exceeds the supported maximum {1}")]
    DimensionTooLarge(usize, usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid ion configuration: {0}")]
    IonConfig(String),

    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
