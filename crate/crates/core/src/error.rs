use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("matrix is not Hermitian (max |M - M^dag| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace {trace} differs from 1")]
    BadTrace { trace: f64 },

    #[error("state vector norm {norm} differs from 1")]
    NotNormalized { norm: f64 },

    #[error("operator is not unitary (max |U^dag U - I| = {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("theorem hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("certification indeterminate: {0}")]
    Indeterminate(String),

    #[error("dimension blowup: {what} needs dimension {dim} (limit {limit})")]
    DimensionBlowup {
        what: String,
        dim: usize,
        limit: usize,
    },

    #[error("invalid key {key} for key length {key_len}")]
    InvalidKey { key: u64, key_len: usize },

    #[error("ensemble is invalid: {0}")]
    InvalidEnsemble(String),

    #[error("gate {gate} touches register {register} which is not local to side {side}")]
    LocalityViolation {
        gate: String,
        register: String,
        side: String,
    },

    #[error("circuit uses {used} gates, budget is {budget}")]
    GateBudgetExceeded { used: usize, budget: usize },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("output register designation inconsistent: {0}")]
    BadOutputDesignation(String),
}
