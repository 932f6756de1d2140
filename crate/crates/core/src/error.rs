use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("m = {twice_m}/2 is not a valid projection of j = {twice_j}/2")]
    InvalidProjection { twice_j: i32, twice_m: i32 },

    #[error("stripe shift k = {k} out of range for two_j = {two_j}")]
    InvalidShift { two_j: u32, k: i32 },

    #[error("m = {twice_m}/2 outside the stripe range for two_j = {two_j}, k = {k}")]
    OutsideStripe { two_j: u32, k: i32, twice_m: i32 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite entry encountered")]
    NonFinite,

    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("stripe vector is not normalized (sum of squares = {norm_sq})")]
    NotNormalized { norm_sq: f64 },

    #[error("operation element has zero trace norm")]
    ZeroOperator,

    #[error("grid must be sorted ascending within [0, 1]")]
    GridNotSorted,

    #[error("grid must contain both endpoints 0 and 1")]
    GridMissingEndpoints,

    #[error("grid is empty or outside the admissible range")]
    BadGrid,

    #[error("estimation value decreased by {drop:.3e} at x = {x} during the sweep")]
    NonMonotoneSweep { x: f64, drop: f64 },

    #[error("(N, j') = ({n_qubits}, {two_jprime}/2) is not a valid decomposition label")]
    InvalidSubspace { n_qubits: u32, two_jprime: u32 },

    #[error("integer overflow in exact combinatorics")]
    Overflow,

    #[error("operator entries must be real and nonnegative")]
    NegativeEntries,

    #[error("estimation value of the source operator is negative ({g})")]
    NegativeEstimation { g: f64 },

    #[error("at least {min} samples required, got {samples}")]
    TooFewSamples { samples: usize, min: usize },

    #[error("ensemble size N = {n_qubits} exceeds the oracle limit {max}")]
    EnsembleTooLarge { n_qubits: u32, max: u32 },

    #[error("eigensolver failed: {what}")]
    EigenFailure { what: &'static str },
}

pub type Result<T> = std::result::Result<T, Error>;
