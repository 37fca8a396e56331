use thiserror::Error;

/// Errors reported by the library.
///
/// [`BetheError::is_numerical`] separates numerical failures (non-convergence,
/// precision loss, inconsistent expansions) from invalid input; the CLI maps
/// the two classes to different exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BetheError {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid options: {0}")]
    InvalidOptions(String),

    #[error("expected {expected} roots, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("anisotropy eta = {eta} is not generic: |exp({k} eta) - 1| = {gap:e}")]
    NonGenericAnisotropy { eta: f64, k: u32, gap: f64 },

    #[error("root {root} lies within {distance:e} of the excluded point {pole}")]
    Pole { root: String, pole: String, distance: f64 },

    #[error("roots contain a partial string: found {found:?}, missing {missing:?}")]
    NotDecomposable { found: Vec<String>, missing: Vec<String> },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("singular solution is unphysical (constraint value {value})")]
    Unphysical { value: String },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("singular Jacobian at iteration {iteration} (pivot ratio {pivot_ratio:e})")]
    SingularJacobian { iteration: usize, pivot_ratio: f64 },

    #[error("order-{order} expansion system is inconsistent (residual {residual:e})")]
    Inconsistent { order: usize, residual: f64 },

    #[error("chain length {n} exceeds the size cap {cap}")]
    SizeCap { n: usize, cap: usize },

    #[error("path tracking failed at beta = {beta:e}: {reason}")]
    PathTracking { beta: f64, reason: String },

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("series order {have} is insufficient, need at least {need}")]
    InsufficientOrder { have: usize, need: usize },

    #[error("epsilon {epsilon:e} is too small for the working precision")]
    EpsilonTooSmall { epsilon: f64 },

    #[error("zero vector")]
    ZeroVector,

    #[error("census report is incomplete for M = {0:?}")]
    IncompleteReport(Vec<usize>),

    #[error("parse error: {0}")]
    Parse(String),
}

impl BetheError {
    /// True for failures of a numerical procedure on otherwise valid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            BetheError::NonConvergence { .. }
                | BetheError::SingularJacobian { .. }
                | BetheError::Inconsistent { .. }
                | BetheError::PathTracking { .. }
                | BetheError::PrecisionExhausted(_)
                | BetheError::Unphysical { .. }
                | BetheError::IncompleteReport(_)
        )
    }
}

pub type Result<T, E = BetheError> = std::result::Result<T, E>;
