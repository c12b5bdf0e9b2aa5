use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("expected {expected} entries, found {found}")]
    Shape { expected: usize, found: usize },

    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: |H[{row},{col}] - conj(H[{col},{row}])| = {asymmetry:e}")]
    NotHermitian { asymmetry: f64, row: usize, col: usize },

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("function is not finite at eigenvalue {eigenvalue:e}")]
    Domain { eigenvalue: f64 },

    #[error("invalid party dimensions: {0}")]
    Parties(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("trace is {trace}, expected 1")]
    Trace { trace: f64 },

    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("projection did not converge after {iterations} iterations (residual {residual:e})")]
    ProjectionDiverged { iterations: usize, residual: f64 },

    #[error("eigensolver did not converge after {iterations} steps (residual {residual:e})")]
    EigenNotConverged { iterations: usize, residual: f64 },
}
