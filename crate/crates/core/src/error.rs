use thiserror::Error;

/// Errors raised while constructing groups, operators and models.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown group `{0}`")]
    UnknownGroup(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("operation `{0}` requires a finite group")]
    RequiresFinite(&'static str),

    #[error("operation `{0}` requires a Lie group catalog entry")]
    RequiresLie(&'static str),

    #[error("operation `{0}` requires the truncated SU(2) catalog entry")]
    RequiresSu2(&'static str),

    #[error("incomplete irrep set: sum of dim^2 is {sum}, group order is {order}")]
    IncompleteIrreps { sum: usize, order: usize },

    #[error("irrep `{0}` not found in catalog")]
    UnknownIrrep(String),

    #[error("irrep {k} does not appear in {j1} x {j2}")]
    MissingChannel { j1: String, j2: String, k: String },

    #[error("irrep {k} appears {multiplicity} times in {j1} x {j2}; multiplicity > 1 is unsupported")]
    Multiplicity {
        j1: String,
        j2: String,
        k: String,
        multiplicity: usize,
    },

    #[error("mode index {index} out of range for {n_modes} modes")]
    ModeOutOfRange { index: usize, n_modes: usize },

    #[error("vertex {index} out of range for {count} vertices")]
    VertexOutOfRange { index: usize, count: usize },

    #[error("basis mismatch: expected {expected}, found {found}")]
    BasisMismatch { expected: String, found: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid model parameters: {0}")]
    InvalidModel(String),

    #[error("operator is not Hermitian (residual {0:.3e})")]
    NotHermitian(f64),

    #[error("eigensolver did not converge after {iterations} iterations (best residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("group fails validation: {0}")]
    InvalidGroup(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether the error comes from the inputs rather than from running a task.
    pub fn is_config_error(&self) -> bool {
        !matches!(self, Error::NotHermitian(_) | Error::NotConverged { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
