use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation (negative support,
    /// non-positive matrix, atomic input where a density is required, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(
        "eigensolver did not converge (dim {dim}, frobenius norm {frobenius_norm:.6e}, \
         max |entry| {max_abs_entry:.6e}, hermitian defect {hermitian_defect:.3e})"
    )]
    Eigensolve {
        dim: usize,
        frobenius_norm: f64,
        max_abs_entry: f64,
        hermitian_defect: f64,
    },

    #[error("singular value decomposition did not converge (dim {dim})")]
    Svd { dim: usize },

    #[error("order {requested} exceeds the supported bound {max}")]
    OrderOverflow { requested: usize, max: usize },

    #[error("insufficient samples: {got} < {required}")]
    InsufficientSamples { got: usize, required: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
