use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A matrix element couples two different eigenspaces of the invariant.
    #[error("matrix element ({row}, {col}) connects invariant sectors {row_inv} and {col_inv}")]
    SectorStraddle {
        row: usize,
        col: usize,
        row_inv: String,
        col_inv: String,
    },

    #[error("matrix is not symmetric: max |A - A^T| = {asymmetry:e}")]
    NotSymmetric { asymmetry: f64 },

    #[error(
        "eigenvalue iteration did not converge for a {size}x{size} block (residual {residual:e})"
    )]
    NoConvergence { size: usize, residual: f64 },
}

impl Error {
    /// True for failures of the numerical kernels rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoConvergence { .. })
    }
}
