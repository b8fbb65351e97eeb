use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("vector of length {len} is not the vectorization of an order-{order} matrix")]
    NotVectorized { len: usize, order: usize },

    #[error("empty matrix set")]
    EmptySet,

    #[error("index {index} out of range for a set of {len} matrices")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("matrix is singular at tolerance")]
    Singular,

    #[error("eigenvalue computation failed: {0}")]
    EigenFailure(String),

    #[error("{re}{im:+}i is not an eigenvalue at tolerance")]
    NotAnEigenvalue { re: f64, im: f64 },

    #[error("could not resolve a consistent Jordan structure: {0}")]
    InconsistentStructure(String),

    #[error("matrix is defective (index {index} > 1); the check needs a diagonalizable input")]
    Defective { index: usize },

    #[error("function `{name}` has no derivative of order {order} at {re}{im:+}i")]
    MissingDerivative { name: String, order: usize, re: f64, im: f64 },

    #[error("interpolation is ill-conditioned (growth factor {growth:e}, node separation {separation:e})")]
    IllConditioned { growth: f64, separation: f64 },

    #[error(
        "no {order}x{order} pivot block passes the conditioning threshold (smallest singular value {sigma_min:e})"
    )]
    PivotFailure { order: usize, sigma_min: f64 },
}

impl Error {
    /// True for failures of a numerical procedure, as opposed to malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Singular
                | Error::EigenFailure(_)
                | Error::InconsistentStructure(_)
                | Error::IllConditioned { .. }
                | Error::PivotFailure { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
