//! Exact scalars, polynomials and dense linear algebra over the rationals.

pub mod matrix;
pub mod poly;
pub mod rational;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("unknown indeterminate `{0}`")]
    UnknownVar(String),
    #[error("cannot parse rational `{0}`")]
    Parse(String),
}
