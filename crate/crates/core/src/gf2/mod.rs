//! Bit-packed linear algebra over GF(2).

mod bitvec;
pub mod io;
mod matrix;
mod sparse;

pub use bitvec::BitVec;
pub use matrix::BitMatrix;
pub use sparse::SparseMatrix;

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("{op}: dimension mismatch (expected {expected}, found {found})")]
    DimMismatch {
        op: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("{op}: shape mismatch ({left:?} vs {right:?})")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("sparse column {column} {reason}")]
    BadSparseColumn { column: usize, reason: String },
    #[error("malformed serialized object: {0}")]
    Format(String),
}
