//! Binary block codes with bounded-distance decoding.
//!
//! [`ConcatenatedCode`] is the production code; [`RepetitionCode`] exists for
//! tests. Any [`BlockCode`] can back the lossy trapdoor function.

mod concat;
mod gf2m;
mod inner;
mod registry;
mod rs;

pub use concat::ConcatenatedCode;
pub use gf2m::{first_primitive_poly, Gf2m};
pub use inner::InnerCode;
pub use registry::{CodeRegistry, REGISTRY_VERSION};
pub use rs::ReedSolomon;

use std::fmt;

use thiserror::Error;

use crate::gf2::{BitMatrix, BitVec, Gf2Error};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EccError {
    #[error("expected a vector of length {expected}, got {found}")]
    Length { expected: usize, found: usize },
    #[error("uncorrectable word")]
    DecodeFailure,
    #[error("code construction failed: {0}")]
    Construction(String),
    #[error("code registry: {0}")]
    Registry(String),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

/// A linear binary code with a guaranteed correction radius `t_err`.
pub trait BlockCode: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;
    fn dim(&self) -> usize;
    fn block_len(&self) -> usize;
    /// Every error pattern of weight at most this is corrected.
    fn t_err(&self) -> usize;

    fn encode(&self, x: &BitVec) -> Result<BitVec, EccError>;

    /// Returns the message when `y` is within `t_err` of a codeword. Beyond
    /// that it may return a wrong message or [`EccError::DecodeFailure`].
    fn decode(&self, y: &BitVec) -> Result<BitVec, EccError>;

    fn rate(&self) -> f64 {
        self.dim() as f64 / self.block_len() as f64
    }

    fn check_len(&self, v: &BitVec, expected: usize) -> Result<(), EccError> {
        if v.len() != expected {
            return Err(EccError::Length {
                expected,
                found: v.len(),
            });
        }
        Ok(())
    }
}

/// The `block_len × dim` matrix whose column `j` is `encode(e_j)`.
pub fn encoding_matrix(code: &dyn BlockCode) -> Result<BitMatrix, EccError> {
    let cols = (0..code.dim())
        .map(|j| code.encode(&BitVec::unit(code.dim(), j)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BitMatrix::from_columns(code.block_len(), &cols)?)
}

/// Each message bit repeated `r` times; majority decoding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepetitionCode {
    name: String,
    dim: usize,
    r: usize,
}

impl RepetitionCode {
    pub fn new(dim: usize, r: usize) -> Result<Self, EccError> {
        if dim == 0 || r == 0 {
            return Err(EccError::Construction("repetition code needs dim, r >= 1".into()));
        }
        Ok(Self {
            name: format!("repetition-{r}x{dim}"),
            dim,
            r,
        })
    }

    pub fn repeats(&self) -> usize {
        self.r
    }
}

impl BlockCode for RepetitionCode {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn block_len(&self) -> usize {
        self.dim * self.r
    }

    fn t_err(&self) -> usize {
        (self.r - 1) / 2
    }

    fn encode(&self, x: &BitVec) -> Result<BitVec, EccError> {
        self.check_len(x, self.dim)?;
        let mut out = BitVec::zeros(self.block_len());
        for i in x.iter_ones() {
            for j in 0..self.r {
                out.set(i * self.r + j, true);
            }
        }
        Ok(out)
    }

    fn decode(&self, y: &BitVec) -> Result<BitVec, EccError> {
        self.check_len(y, self.block_len())?;
        let mut out = BitVec::zeros(self.dim);
        for i in 0..self.dim {
            let ones = (0..self.r).filter(|&j| y.get(i * self.r + j)).count();
            if 2 * ones == self.r {
                return Err(EccError::DecodeFailure);
            }
            if 2 * ones > self.r {
                out.set(i, true);
            }
        }
        Ok(out)
    }
}
