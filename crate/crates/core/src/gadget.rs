//! Sparsification and the gadget matrix.
//!
//! A dense string of `w·s` bits is cut into `w` blocks of `s` bits. Each block,
//! read most-significant bit first, selects one position in the matching
//! block of `n / w = 2^s` output positions. The gadget matrix `G` (`w·s × n`)
//! maps that regular sparse vector back: `G · sparsify(x) = x`.

use thiserror::Error;

use crate::gf2::{BitMatrix, BitVec};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GadgetError {
    #[error("invalid gadget shape: {0}")]
    Shape(String),
    #[error("expected a vector of length {expected}, got {found}")]
    Length { expected: usize, found: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GadgetParams {
    n: usize,
    w: usize,
    s: usize,
}

impl GadgetParams {
    /// # Errors
    /// `w` must divide `n` with `n / w` a power of two at least 2.
    pub fn new(n: usize, w: usize) -> Result<Self, GadgetError> {
        if w == 0 || !n.is_multiple_of(w) {
            return Err(GadgetError::Shape(format!("w={w} must divide n={n}")));
        }
        let block = n / w;
        if !block.is_power_of_two() || block < 2 {
            return Err(GadgetError::Shape(format!("n/w = {block} must be a power of two >= 2")));
        }
        Ok(Self {
            n,
            w,
            s: block.trailing_zeros() as usize,
        })
    }

    /// Shape with `w` blocks of `s` bits each.
    pub fn from_blocks(w: usize, s: usize) -> Result<Self, GadgetError> {
        if s == 0 || s >= usize::BITS as usize - 1 {
            return Err(GadgetError::Shape(format!("s={s} out of range")));
        }
        Self::new(w << s, w)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn s(&self) -> usize {
        self.s
    }

    /// Dense input length `w·s`.
    pub fn dense_len(&self) -> usize {
        self.w * self.s
    }

    fn block_len(&self) -> usize {
        1 << self.s
    }

    /// Value of block `b` of `x`, most-significant bit first.
    fn block_value(&self, x: &BitVec, b: usize) -> usize {
        (0..self.s).fold(0, |acc, i| (acc << 1) | x.get(b * self.s + i) as usize)
    }

    /// Positions set by `sparsify(x)`, one per block, increasing.
    pub fn sparse_positions(&self, x: &BitVec) -> Result<Vec<usize>, GadgetError> {
        self.check_len(x, self.dense_len())?;
        Ok((0..self.w)
            .map(|b| b * self.block_len() + self.block_value(x, b))
            .collect())
    }

    fn check_len(&self, v: &BitVec, expected: usize) -> Result<(), GadgetError> {
        if v.len() != expected {
            return Err(GadgetError::Length {
                expected,
                found: v.len(),
            });
        }
        Ok(())
    }
}

/// `spfy(x)`: the regular weight-`w` vector of length `n` encoding `x`.
pub fn sparsify(p: &GadgetParams, x: &BitVec) -> Result<BitVec, GadgetError> {
    Ok(BitVec::from_indices(p.n, p.sparse_positions(x)?))
}

/// Inverse of [`sparsify`] on regular vectors; `None` if `v` is not regular.
pub fn unsparsify(p: &GadgetParams, v: &BitVec) -> Result<Option<BitVec>, GadgetError> {
    p.check_len(v, p.n)?;
    let mut counts = vec![0usize; p.w];
    for i in v.iter_ones() {
        counts[i / p.block_len()] += 1;
    }
    if counts.iter().any(|&c| c != 1) {
        return Ok(None);
    }
    Ok(Some(gadget_mul(p, v)?))
}

/// The explicit `w·s × n` gadget matrix.
pub fn gadget_matrix(p: &GadgetParams) -> BitMatrix {
    let mut g = BitMatrix::zeros(p.dense_len(), p.n);
    for col in 0..p.n {
        let (b, j) = (col / p.block_len(), col % p.block_len());
        for i in 0..p.s {
            if (j >> (p.s - 1 - i)) & 1 == 1 {
                g.set(b * p.s + i, col, true);
            }
        }
    }
    g
}

/// `G · v` without building `G`: XOR of the block-local binary labels of
/// every set position of `v`.
pub fn gadget_mul(p: &GadgetParams, v: &BitVec) -> Result<BitVec, GadgetError> {
    p.check_len(v, p.n)?;
    let mut out = BitVec::zeros(p.dense_len());
    for pos in v.iter_ones() {
        let (b, j) = (pos / p.block_len(), pos % p.block_len());
        for i in 0..p.s {
            if (j >> (p.s - 1 - i)) & 1 == 1 {
                out.flip(b * p.s + i);
            }
        }
    }
    Ok(out)
}
