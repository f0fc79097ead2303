use crate::gf2::BitVec;

use super::gf2m::Gf2m;
use super::inner::InnerCode;
use super::rs::ReedSolomon;
use super::{BlockCode, EccError};

/// Reed-Solomon outer code over GF(2^b) concatenated with a binary `[2b, b]`
/// inner code, zero-padded to a fixed block length.
///
/// Message bits are packed into `K` outer symbols (bit `i` of symbol `j` is
/// message bit `b·j + i`); the `N` outer symbols are inner-encoded in order.
#[derive(Clone, Debug)]
pub struct ConcatenatedCode {
    name: String,
    dim: usize,
    block_len: usize,
    outer: ReedSolomon,
    inner: InnerCode,
    t_err: usize,
}

impl ConcatenatedCode {
    /// The shipped family: `b` is the smallest with `N = floor(4·dim/b) <= 2^b - 1`,
    /// `K = ceil(dim/b)`, block length `8·dim`.
    ///
    /// # Errors
    /// `dim < 8`, or the construction audit (rate, correctable fraction) fails.
    pub fn build(dim: usize) -> Result<Self, EccError> {
        if dim < 8 {
            return Err(EccError::Construction(format!("dim must be at least 8, got {dim}")));
        }
        let b = (2..=15)
            .find(|&b| 4 * dim / b < (1 << b))
            .ok_or_else(|| EccError::Construction(format!("dim {dim} too large")))?;
        let code = Self::with_shape(b, 4 * dim / b, dim.div_ceil(b), dim, 8 * dim, InnerCode::search(b))?;
        if code.t_err * 32 < code.block_len {
            return Err(EccError::Construction(format!(
                "correctable errors {} below blockLen/32 for dim {dim}",
                code.t_err
            )));
        }
        Ok(code)
    }

    /// Explicit shape; `block_len >= 2·b·n_outer`, `dim <= b·k_outer`.
    pub fn with_shape(
        b: usize,
        n_outer: usize,
        k_outer: usize,
        dim: usize,
        block_len: usize,
        inner: InnerCode,
    ) -> Result<Self, EccError> {
        if inner.dim() != b {
            return Err(EccError::Construction("inner code dimension must equal b".into()));
        }
        if k_outer == 0 || k_outer > n_outer || n_outer >= 1 << b {
            return Err(EccError::Construction(format!(
                "outer shape N={n_outer}, K={k_outer} invalid over GF(2^{b})"
            )));
        }
        if dim > b * k_outer || dim == 0 {
            return Err(EccError::Construction(format!("dim {dim} does not fit K*b = {}", b * k_outer)));
        }
        if block_len < 2 * b * n_outer {
            return Err(EccError::Construction("block length shorter than N*2b".into()));
        }
        let outer = ReedSolomon::new(Gf2m::new(b as u32), n_outer, k_outer);
        let t_err = inner.distance().div_ceil(2) * (outer.t() + 1) - 1;
        Ok(Self {
            name: format!("concat-rs{n_outer}x{k_outer}-gf2^{b}-inner{}x{b}d{}", 2 * b, inner.distance()),
            dim,
            block_len,
            outer,
            inner,
            t_err,
        })
    }

    pub fn outer(&self) -> &ReedSolomon {
        &self.outer
    }

    pub fn inner(&self) -> &InnerCode {
        &self.inner
    }

    fn b(&self) -> usize {
        self.inner.dim()
    }

    fn symbols_of(&self, x: &BitVec) -> Vec<u16> {
        let b = self.b();
        (0..self.outer.k())
            .map(|j| {
                (0..b).fold(0u16, |acc, i| {
                    let idx = b * j + i;
                    acc | (((idx < self.dim && x.get(idx)) as u16) << i)
                })
            })
            .collect()
    }
}

impl BlockCode for ConcatenatedCode {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn block_len(&self) -> usize {
        self.block_len
    }

    fn t_err(&self) -> usize {
        self.t_err
    }

    fn encode(&self, x: &BitVec) -> Result<BitVec, EccError> {
        self.check_len(x, self.dim)?;
        let cw = self.outer.encode(&self.symbols_of(x));
        let n2 = 2 * self.b();
        let mut out = BitVec::zeros(self.block_len);
        for (j, &sym) in cw.iter().enumerate() {
            let bits = self.inner.encode(sym as u32);
            for i in 0..n2 {
                if (bits >> i) & 1 == 1 {
                    out.set(j * n2 + i, true);
                }
            }
        }
        Ok(out)
    }

    fn decode(&self, y: &BitVec) -> Result<BitVec, EccError> {
        self.check_len(y, self.block_len)?;
        let n2 = 2 * self.b();
        let word: Vec<u16> = (0..self.outer.n())
            .map(|j| {
                let bits = (0..n2).fold(0u32, |acc, i| acc | ((y.get(j * n2 + i) as u32) << i));
                self.inner.decode(bits) as u16
            })
            .collect();
        let msg = self.outer.decode(&word).ok_or(EccError::DecodeFailure)?;
        let b = self.b();
        let mut out = BitVec::zeros(self.dim);
        for (j, &sym) in msg.iter().enumerate() {
            for i in 0..b {
                if (sym >> i) & 1 == 1 {
                    let idx = b * j + i;
                    if idx >= self.dim {
                        // Padding bits are zero in every codeword.
                        return Err(EccError::DecodeFailure);
                    }
                    out.set(idx, true);
                }
            }
        }
        Ok(out)
    }
}
