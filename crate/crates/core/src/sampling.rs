//! Seeded randomness and the matrix distributions used by every scheme.
//!
//! All samplers take an explicit [`DslRng`]. Parallel experiments give each
//! trial its own ChaCha stream via [`Seed::trial`], so results do not depend
//! on how trials are scheduled across threads.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::cryptanalysis::{dual_distance_sparse, DualDistance};
use crate::gf2::{BitMatrix, BitVec, Gf2Error, SparseMatrix};

/// The workbench RNG. ChaCha with 8 rounds: counter-based, seekable and
/// identical on every platform. Not intended as a production CSPRNG here.
pub type DslRng = ChaCha8Rng;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SamplingError {
    #[error("probability {0} outside [0, 1]")]
    BadProbability(f64),
    #[error("invalid shape: {0}")]
    BadShape(String),
    #[error("no matrix with dual distance >= {d} after {attempts} attempts")]
    RejectionExhausted { d: usize, attempts: usize },
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

/// Master seed plus stream id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Seed {
    pub key: [u8; 32],
    pub stream: u64,
}

impl Seed {
    pub fn new(key: [u8; 32], stream: u64) -> Self {
        Self { key, stream }
    }

    /// Seed whose key is `value` as little-endian bytes, zero-extended.
    pub fn from_u64(value: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&value.to_le_bytes());
        Self { key, stream: 0 }
    }

    /// Parses up to 64 hex digits as a big-endian integer, zero-extended on the left.
    pub fn from_hex(s: &str) -> Result<Self, String> {
        let s = s.trim().trim_start_matches("0x");
        if s.is_empty() || s.len() > 64 || !s.chars().all(|c| c.is_ascii_hexdigit()) {
            return Err(format!("seed must be 1 to 64 hex digits, got `{s}`"));
        }
        let padded = format!("{s:0>64}");
        let mut key = [0u8; 32];
        for (i, byte) in key.iter_mut().enumerate() {
            *byte = u8::from_str_radix(&padded[2 * i..2 * i + 2], 16).expect("validated hex");
        }
        Ok(Self { key, stream: 0 })
    }

    pub fn to_hex(&self) -> String {
        self.key.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn rng(&self) -> DslRng {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(self.stream);
        rng
    }

    pub fn with_stream(self, stream: u64) -> Self {
        Self { stream, ..self }
    }

    /// Independent child seed: `SHA-256(key || label)`, same stream id.
    pub fn derive(&self, label: &str) -> Seed {
        let mut h = Sha256::new();
        h.update(self.key);
        h.update(label.as_bytes());
        Seed {
            key: h.finalize().into(),
            stream: self.stream,
        }
    }

    /// RNG for trial `i` of the experiment `label`.
    pub fn trial(&self, label: &str, i: u64) -> DslRng {
        self.derive(label).with_stream(i).rng()
    }
}

/// Runs `f` once per trial on its own stream of `seed.derive(label)`, in
/// parallel. The result depends only on the seed, never on the worker count.
pub fn par_trials<T, F>(seed: &Seed, label: &str, trials: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut DslRng) -> T + Sync,
{
    let base = seed.derive(label);
    (0..trials as u64)
        .into_par_iter()
        .map(|i| f(i, &mut base.with_stream(i).rng()))
        .collect()
}

/// Threshold `x` such that a uniform `u64` is `< x` with probability `eps`.
/// `None` means "always" (eps = 1).
fn bernoulli_threshold(eps: f64) -> Result<Option<u64>, SamplingError> {
    if !(0.0..=1.0).contains(&eps) || eps.is_nan() {
        return Err(SamplingError::BadProbability(eps));
    }
    if eps == 1.0 {
        return Ok(None);
    }
    // 2^64 * eps, exact for dyadic eps and within 2^-53 relative otherwise.
    Ok(Some((eps * 18_446_744_073_709_551_616.0) as u64))
}

/// i.i.d. Bernoulli(`eps`) bits. `eps` of exactly 0 or 1 consumes no randomness.
pub fn bernoulli_vec<R: Rng + ?Sized>(eps: f64, len: usize, rng: &mut R) -> Result<BitVec, SamplingError> {
    match bernoulli_threshold(eps)? {
        None => Ok(BitVec::ones(len)),
        Some(0) => Ok(BitVec::zeros(len)),
        Some(th) => {
            let mut v = BitVec::zeros(len);
            for i in 0..len {
                if rng.gen::<u64>() < th {
                    v.set(i, true);
                }
            }
            Ok(v)
        }
    }
}

pub fn bernoulli_matrix<R: Rng + ?Sized>(
    eps: f64,
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> Result<BitMatrix, SamplingError> {
    let data = (0..rows)
        .map(|_| bernoulli_vec(eps, cols, rng))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BitMatrix::from_rows(cols, data)?)
}

/// Uniform `k`-subset of `0..n` (Floyd's algorithm), sorted.
pub fn k_subset<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Vec<u32> {
    assert!(k <= n, "k_subset needs k <= n");
    let mut chosen = BTreeSet::new();
    for j in (n - k)..n {
        let t = rng.gen_range(0..=j);
        if !chosen.insert(t) {
            chosen.insert(j);
        }
    }
    chosen.into_iter().map(|i| i as u32).collect()
}

/// `n × m` matrix whose columns are independent uniform `k`-subsets.
pub fn uniform_sparse<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    k: usize,
    rng: &mut R,
) -> Result<SparseMatrix, SamplingError> {
    if k > n || k == 0 {
        return Err(SamplingError::BadShape(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    if m == 0 {
        return Err(SamplingError::BadShape("need m >= 1".into()));
    }
    let columns = (0..m).map(|_| k_subset(n, k, rng)).collect();
    Ok(SparseMatrix::new(n, k, columns)?)
}

/// Like [`uniform_sparse`] but with pairwise distinct columns, so the dual
/// distance is at least 3. Columns are redrawn until new.
pub fn distinct_sparse<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    k: usize,
    rng: &mut R,
) -> Result<SparseMatrix, SamplingError> {
    if k > n || k == 0 {
        return Err(SamplingError::BadShape(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    let available = crate::cryptanalysis::binom_f64(n, k);
    if m == 0 || m as f64 > available / 2.0 {
        return Err(SamplingError::BadShape(format!(
            "m={m} distinct columns needs m <= C(n,k)/2 = {available}/2"
        )));
    }
    let mut seen = BTreeSet::new();
    let mut columns = Vec::with_capacity(m);
    while columns.len() < m {
        let c = k_subset(n, k, rng);
        if seen.insert(c.clone()) {
            columns.push(c);
        }
    }
    Ok(SparseMatrix::new(n, k, columns)?)
}

/// Target of the rejection sampler standing in for a good sparse distribution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GoodDistSpec {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    /// Required dual-distance lower bound. `d <= 1` accepts everything.
    pub d: usize,
    pub max_rejects: usize,
}

impl GoodDistSpec {
    pub fn new(n: usize, m: usize, k: usize, d: usize) -> Self {
        Self {
            n,
            m,
            k,
            d,
            max_rejects: 1000,
        }
    }
}

/// Samples uniform `k`-sparse matrices until one has dual distance `>= spec.d`.
///
/// # Errors
/// [`SamplingError::RejectionExhausted`] after `spec.max_rejects` failures.
pub fn good_sparse<R: Rng + ?Sized>(spec: &GoodDistSpec, rng: &mut R) -> Result<SparseMatrix, SamplingError> {
    for _ in 0..spec.max_rejects.max(1) {
        let m = uniform_sparse(spec.n, spec.m, spec.k, rng)?;
        if spec.d <= 1 {
            return Ok(m);
        }
        if let DualDistance::Above(_) = dual_distance_sparse(&m, spec.d - 1) {
            return Ok(m);
        }
    }
    Err(SamplingError::RejectionExhausted {
        d: spec.d,
        attempts: spec.max_rejects.max(1),
    })
}

/// Dense-Sparse coefficient matrix `A = T·M` with `T` uniform of size `(alpha·n) × n`.
///
/// Returns `(A, T, M)`. Callers that model the real distribution drop `T` and `M`.
pub fn dense_sparse_matrix<R: Rng + ?Sized>(
    alpha: f64,
    spec: &GoodDistSpec,
    rng: &mut R,
) -> Result<(BitMatrix, BitMatrix, SparseMatrix), SamplingError> {
    let rows_f = alpha * spec.n as f64;
    if !(alpha > 0.0) || rows_f.fract() != 0.0 {
        return Err(SamplingError::BadShape(format!(
            "alpha * n must be a positive integer (alpha={alpha}, n={})",
            spec.n
        )));
    }
    let m = good_sparse(spec, rng)?;
    let t = BitMatrix::random(rows_f as usize, spec.n, rng);
    let a = m.left_mul(&t)?;
    Ok((a, t, m))
}

/// One LPN sample `b = s·A + e` with fresh uniform `s` and `e ~ Ber(eps)^m`.
pub fn lpn_sample<R: Rng + ?Sized>(a: &BitMatrix, eps: f64, rng: &mut R) -> Result<BitVec, SamplingError> {
    let s = BitVec::random(a.rows(), rng);
    let mut b = a.vec_mul(&s)?;
    b ^= &bernoulli_vec(eps, a.cols(), rng)?;
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_reproducible_and_split() {
        let s = Seed::from_hex("DEADBEEF").unwrap();
        let a: u64 = s.rng().gen();
        let b: u64 = s.rng().gen();
        assert_eq!(a, b);
        let c: u64 = s.with_stream(1).rng().gen();
        assert_ne!(a, c);
        assert_ne!(s.derive("x"), s.derive("y"));
        assert_eq!(s.key[28..], [0xde, 0xad, 0xbe, 0xef]);
        assert!(Seed::from_hex("xyz").is_err());
    }

    #[test]
    fn bernoulli_edges() {
        let mut rng = Seed::from_u64(3).rng();
        assert!(bernoulli_vec(0.0, 100, &mut rng).unwrap().is_zero());
        assert_eq!(bernoulli_vec(1.0, 100, &mut rng).unwrap().weight(), 100);
        assert!(bernoulli_vec(1.5, 3, &mut rng).is_err());
        assert!(bernoulli_vec(-0.1, 3, &mut rng).is_err());
    }

    #[test]
    fn floyd_gives_distinct_sorted_indices() {
        let mut rng = Seed::from_u64(4).rng();
        for _ in 0..200 {
            let s = k_subset(10, 4, &mut rng);
            assert_eq!(s.len(), 4);
            assert!(s.windows(2).all(|w| w[0] < w[1]));
            assert!(s.iter().all(|&i| i < 10));
        }
        assert_eq!(k_subset(5, 5, &mut rng), vec![0, 1, 2, 3, 4]);
    }
}
