//! Collision-resistant hash `x -> A'·spfy(x)` with `A' = H·M`.

use rand::Rng;
use thiserror::Error;

use crate::cryptanalysis::{dual_distance, DualDistance};
use crate::gadget::{sparsify, GadgetError, GadgetParams};
use crate::gf2::io::{Bundle, Object};
use crate::gf2::{BitMatrix, BitVec, Gf2Error, SparseMatrix};
use crate::params::{CrhfParams, ParamError};
use crate::sampling::{good_sparse, GoodDistSpec, SamplingError};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CrhfError {
    #[error("expected input of length {expected}, got {found}")]
    Length { expected: usize, found: usize },
    #[error("inputs are equal")]
    SameInput,
    #[error("inputs do not collide")]
    NotACollision,
    #[error("debug fields are required for this operation")]
    NoDebug,
    #[error("factored key needs out_len <= n/2 (out_len={out_len}, n={n})")]
    FactorShape { out_len: usize, n: usize },
    #[error("no parity-check matrix with distance > {bound} in {attempts} attempts")]
    DistanceRejection { bound: usize, attempts: usize },
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Gadget(#[from] GadgetError),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrhfDebug {
    pub h: BitMatrix,
    pub m: SparseMatrix,
}

#[derive(Clone, Debug)]
pub struct CrhfKey {
    params: CrhfParams,
    a_prime: BitMatrix,
    a_cols: Vec<BitVec>,
    gadget: GadgetParams,
    pub debug: Option<CrhfDebug>,
}

/// How `H` is drawn at key generation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HSampling {
    Uniform,
    /// `H = H'·T` with `H'` of size `out_len × n/2` and `T` of size `n/2 × n`.
    Factored,
    /// Uniform, redrawn until no nonzero kernel vector has weight `<= 2kt`.
    DistanceChecked { max_attempts: usize },
}

impl CrhfKey {
    fn assemble(params: CrhfParams, a_prime: BitMatrix, debug: Option<CrhfDebug>) -> Result<Self, CrhfError> {
        let gadget = GadgetParams::from_blocks(params.t as usize, params.s as usize)?;
        if a_prime.rows() != params.out_len as usize || a_prime.cols() != params.m as usize {
            return Err(CrhfError::Length {
                expected: params.m as usize,
                found: a_prime.cols(),
            });
        }
        let a_cols = a_prime.transpose().into_rows();
        Ok(Self {
            params,
            a_prime,
            a_cols,
            gadget,
            debug,
        })
    }

    pub fn params(&self) -> &CrhfParams {
        &self.params
    }

    pub fn a_prime(&self) -> &BitMatrix {
        &self.a_prime
    }

    pub fn gadget(&self) -> &GadgetParams {
        &self.gadget
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, CrhfError> {
        let mut b = Bundle::new();
        let text: String = self.params.to_kv().iter().map(|(k, v)| format!("{k}={v}\n")).collect();
        b.push("params", Object::Text(text));
        b.push("A'", Object::BitMatrix(self.a_prime.clone()));
        Ok(b.to_bytes()?)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CrhfError> {
        let mut b = Bundle::from_bytes(bytes)?;
        let kv: Vec<(String, String)> = b
            .take("params")?
            .into_text()?
            .lines()
            .filter_map(|l| l.split_once('='))
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        let params = CrhfParams::from_kv(&kv)?;
        Self::assemble(params, b.take("A'")?.into_bitmatrix()?, None)
    }
}

fn sample_h<R: Rng + ?Sized>(p: &CrhfParams, how: HSampling, rng: &mut R) -> Result<BitMatrix, CrhfError> {
    let (rows, n) = (p.out_len as usize, p.n as usize);
    match how {
        HSampling::Uniform => Ok(BitMatrix::random(rows, n, rng)),
        HSampling::Factored => {
            if rows > n / 2 {
                return Err(CrhfError::FactorShape { out_len: rows, n });
            }
            let h1 = BitMatrix::random(rows, n / 2, rng);
            let t = BitMatrix::random(n / 2, n, rng);
            Ok(h1.mul(&t)?)
        }
        HSampling::DistanceChecked { max_attempts } => {
            let bound = (2 * p.k * p.t) as usize;
            for _ in 0..max_attempts.max(1) {
                let h = BitMatrix::random(rows, n, rng);
                if matches!(dual_distance(&h, bound), DualDistance::Above(_)) {
                    return Ok(h);
                }
            }
            Err(CrhfError::DistanceRejection {
                bound,
                attempts: max_attempts.max(1),
            })
        }
    }
}

/// Samples `H` and a good sparse `M` and publishes `A' = H·M`.
pub fn crhf_gen<R: Rng + ?Sized>(
    params: &CrhfParams,
    how: HSampling,
    rng: &mut R,
    debug: bool,
) -> Result<CrhfKey, CrhfError> {
    params.verify()?;
    let h = sample_h(params, how, rng)?;
    let spec = GoodDistSpec::new(params.n as usize, params.m as usize, params.k as usize, params.good_d);
    let m = good_sparse(&spec, rng)?;
    let a_prime = m.left_mul(&h)?;
    CrhfKey::assemble(params.clone(), a_prime, debug.then_some(CrhfDebug { h, m }))
}

/// `A'·spfy(x)`.
pub fn crhf_hash(key: &CrhfKey, x: &BitVec) -> Result<BitVec, CrhfError> {
    let expected = key.params.ttilde as usize;
    if x.len() != expected {
        return Err(CrhfError::Length {
            expected,
            found: x.len(),
        });
    }
    let mut h = BitVec::zeros(key.params.out_len as usize);
    for p in key.gadget.sparse_positions(x)? {
        h.xor_in_place(&key.a_cols[p]);
    }
    Ok(h)
}

/// Where a collision's difference vanishes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CollisionKind {
    /// `M·x' = 0`.
    KernelOfM,
    /// `M·x' != 0` but `H·(M·x') = 0`.
    MaskOnly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollisionReport {
    /// `spfy(x1) ⊕ spfy(x2)`.
    pub x_prime: BitVec,
    pub weight: usize,
    /// `M·x'`.
    pub mx: BitVec,
    pub kind: CollisionKind,
}

pub fn collision_analyze(key: &CrhfKey, x1: &BitVec, x2: &BitVec) -> Result<CollisionReport, CrhfError> {
    let dbg = key.debug.as_ref().ok_or(CrhfError::NoDebug)?;
    if x1 == x2 {
        return Err(CrhfError::SameInput);
    }
    if crhf_hash(key, x1)? != crhf_hash(key, x2)? {
        return Err(CrhfError::NotACollision);
    }
    let mut x_prime = sparsify(&key.gadget, x1)?;
    x_prime.xor_in_place(&sparsify(&key.gadget, x2)?);
    let mx = dbg.m.mul_vec(&x_prime)?;
    let kind = if mx.is_zero() {
        CollisionKind::KernelOfM
    } else {
        CollisionKind::MaskOnly
    };
    Ok(CollisionReport {
        weight: x_prime.weight(),
        x_prime,
        mx,
        kind,
    })
}

/// Exhaustive collision census over all `2^ttilde` inputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollisionCensus {
    pub inputs: u64,
    pub image: u64,
    /// Unordered colliding pairs.
    pub pairs: u64,
    pub kernel_of_m: u64,
    pub mask_only: u64,
}

/// Buckets all inputs by hash. Within a bucket every pair collides, and all
/// pairs satisfy `M·x' = 0` exactly when `M·spfy(x)` is constant on the bucket.
pub fn collision_census(key: &CrhfKey) -> Result<CollisionCensus, CrhfError> {
    let dbg = key.debug.as_ref().ok_or(CrhfError::NoDebug)?;
    let len = key.params.ttilde as usize;
    if len > 24 {
        return Err(CrhfError::Length { expected: 24, found: len });
    }
    let mut rows: Vec<(BitVec, BitVec)> = (0..1u64 << len)
        .map(|i| {
            let x = BitVec::from_u64(len, i);
            let xt = sparsify(&key.gadget, &x)?;
            Ok((crhf_hash(key, &x)?, dbg.m.mul_vec(&xt)?))
        })
        .collect::<Result<_, CrhfError>>()?;
    rows.sort_unstable();
    let mut census = CollisionCensus {
        inputs: 1 << len,
        image: 0,
        pairs: 0,
        kernel_of_m: 0,
        mask_only: 0,
    };
    for bucket in rows.chunk_by(|a, b| a.0 == b.0) {
        census.image += 1;
        let size = bucket.len() as u64;
        census.pairs += size * (size - 1) / 2;
        let same = bucket
            .chunk_by(|a, b| a.1 == b.1)
            .map(|g| g.len() as u64)
            .map(|g| g * (g - 1) / 2)
            .sum::<u64>();
        census.kernel_of_m += same;
        census.mask_only += size * (size - 1) / 2 - same;
    }
    Ok(census)
}
