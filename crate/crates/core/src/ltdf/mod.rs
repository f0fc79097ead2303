//! All-but-one lossy trapdoor function.
//!
//! The function key is `(A, B)` with `A = T·M` and
//! `B = S·A ⊕ E ⊕ Cᵀ·H_τ*·G`, where `Cᵀ` is the code's encoding map, `H_τ`
//! multiplication by `τ` in GF(2^L) and `G` the gadget matrix. On branch `τ`
//! the input `x` is sparsified to `x̃` and mapped to `(A·x̃, B_τ·x̃)` with
//! `B_τ = B ⊕ Cᵀ·H_τ·G`. Evaluation never materializes `Cᵀ·H_τ·G`: since
//! `G·x̃ = x`, the branch term is `encode(τ·x)`.

mod frd;

pub use frd::{is_irreducible, FrdFamily};

use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::ecc::{BlockCode, CodeRegistry, EccError};
use crate::gadget::{gadget_matrix, sparsify, GadgetError, GadgetParams};
use crate::gf2::io::{Bundle, Object};
use crate::gf2::{BitMatrix, BitVec, Gf2Error, SparseMatrix};
use crate::params::{ball_le, LtdfParams, ParamError};
use crate::sampling::{bernoulli_matrix, bernoulli_vec, good_sparse, GoodDistSpec, SamplingError};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LtdfError {
    #[error("expected {what} of length {expected}, got {found}")]
    Length {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("branch equals the lossy branch; inversion is undefined there")]
    LossyBranch,
    #[error("inversion failed: {0}")]
    InversionFailure(String),
    #[error("domain of 2^{0} inputs is too large to enumerate (limit 2^24)")]
    DomainTooLarge(usize),
    #[error("code does not fit the parameters: {0}")]
    CodeMismatch(String),
    #[error("debug fields are required for this operation")]
    NoDebug,
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Ecc(#[from] EccError),
    #[error(transparent)]
    Gadget(#[from] GadgetError),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

/// Public evaluation key.
#[derive(Clone, Debug)]
pub struct FunctionKey {
    params: LtdfParams,
    a: BitMatrix,
    b: BitMatrix,
    a_cols: Vec<BitVec>,
    b_cols: Vec<BitVec>,
    code: Arc<dyn BlockCode>,
    frd: FrdFamily,
    gadget: GadgetParams,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trapdoor {
    pub s: BitMatrix,
    pub tau_star: BitVec,
}

/// Secret intermediates kept only when generating in debug mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DebugParts {
    pub t: BitMatrix,
    pub m: SparseMatrix,
    pub e: BitMatrix,
}

#[derive(Clone, Debug)]
pub struct AboKeyPair {
    pub fk: FunctionKey,
    pub td: Trapdoor,
    pub debug: Option<DebugParts>,
}

impl FunctionKey {
    fn assemble(
        params: LtdfParams,
        a: BitMatrix,
        b: BitMatrix,
        code: Arc<dyn BlockCode>,
    ) -> Result<Self, LtdfError> {
        check_code(&params, code.as_ref())?;
        let gadget = GadgetParams::from_blocks(params.t as usize, params.s as usize)?;
        let m = params.m as usize;
        if a.rows() != params.rows() || a.cols() != m {
            return Err(LtdfError::Length {
                what: "A columns",
                expected: m,
                found: a.cols(),
            });
        }
        if b.rows() != params.ell as usize || b.cols() != m {
            return Err(LtdfError::Length {
                what: "B columns",
                expected: m,
                found: b.cols(),
            });
        }
        let a_cols = a.transpose().into_rows();
        let b_cols = b.transpose().into_rows();
        Ok(Self {
            frd: FrdFamily::new(params.l as usize),
            params,
            a,
            b,
            a_cols,
            b_cols,
            code,
            gadget,
        })
    }

    pub fn params(&self) -> &LtdfParams {
        &self.params
    }

    pub fn a(&self) -> &BitMatrix {
        &self.a
    }

    pub fn b(&self) -> &BitMatrix {
        &self.b
    }

    pub fn code(&self) -> &Arc<dyn BlockCode> {
        &self.code
    }

    pub fn frd(&self) -> &FrdFamily {
        &self.frd
    }

    pub fn gadget(&self) -> &GadgetParams {
        &self.gadget
    }

    /// Input and branch length `L`.
    pub fn input_len(&self) -> usize {
        self.params.l as usize
    }

    /// Output length `n/2 + ell`.
    pub fn output_len(&self) -> usize {
        self.params.rows() + self.params.ell as usize
    }

    /// Wire format: the parameter block followed by `A` and `B`.
    pub fn to_bytes(&self) -> Result<Vec<u8>, LtdfError> {
        let mut b = Bundle::new();
        b.push("params", Object::Text(kv_text(&self.params)));
        b.push("code", Object::Text(self.code.name().to_string()));
        b.push("A", Object::BitMatrix(self.a.clone()));
        b.push("B", Object::BitMatrix(self.b.clone()));
        Ok(b.to_bytes()?)
    }

    /// Rebuilds the code from `registry` and checks it is the one the key was made with.
    pub fn from_bytes(bytes: &[u8], registry: &mut CodeRegistry) -> Result<Self, LtdfError> {
        let mut b = Bundle::from_bytes(bytes)?;
        let params = LtdfParams::from_kv(&parse_kv(&b.take("params")?.into_text()?))?;
        let name = b.take("code")?.into_text()?;
        let code = registry.concatenated(params.l as usize)?;
        if code.name() != name {
            return Err(LtdfError::CodeMismatch(format!("key uses `{name}`, registry has `{}`", code.name())));
        }
        let a = b.take("A")?.into_bitmatrix()?;
        let bm = b.take("B")?.into_bitmatrix()?;
        Self::assemble(params, a, bm, code)
    }
}

impl Trapdoor {
    pub fn to_bytes(&self) -> Result<Vec<u8>, LtdfError> {
        let mut b = Bundle::new();
        b.push("S", Object::BitMatrix(self.s.clone()));
        b.push("tau_star", Object::BitVec(self.tau_star.clone()));
        Ok(b.to_bytes()?)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, LtdfError> {
        let mut b = Bundle::from_bytes(bytes)?;
        Ok(Self {
            s: b.take("S")?.into_bitmatrix()?,
            tau_star: b.take("tau_star")?.into_bitvec()?,
        })
    }
}

fn kv_text(p: &LtdfParams) -> String {
    p.to_kv().iter().map(|(k, v)| format!("{k}={v}\n")).collect()
}

fn parse_kv(s: &str) -> Vec<(String, String)> {
    s.lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn check_code(params: &LtdfParams, code: &dyn BlockCode) -> Result<(), LtdfError> {
    if code.dim() != params.l as usize || code.block_len() != params.ell as usize {
        return Err(LtdfError::CodeMismatch(format!(
            "code is [{}, {}], parameters need [{}, {}]",
            code.block_len(),
            code.dim(),
            params.ell,
            params.l
        )));
    }
    Ok(())
}

fn check_len(what: &'static str, v: &BitVec, expected: usize) -> Result<(), LtdfError> {
    if v.len() != expected {
        return Err(LtdfError::Length {
            what,
            expected,
            found: v.len(),
        });
    }
    Ok(())
}

/// Samples a key pair with lossy branch `tau_star`.
///
/// # Errors
/// Rejection sampling of `M` may give up; the code must be `[ell, L]`.
pub fn abo_gen<R: Rng + ?Sized>(
    params: &LtdfParams,
    tau_star: &BitVec,
    code: Arc<dyn BlockCode>,
    rng: &mut R,
    debug: bool,
) -> Result<AboKeyPair, LtdfError> {
    params.verify()?;
    check_code(params, code.as_ref())?;
    let l = params.l as usize;
    check_len("branch", tau_star, l)?;
    let (n, m, ell, rows) = (params.n as usize, params.m as usize, params.ell as usize, params.rows());

    let sparse = good_sparse(&GoodDistSpec::new(n, m, params.k as usize, params.good_d), rng)?;
    let t = BitMatrix::random(rows, n, rng);
    let a = sparse.left_mul(&t)?;
    let s = BitMatrix::random(ell, rows, rng);
    let e = bernoulli_matrix(params.eps, ell, m, rng)?;

    let frd = FrdFamily::new(l);
    let g_cols = gadget_matrix(&GadgetParams::from_blocks(params.t as usize, params.s as usize)?)
        .transpose()
        .into_rows();
    let branch_cols = g_cols
        .par_iter()
        .map(|g| code.encode(&frd.mul(tau_star, g)))
        .collect::<Result<Vec<_>, _>>()?;
    let branch = BitMatrix::from_columns(ell, &branch_cols)?;
    let b = s.mul(&a)?.add(&e)?.add(&branch)?;

    let fk = FunctionKey::assemble(params.clone(), a, b, code)?;
    Ok(AboKeyPair {
        fk,
        td: Trapdoor {
            s,
            tau_star: tau_star.clone(),
        },
        debug: debug.then_some(DebugParts { t, m: sparse, e }),
    })
}

/// `(A·x̃, B·x̃)` without the branch term.
fn eval_parts(fk: &FunctionKey, x: &BitVec) -> Result<(BitVec, BitVec), LtdfError> {
    let positions = fk.gadget.sparse_positions(x)?;
    let mut y1 = BitVec::zeros(fk.params.rows());
    let mut y2 = BitVec::zeros(fk.params.ell as usize);
    for &p in &positions {
        y1.xor_in_place(&fk.a_cols[p]);
        y2.xor_in_place(&fk.b_cols[p]);
    }
    Ok((y1, y2))
}

/// `F(fk, τ, x) = (A·x̃ ∥ B_τ·x̃)`.
pub fn abo_eval(fk: &FunctionKey, tau: &BitVec, x: &BitVec) -> Result<BitVec, LtdfError> {
    let l = fk.input_len();
    check_len("branch", tau, l)?;
    check_len("input", x, l)?;
    let (y1, mut y2) = eval_parts(fk, x)?;
    y2.xor_in_place(&fk.code.encode(&fk.frd.mul(tau, x))?);
    Ok(y1.concat(&y2))
}

/// `F(fk, τ, x)` through the explicit `ell × m` matrix `B_τ` (test oracle).
pub fn abo_eval_materialized(fk: &FunctionKey, tau: &BitVec, x: &BitVec) -> Result<BitVec, LtdfError> {
    let l = fk.input_len();
    check_len("branch", tau, l)?;
    check_len("input", x, l)?;
    let enc = crate::ecc::encoding_matrix(fk.code.as_ref())?;
    let branch = enc.mul(&fk.frd.matrix(tau))?.mul(&gadget_matrix(&fk.gadget))?;
    let b_tau = fk.b.add(&branch)?;
    let xt = sparsify(&fk.gadget, x)?;
    Ok(fk.a.mul_vec(&xt)?.concat(&b_tau.mul_vec(&xt)?))
}

/// Recovers `x` from `y = F(fk, τ, x)` on an injective branch.
///
/// # Errors
/// [`LtdfError::LossyBranch`] for `τ = τ*`; [`LtdfError::InversionFailure`]
/// when decoding fails or the decoded preimage does not re-evaluate to `y`.
pub fn abo_invert(td: &Trapdoor, fk: &FunctionKey, tau: &BitVec, y: &BitVec) -> Result<BitVec, LtdfError> {
    let l = fk.input_len();
    check_len("branch", tau, l)?;
    check_len("output", y, fk.output_len())?;
    if *tau == td.tau_star {
        return Err(LtdfError::LossyBranch);
    }
    let rows = fk.params.rows();
    let y1 = y.slice(0, rows);
    let mut y_prime = y.slice(rows, fk.params.ell as usize);
    y_prime.xor_in_place(&td.s.mul_vec(&y1)?);
    let z = fk.code.decode(&y_prime).map_err(|e| match e {
        EccError::DecodeFailure => LtdfError::InversionFailure("noise beyond the decoding radius".into()),
        other => other.into(),
    })?;
    let diff = &td.tau_star ^ tau;
    let inv = fk.frd.inv(&diff).expect("nonzero branch difference");
    let x = fk.frd.mul(&inv, &z);
    if abo_eval(fk, tau, &x)? != *y {
        return Err(LtdfError::InversionFailure("decoded preimage does not match".into()));
    }
    Ok(x)
}

/// Maximum of `weight(E·spfy(x))` over `samples` uniform `x`.
pub fn noise_weight_check<R: Rng + ?Sized>(
    e: &BitMatrix,
    gadget: &GadgetParams,
    samples: usize,
    rng: &mut R,
) -> Result<usize, LtdfError> {
    if e.cols() != gadget.n() {
        return Err(LtdfError::Length {
            what: "noise columns",
            expected: gadget.n(),
            found: e.cols(),
        });
    }
    let cols = e.transpose().into_rows();
    let mut worst = 0;
    for _ in 0..samples {
        let x = BitVec::random(gadget.dense_len(), rng);
        let mut acc = BitVec::zeros(e.rows());
        for p in gadget.sparse_positions(&x)? {
            acc.xor_in_place(&cols[p]);
        }
        worst = worst.max(acc.weight());
    }
    Ok(worst)
}

/// Per-coordinate rate of `E·x̃` over fresh `ell × t` noise blocks, against
/// the piling-up value `(1 - (1 - 2ε)^t) / 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseMarginal {
    pub observed: f64,
    pub expected: f64,
    pub stderr: f64,
    pub bits: u64,
}

impl NoiseMarginal {
    pub fn sigmas(&self) -> f64 {
        if self.stderr == 0.0 {
            if self.observed == self.expected {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.observed - self.expected).abs() / self.stderr
        }
    }
}

pub fn noise_marginal<R: Rng + ?Sized>(
    eps: f64,
    ell: usize,
    t: usize,
    samples: usize,
    rng: &mut R,
) -> Result<NoiseMarginal, LtdfError> {
    let mut ones = 0u64;
    for _ in 0..samples {
        let mut acc = BitVec::zeros(ell);
        for _ in 0..t {
            acc.xor_in_place(&bernoulli_vec(eps, ell, rng)?);
        }
        ones += acc.weight() as u64;
    }
    let bits = (samples * ell) as u64;
    let expected = (1.0 - (1.0 - 2.0 * eps).powi(t as i32)) / 2.0;
    Ok(NoiseMarginal {
        observed: ones as f64 / bits as f64,
        expected,
        stderr: (expected * (1.0 - expected) / bits as f64).sqrt(),
        bits,
    })
}

/// Exhaustive image counts on the lossy branch and one injective branch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lossiness {
    pub domain: u64,
    pub injective_branch: BitVec,
    pub injective_image: u64,
    pub lossy_image: u64,
    /// Distinct `A·x̃` values.
    pub distinct_y1: u64,
    /// Largest `weight(y₂ ⊕ S·y₁)` on the lossy branch.
    pub max_noise: usize,
    /// `distinct_y1 · |B≤(ell, max_noise)|`, saturating at `u64::MAX`.
    pub bound: u64,
}

impl Lossiness {
    pub fn ratio(&self) -> f64 {
        self.lossy_image as f64 / self.domain as f64
    }
}

/// Largest input length [`lossiness_measure`] will enumerate.
pub const MAX_ENUM_BITS: usize = 24;

fn count_distinct(mut v: Vec<BitVec>) -> u64 {
    v.par_sort_unstable();
    v.dedup();
    v.len() as u64
}

/// Enumerates every `x` on branch `τ*` and on `τ* ⊕ 1`.
pub fn lossiness_measure(fk: &FunctionKey, td: &Trapdoor) -> Result<Lossiness, LtdfError> {
    let l = fk.input_len();
    if l > MAX_ENUM_BITS {
        return Err(LtdfError::DomainTooLarge(l));
    }
    let domain = 1u64 << l;
    let mut one = BitVec::zeros(l);
    one.set(0, true);
    let injective_branch = &td.tau_star ^ &one;

    let input = |i: u64| BitVec::from_u64(l, i);
    let injective = (0..domain)
        .into_par_iter()
        .map(|i| abo_eval(fk, &injective_branch, &input(i)))
        .collect::<Result<Vec<_>, _>>()?;
    let injective_image = count_distinct(injective);

    let lossy = (0..domain)
        .into_par_iter()
        .map(|i| abo_eval(fk, &td.tau_star, &input(i)))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = fk.params.rows();
    let ell = fk.params.ell as usize;
    let noise = lossy
        .par_iter()
        .map(|y| {
            let y1 = y.slice(0, rows);
            let mut r = y.slice(rows, ell);
            r.xor_in_place(&td.s.mul_vec(&y1)?);
            Ok(r.weight())
        })
        .collect::<Result<Vec<_>, Gf2Error>>()?;
    let max_noise = noise.into_iter().max().unwrap_or(0);
    let distinct_y1 = count_distinct(lossy.iter().map(|y| y.slice(0, rows)).collect());
    let lossy_image = count_distinct(lossy);
    let bound = (ball_le(ell as u64, max_noise as u64) * distinct_y1)
        .try_into()
        .unwrap_or(u64::MAX);
    Ok(Lossiness {
        domain,
        injective_branch,
        injective_image,
        lossy_image,
        distinct_y1,
        max_noise,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::Seed;

    fn tiny_pair(eps: Option<f64>, debug: bool) -> AboKeyPair {
        let mut p = LtdfParams::tiny_exhaustive();
        if let Some(e) = eps {
            p = p.with_eps(e);
        }
        let code = CodeRegistry::new().concatenated(p.l as usize).unwrap();
        let mut rng = Seed::from_u64(11).rng();
        let tau = BitVec::from_u64(p.l as usize, 0x5a3);
        abo_gen(&p, &tau, code, &mut rng, debug).unwrap()
    }

    #[test]
    fn shapes_and_debug_reconstruction() {
        let kp = tiny_pair(None, true);
        let p = kp.fk.params().clone();
        assert_eq!((kp.fk.a().rows(), kp.fk.a().cols()), (p.rows(), p.m as usize));
        assert_eq!((kp.fk.b().rows(), kp.fk.b().cols()), (p.ell as usize, p.m as usize));
        let dbg = kp.debug.as_ref().unwrap();
        assert_eq!(dbg.m.left_mul(&dbg.t).unwrap(), *kp.fk.a());
    }

    #[test]
    fn lossy_branch_cancels_without_noise() {
        let kp = tiny_pair(Some(0.0), false);
        let x = BitVec::from_u64(12, 0xabc);
        let y = abo_eval(&kp.fk, &kp.td.tau_star, &x).unwrap();
        let rows = kp.fk.params().rows();
        let y1 = y.slice(0, rows);
        assert_eq!(y.slice(rows, y.len() - rows), kp.td.s.mul_vec(&y1).unwrap());
        assert_eq!(
            abo_invert(&kp.td, &kp.fk, &kp.td.tau_star, &y),
            Err(LtdfError::LossyBranch)
        );
    }

    #[test]
    fn key_bytes_round_trip() {
        let kp = tiny_pair(None, false);
        let bytes = kp.fk.to_bytes().unwrap();
        let back = FunctionKey::from_bytes(&bytes, &mut CodeRegistry::new()).unwrap();
        assert_eq!(back.a(), kp.fk.a());
        assert_eq!(back.b(), kp.fk.b());
        assert_eq!(back.params(), kp.fk.params());
        let td = Trapdoor::from_bytes(&kp.td.to_bytes().unwrap()).unwrap();
        assert_eq!(td, kp.td);
    }
}
