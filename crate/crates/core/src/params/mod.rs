//! Compression-regime calculator and the parameter chains for the hash and
//! the lossy trapdoor function.
//!
//! Every derived quantity is an exact rational or integer, except values that
//! pass through the binary entropy function.

mod arith;
mod crhf;
mod ltdf;

pub use arith::{
    ball_le, binomial, ceil_pow_ratio, entropy, entropy_inv, exact_log2, fmt_ratio, hamming_ball_sizes,
    log2_big, parse_ratio, ratio_to_f64, BallSizes,
};
pub use crhf::{derive_crhf, CrhfParams};
pub use ltdf::{derive_ltdf, CodeSpec, LtdfInputs, LtdfParams, LtdfSizing, ALPHA_GRID_CAP};

use std::fmt;

use num_bigint::BigUint;
use num_rational::Rational64;
use num_traits::{One, Pow};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ParamError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("no feasible parameters: {0}")]
    Infeasible(String),
    #[error("bad parameter file: {0}")]
    Parse(String),
}

/// `δ_min(k, D) = 1 - (k/2 - 1)/(D·k - 1)`.
pub fn min_delta(k: u64, d: Rational64) -> Rational64 {
    let k = Rational64::from_integer(k as i64);
    let two = Rational64::from_integer(2);
    Rational64::one() - (k / two - 1) / (d * k - 1)
}

/// `m_min = ceil(n^(1 + (D·k - 1)(1 - δ)))`.
pub fn min_m(n: u64, k: u64, d: Rational64, delta: Rational64) -> Result<BigUint, ParamError> {
    let k = Rational64::from_integer(k as i64);
    let e = Rational64::one() + (d * k - 1) * (Rational64::one() - delta);
    ceil_pow_ratio(n, e)
}

/// A concrete point `(n, m, t)` with column weight `k` and compression factor `D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompressionRegime {
    pub k: u64,
    pub d: Rational64,
    /// `t = n^delta`; exact when `n` and `t` are powers of two.
    pub delta: Rational64,
    pub n: u64,
    pub m: u64,
    pub t: u64,
}

impl CompressionRegime {
    pub fn new(k: u64, d: Rational64, n: u64, m: u64, t: u64) -> Self {
        let delta = match (exact_log2(n), exact_log2(t)) {
            (Some(ln), Some(lt)) if ln > 0 => Rational64::new(lt as i64, ln as i64),
            _ => Rational64::approximate_float((t as f64).ln() / (n as f64).ln())
                .unwrap_or_else(|| Rational64::from_integer(0)),
        };
        Self { k, d, delta, n, m, t }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompressionFailure {
    /// `m >= n^(k/2)`.
    SampleCap,
    /// `t = 0` or `t >= m`.
    Degenerate,
    /// `t` does not divide `m`.
    Irregular,
    /// The regular-ball inequality does not hold.
    Margin,
}

impl fmt::Display for CompressionFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CompressionFailure::SampleCap => "sample-cap",
            CompressionFailure::Degenerate => "degenerate",
            CompressionFailure::Irregular => "irregular",
            CompressionFailure::Margin => "margin",
        })
    }
}

/// Outcome of [`check_compression`].
#[derive(Clone, Debug, PartialEq)]
pub struct CompressionCheck {
    pub pass: bool,
    pub failures: Vec<CompressionFailure>,
    /// `t·log2(m/t)`.
    pub lhs_log2: f64,
    /// `D·min(k·t·log2(e·n/(k·t)) + 1, n)`.
    pub rhs_log2: f64,
    pub margin_log2: f64,
    /// `delta > δ_min(k, D)`.
    pub delta_above_min: bool,
    /// `m >= m_min(n, k, D, delta)`.
    pub m_above_min: bool,
    /// Exact comparison `|B_reg(m,t)| > |B≤(n, kt)|^D` when small enough to evaluate.
    pub exact: Option<bool>,
}

/// `log2 |B≤(n, w)|` upper bound used on the right-hand side.
fn ball_log2_bound(n: u64, w: u64) -> f64 {
    if w == 0 {
        return 0.0;
    }
    let wf = w as f64;
    let stirling = wf * (std::f64::consts::E * n as f64 / wf).log2() + 1.0;
    if w >= n {
        n as f64
    } else {
        stirling.min(n as f64)
    }
}

/// Evaluates the regular-ball compression inequality in log form.
pub fn check_compression(r: &CompressionRegime) -> CompressionCheck {
    let mut failures = Vec::new();
    let n_big = BigUint::from(r.n);
    if BigUint::from(r.m).pow(2u32) >= n_big.pow(r.k as u32) {
        failures.push(CompressionFailure::SampleCap);
    }
    let degenerate = r.t == 0 || r.t >= r.m;
    if degenerate {
        failures.push(CompressionFailure::Degenerate);
    } else if !r.m.is_multiple_of(r.t) {
        failures.push(CompressionFailure::Irregular);
    }
    let lhs = if degenerate {
        0.0
    } else {
        match exact_log2(r.m / r.t) {
            Some(s) if r.m.is_multiple_of(r.t) => (r.t * s as u64) as f64,
            _ => r.t as f64 * (r.m as f64 / r.t as f64).log2(),
        }
    };
    let rhs = ratio_to_f64(r.d) * ball_log2_bound(r.n, r.k * r.t);
    let margin = lhs - rhs;
    if !(margin > 0.0) && !degenerate {
        failures.push(CompressionFailure::Margin);
    }
    let delta_above_min = r.delta > min_delta(r.k, r.d);
    let m_above_min = min_m(r.n, r.k, r.d, r.delta).is_ok_and(|mm| BigUint::from(r.m) >= mm);
    let exact = exact_compression(r);
    CompressionCheck {
        pass: failures.is_empty(),
        failures,
        lhs_log2: lhs,
        rhs_log2: rhs,
        margin_log2: margin,
        delta_above_min,
        m_above_min,
        exact,
    }
}

/// `(m/t)^(t·q) > |B≤(n, kt)|^p` for `D = p/q`, when the numbers stay manageable.
fn exact_compression(r: &CompressionRegime) -> Option<bool> {
    if r.t == 0 || r.t >= r.m || !r.m.is_multiple_of(r.t) || r.n > 1 << 14 {
        return None;
    }
    let p = u32::try_from(*r.d.numer()).ok()?;
    let q = u32::try_from(*r.d.denom()).ok()?;
    let per_block = r.m / r.t;
    let lhs_bits = r.t as f64 * (per_block as f64).log2() * q as f64;
    let rhs_bits = r.n as f64 * p as f64;
    if lhs_bits > 4.0e6 || rhs_bits > 4.0e6 {
        return None;
    }
    let lhs = BigUint::from(per_block).pow(r.t as u32 * q);
    let rhs = ball_le(r.n, r.k * r.t).pow(p);
    Some(lhs > rhs)
}

/// Ordered key/value rendering used by reports and parameter files.
pub type KvList = Vec<(String, String)>;

pub(crate) fn kv_lookup<'a>(kv: &'a [(String, String)], key: &str) -> Result<&'a str, ParamError> {
    kv.iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| ParamError::Parse(format!("missing key `{key}`")))
}

pub(crate) fn kv_u64(kv: &[(String, String)], key: &str) -> Result<u64, ParamError> {
    kv_lookup(kv, key)?
        .parse()
        .map_err(|_| ParamError::Parse(format!("`{key}` is not an integer")))
}
