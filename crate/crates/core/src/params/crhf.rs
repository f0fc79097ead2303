use num_bigint::BigUint;
use num_rational::Rational64;
use num_traits::{One, Pow, ToPrimitive};

use super::arith::ceil_div;
use super::{
    exact_log2, fmt_ratio, kv_lookup, kv_u64, min_delta, min_m, parse_ratio, ratio_to_f64, KvList, ParamError,
};

/// Parameters of the sparse-matrix hash.
#[derive(Clone, Debug, PartialEq)]
pub struct CrhfParams {
    pub k: u64,
    pub d: Rational64,
    pub delta: Rational64,
    pub n: u64,
    pub m: u64,
    pub t: u64,
    pub s: u64,
    /// Input length `t·s`.
    pub ttilde: u64,
    /// `1/2 - 1/D`.
    pub rho: Rational64,
    /// `log2(n) / (8t)`.
    pub eps: f64,
    pub lambda: u64,
    /// Output length `ceil((1 - rho)·ttilde)`.
    pub out_len: u64,
    pub good_d: usize,
}

fn rho_of(d: Rational64) -> Rational64 {
    Rational64::new(1, 2) - Rational64::one() / d
}

fn out_len_of(rho: Rational64, ttilde: u64) -> u64 {
    let keep = Rational64::one() - rho;
    ceil_div(ttilde * *keep.numer() as u64, *keep.denom() as u64)
}

/// Smallest power-of-two `n` admitting `t = 2^j` with `j / log2 n > δ_min`,
/// `t > 2λ/ρ`, `m = t·2^s >= m_min` and `m < n^(k/2)`.
///
/// # Errors
/// `D <= 2` (no compression), or no `n <= 2^40` works.
pub fn derive_crhf(k: u64, d: Rational64, lambda: u64) -> Result<CrhfParams, ParamError> {
    if d <= Rational64::from_integer(2) {
        return Err(ParamError::Domain(format!("the hash needs D > 2, got {d}")));
    }
    if k < 3 {
        return Err(ParamError::Domain(format!("k must be at least 3, got {k}")));
    }
    let rho = rho_of(d);
    let dmin = min_delta(k, d);
    for e in 2..=40i64 {
        let Some(j) = (1..e).find(|&j| Rational64::new(j, e) > dmin) else {
            continue;
        };
        let t = 1u64 << j;
        if Rational64::from_integer(t as i64) * rho <= Rational64::from_integer(2 * lambda as i64) {
            continue;
        }
        let n = 1u64 << e;
        let delta = Rational64::new(j, e);
        let mmin = min_m(n, k, d, delta)?;
        let cap = BigUint::from(n).pow(k as u32);
        let mut s = 1u64;
        while BigUint::from(t) << s < mmin {
            s += 1;
        }
        if s + j as u64 >= 63 || (BigUint::from(t) << s).pow(2u32) >= cap {
            continue;
        }
        let ttilde = t * s;
        let out_len = out_len_of(rho, ttilde);
        if ttilde - out_len <= 2 * lambda {
            continue;
        }
        let p = CrhfParams {
            k,
            d,
            delta,
            n,
            m: t << s,
            t,
            s,
            ttilde,
            rho,
            eps: e as f64 / (8.0 * t as f64),
            lambda,
            out_len,
            good_d: 1,
        };
        p.verify()?;
        return Ok(p);
    }
    Err(ParamError::Infeasible(format!(
        "no n <= 2^40 for k={k}, D={d}, lambda={lambda}"
    )))
}

impl CrhfParams {
    /// Hand-picked sizes, still subject to every invariant.
    pub fn explicit(k: u64, d: Rational64, n: u64, t: u64, s: u64, lambda: u64) -> Result<Self, ParamError> {
        if d <= Rational64::from_integer(2) {
            return Err(ParamError::Domain(format!("the hash needs D > 2, got {d}")));
        }
        let rho = rho_of(d);
        let ttilde = t * s;
        let delta = match (exact_log2(n), exact_log2(t)) {
            (Some(ln), Some(lt)) if ln > 0 => Rational64::new(lt as i64, ln as i64),
            _ => Rational64::approximate_float((t as f64).ln() / (n as f64).ln())
                .unwrap_or_else(|| Rational64::from_integer(0)),
        };
        let p = CrhfParams {
            k,
            d,
            delta,
            n,
            m: t << s,
            t,
            s,
            ttilde,
            rho,
            eps: (n as f64).log2() / (8.0 * t as f64),
            lambda,
            out_len: out_len_of(rho, ttilde),
            good_d: 1,
        };
        p.verify()?;
        Ok(p)
    }

    /// Exhaustively searchable setting: `k = 3`, `t = 2`, `s = 8` (16-bit
    /// inputs, 14-bit outputs), `n = 15`, `D = 8/3`.
    pub fn tiny() -> Self {
        Self::explicit(3, Rational64::new(8, 3), 15, 2, 8, 0).expect("tiny hash preset is valid")
    }

    pub fn verify(&self) -> Result<(), ParamError> {
        let fail = |msg: String| Err(ParamError::Invariant(msg));
        if self.d <= Rational64::from_integer(2) {
            return fail(format!("D = {} must exceed 2", self.d));
        }
        if self.rho != rho_of(self.d) {
            return fail("rho != 1/2 - 1/D".into());
        }
        if self.ttilde != self.t * self.s || self.s == 0 || self.m != self.t << self.s {
            return fail(format!(
                "need ttilde = t*s and m = t*2^s (t={}, s={}, m={}, ttilde={})",
                self.t, self.s, self.m, self.ttilde
            ));
        }
        if self.rho * Rational64::from_integer(self.ttilde as i64)
            <= Rational64::from_integer(2 * self.lambda as i64)
        {
            return fail(format!("rho*ttilde must exceed 2*lambda = {}", 2 * self.lambda));
        }
        if self.out_len != out_len_of(self.rho, self.ttilde) {
            return fail("out_len != ceil((1-rho)*ttilde)".into());
        }
        if self.out_len + 2 * self.lambda >= self.ttilde {
            return fail(format!(
                "output {} is not shorter than input {} by more than 2*lambda",
                self.out_len, self.ttilde
            ));
        }
        let eps = (self.n as f64).log2() / (8.0 * self.t as f64);
        if eps != self.eps {
            return fail(format!("eps {} != log2(n)/(8t) = {eps}", self.eps));
        }
        Ok(())
    }

    /// Whether `delta` lies above `δ_min(k, D)`; informational for tiny presets.
    pub fn delta_above_min(&self) -> bool {
        self.delta > min_delta(self.k, self.d)
    }

    pub fn to_kv(&self) -> KvList {
        [
            ("scheme", "crhf".to_string()),
            ("k", self.k.to_string()),
            ("D", fmt_ratio(self.d)),
            ("delta", fmt_ratio(self.delta)),
            ("delta_min", fmt_ratio(min_delta(self.k, self.d))),
            ("n", self.n.to_string()),
            ("m", self.m.to_string()),
            ("t", self.t.to_string()),
            ("s", self.s.to_string()),
            ("ttilde", self.ttilde.to_string()),
            ("rho", fmt_ratio(self.rho)),
            ("eps", format!("{}", self.eps)),
            ("lambda", self.lambda.to_string()),
            ("out_len", self.out_len.to_string()),
            ("compression_bits", (self.ttilde - self.out_len).to_string()),
            ("good_d", self.good_d.to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }

    pub fn from_kv(kv: &[(String, String)]) -> Result<Self, ParamError> {
        if kv_lookup(kv, "scheme")? != "crhf" {
            return Err(ParamError::Parse("not a crhf parameter set".into()));
        }
        let mut p = Self::explicit(
            kv_u64(kv, "k")?,
            parse_ratio(kv_lookup(kv, "D")?)?,
            kv_u64(kv, "n")?,
            kv_u64(kv, "t")?,
            kv_u64(kv, "s")?,
            kv_u64(kv, "lambda")?,
        )?;
        p.good_d = kv_u64(kv, "good_d")?.to_usize().unwrap_or(usize::MAX);
        for (key, value) in p.to_kv() {
            if let Ok(stored) = kv_lookup(kv, &key) {
                if stored != value {
                    return Err(ParamError::Parse(format!(
                        "`{key}` = {stored} disagrees with the derivation ({value})"
                    )));
                }
            }
        }
        Ok(p)
    }

    /// Fraction of input bits saved, as a float.
    pub fn rho_f64(&self) -> f64 {
        ratio_to_f64(self.rho)
    }
}
