use num_bigint::BigUint;
use num_rational::Rational64;
use num_traits::{One, ToPrimitive};

use super::arith::ceil_div;
use super::{
    check_compression, entropy_inv, exact_log2, fmt_ratio, kv_lookup, kv_u64, min_delta, min_m, parse_ratio,
    ratio_to_f64, CompressionCheck, CompressionRegime, KvList, ParamError,
};

/// Largest `alpha` tried; the grid is `0.5, 1.0, ..., ALPHA_GRID_CAP`.
pub const ALPHA_GRID_CAP: i64 = 64;

/// What the parameter chain needs to know about the error-correcting code.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CodeSpec {
    /// Rate `dim / blockLen`.
    pub rho: Rational64,
    /// Guaranteed correctable fraction `tErr / blockLen`.
    pub delta: f64,
}

impl CodeSpec {
    /// Constants guaranteed by the shipped concatenated code.
    pub fn concatenated() -> Self {
        Self {
            rho: Rational64::new(1, 8),
            delta: 1.0 / 32.0,
        }
    }
}

/// How `(n, t, m)` are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LtdfSizing {
    /// `t = 2^j` with `j / log2 n` just above `δ_min`, `m` the smallest
    /// `t·2^s >= m_min`.
    Asymptotic { n: u64 },
    /// Fixed `n`, `t` and `s = log2(m/t)`.
    Explicit { n: u64, t: u64, s: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LtdfInputs {
    pub k: u64,
    /// Lossiness factor `Γ > 1`.
    pub big_gamma: Rational64,
    /// Compression factor; defaults to `Γ + 1`.
    pub d: Option<Rational64>,
    pub code: CodeSpec,
    pub sizing: LtdfSizing,
    /// Dual-distance requirement for the sparse matrix at key generation.
    pub good_d: usize,
}

/// The full derived parameter set of the lossy trapdoor function.
#[derive(Clone, Debug, PartialEq)]
pub struct LtdfParams {
    pub k: u64,
    pub big_gamma: Rational64,
    pub d: Rational64,
    /// `D' = Γ·D / (D - Γ)`, so that `1/D + 1/D' = 1/Γ`.
    pub d_prime: Rational64,
    pub delta: Rational64,
    pub n: u64,
    pub m: u64,
    pub t: u64,
    pub s: u64,
    /// Input and branch length `L = t·s`.
    pub l: u64,
    /// Code block length `ceil(L / rho_c)`.
    pub ell: u64,
    pub rho_c: Rational64,
    pub delta_c: f64,
    /// `min(delta_c, H^-1(rho_c / D'))`.
    pub gamma: f64,
    pub alpha: Rational64,
    /// `gamma / ((alpha + 1)·t)`.
    pub eps: f64,
    pub good_d: usize,
    pub regime: CompressionCheck,
}

fn alpha_ok(alpha: Rational64, rho_c: Rational64, gamma: f64) -> bool {
    let lhs = ratio_to_f64(alpha * alpha / (alpha + 1));
    lhs > ratio_to_f64(rho_c) / gamma
}

/// Derives every LTDF quantity from `(k, Γ, code, sizing)`.
///
/// # Errors
/// [`ParamError::Infeasible`] when no grid value of `alpha` works (the code
/// is too weak for this `Γ`, `D`), or the sizing cannot be realized.
pub fn derive_ltdf(inp: &LtdfInputs) -> Result<LtdfParams, ParamError> {
    let one = Rational64::one();
    if inp.big_gamma <= one {
        return Err(ParamError::Domain(format!("Gamma must exceed 1, got {}", inp.big_gamma)));
    }
    if inp.k < 3 {
        return Err(ParamError::Domain(format!("k must be at least 3, got {}", inp.k)));
    }
    if inp.code.rho <= Rational64::from_integer(0) || inp.code.rho > one {
        return Err(ParamError::Domain(format!("code rate {} outside (0, 1]", inp.code.rho)));
    }
    if !(inp.code.delta > 0.0 && inp.code.delta < 0.5) {
        return Err(ParamError::Domain(format!("code distance fraction {} outside (0, 1/2)", inp.code.delta)));
    }
    let d = inp.d.unwrap_or(inp.big_gamma + one);
    if d <= inp.big_gamma {
        return Err(ParamError::Domain(format!("need D > Gamma, got D={d}, Gamma={}", inp.big_gamma)));
    }
    let d_prime = inp.big_gamma * d / (d - inp.big_gamma);

    let (n, t, s) = match inp.sizing {
        LtdfSizing::Explicit { n, t, s } => (n, t, s),
        LtdfSizing::Asymptotic { n } => asymptotic_sizes(inp.k, d, n)?,
    };
    if n < 2 || n % 2 != 0 {
        return Err(ParamError::Domain(format!("n must be even and at least 2, got {n}")));
    }
    if s == 0 || s >= 40 {
        return Err(ParamError::Domain(format!("s = log2(m/t) must be in 1..40, got {s}")));
    }
    let m = t
        .checked_mul(1u64 << s)
        .ok_or_else(|| ParamError::Infeasible("m overflows u64".into()))?;
    let l = t * s;
    let delta = CompressionRegime::new(inp.k, d, n, m, t).delta;

    let rho_c = inp.code.rho;
    let ell = ceil_div(l * *rho_c.denom() as u64, *rho_c.numer() as u64);
    let gamma = inp.code.delta.min(entropy_inv(ratio_to_f64(rho_c / d_prime))?);
    let alpha = (1..=2 * ALPHA_GRID_CAP)
        .map(|i| Rational64::new(i, 2))
        .find(|&a| alpha_ok(a, rho_c, gamma))
        .ok_or_else(|| {
            ParamError::Infeasible(format!(
                "no alpha <= {ALPHA_GRID_CAP} with alpha^2/(alpha+1) > rho_C/gamma = {:.3}",
                ratio_to_f64(rho_c) / gamma
            ))
        })?;
    let eps = gamma / ((ratio_to_f64(alpha) + 1.0) * t as f64);
    let regime = check_compression(&CompressionRegime {
        k: inp.k,
        d,
        delta,
        n,
        m,
        t,
    });
    let p = LtdfParams {
        k: inp.k,
        big_gamma: inp.big_gamma,
        d,
        d_prime,
        delta,
        n,
        m,
        t,
        s,
        l,
        ell,
        rho_c,
        delta_c: inp.code.delta,
        gamma,
        alpha,
        eps,
        good_d: inp.good_d,
        regime,
    };
    p.verify()?;
    Ok(p)
}

fn asymptotic_sizes(k: u64, d: Rational64, n: u64) -> Result<(u64, u64, u64), ParamError> {
    let log_n = exact_log2(n)
        .ok_or_else(|| ParamError::Domain(format!("asymptotic sizing needs a power-of-two n, got {n}")))?
        as i64;
    let dmin = min_delta(k, d);
    let j = (1..log_n)
        .find(|&j| Rational64::new(j, log_n) > dmin)
        .ok_or_else(|| ParamError::Infeasible(format!("no t = 2^j < n with j/log2(n) > {dmin}")))?;
    let t = 1u64 << j;
    let delta = Rational64::new(j, log_n);
    let mmin = min_m(n, k, d, delta)?;
    let mut s = 1u64;
    while BigUint::from(t) << s < mmin {
        s += 1;
        if s >= 40 {
            return Err(ParamError::Infeasible(format!("m_min = {mmin} is beyond desk scale")));
        }
    }
    Ok((n, t, s))
}

impl LtdfParams {
    /// Rows of the compressing matrix `T`.
    pub fn rows(&self) -> usize {
        (self.n / 2) as usize
    }

    /// Re-checks every declared invariant.
    pub fn verify(&self) -> Result<(), ParamError> {
        let fail = |msg: String| Err(ParamError::Invariant(msg));
        let one = Rational64::one();
        if one / self.d + one / self.d_prime != one / self.big_gamma {
            return fail(format!(
                "1/D + 1/D' != 1/Gamma (D={}, D'={}, Gamma={})",
                self.d, self.d_prime, self.big_gamma
            ));
        }
        let gamma = self.delta_c.min(entropy_inv(ratio_to_f64(self.rho_c / self.d_prime))?);
        if gamma != self.gamma {
            return fail(format!("gamma {} != min(delta_C, H^-1(rho_C/D')) = {gamma}", self.gamma));
        }
        if !alpha_ok(self.alpha, self.rho_c, self.gamma) {
            return fail(format!("alpha = {} violates alpha^2/(alpha+1) > rho_C/gamma", self.alpha));
        }
        let ell = ceil_div(self.l * *self.rho_c.denom() as u64, *self.rho_c.numer() as u64);
        if ell != self.ell {
            return fail(format!("ell {} != ceil(L / rho_C) = {ell}", self.ell));
        }
        let eps = self.gamma / ((ratio_to_f64(self.alpha) + 1.0) * self.t as f64);
        // A zero rate is the one allowed override (noiseless checks).
        if eps != self.eps && self.eps != 0.0 {
            return fail(format!("eps {} != gamma/((alpha+1)t) = {eps}", self.eps));
        }
        if self.s == 0 || self.t == 0 || !self.m.is_multiple_of(self.t) || self.m / self.t != 1 << self.s {
            return fail(format!("m/t must be 2^s with s >= 1 (m={}, t={}, s={})", self.m, self.t, self.s));
        }
        if self.l != self.t * self.s {
            return fail(format!("L {} != t*s", self.l));
        }
        if self.gamma > self.delta_c {
            return fail("gamma exceeds delta_C".into());
        }
        if !self.n.is_multiple_of(2) {
            return fail("n must be even".into());
        }
        Ok(())
    }

    /// Number of correctable errors implied by the parameters: `floor(gamma·ell)`.
    pub fn noise_budget(&self) -> u64 {
        (self.gamma * self.ell as f64).floor() as u64
    }

    /// Desk-scale preset: `k = 6`, `Γ = 3/2`, `D = 3`, `n = 64`, `t = 32`, `m = 4096`.
    pub fn desk() -> Self {
        derive_ltdf(&LtdfInputs {
            k: 6,
            big_gamma: Rational64::new(3, 2),
            d: Some(Rational64::from_integer(3)),
            code: CodeSpec::concatenated(),
            sizing: LtdfSizing::Explicit { n: 64, t: 32, s: 7 },
            good_d: 3,
        })
        .expect("desk preset is valid")
    }

    /// Enumerable preset in the compression regime: `n = 8`, `t = 4`, `L = 20`.
    pub fn tiny_lossy() -> Self {
        derive_ltdf(&LtdfInputs {
            k: 6,
            big_gamma: Rational64::new(3, 2),
            d: Some(Rational64::from_integer(2)),
            code: CodeSpec::concatenated(),
            sizing: LtdfSizing::Explicit { n: 8, t: 4, s: 5 },
            good_d: 1,
        })
        .expect("tiny lossy preset is valid")
    }

    /// Smallest preset, `L = 12`, for exhaustive round-trip checks.
    pub fn tiny_exhaustive() -> Self {
        derive_ltdf(&LtdfInputs {
            k: 6,
            big_gamma: Rational64::new(3, 2),
            d: Some(Rational64::from_integer(2)),
            code: CodeSpec::concatenated(),
            sizing: LtdfSizing::Explicit { n: 8, t: 4, s: 3 },
            good_d: 1,
        })
        .expect("tiny exhaustive preset is valid")
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "desk" => Some(Self::desk()),
            "tiny" | "tiny-lossy" => Some(Self::tiny_lossy()),
            "tiny-exhaustive" => Some(Self::tiny_exhaustive()),
            _ => None,
        }
    }

    /// Copy with the noise rate replaced (used for noiseless checks).
    pub fn with_eps(&self, eps: f64) -> Self {
        Self { eps, ..self.clone() }
    }

    pub fn to_kv(&self) -> KvList {
        let r = &self.regime;
        let mut kv: KvList = vec![
            ("scheme", "ltdf".to_string()),
            ("k", self.k.to_string()),
            ("Gamma", fmt_ratio(self.big_gamma)),
            ("D", fmt_ratio(self.d)),
            ("Dprime", fmt_ratio(self.d_prime)),
            ("delta", fmt_ratio(self.delta)),
            ("delta_min", fmt_ratio(min_delta(self.k, self.d))),
            ("n", self.n.to_string()),
            ("m", self.m.to_string()),
            ("t", self.t.to_string()),
            ("s", self.s.to_string()),
            ("L", self.l.to_string()),
            ("ell", self.ell.to_string()),
            ("rho_C", fmt_ratio(self.rho_c)),
            ("delta_C", format!("{}", self.delta_c)),
            ("gamma", format!("{}", self.gamma)),
            ("alpha", fmt_ratio(self.alpha)),
            ("eps", format!("{}", self.eps)),
            ("gamma_ell", format!("{}", self.gamma * self.ell as f64)),
            ("good_d", self.good_d.to_string()),
            ("regime_pass", r.pass.to_string()),
            ("regime_margin_log2", format!("{}", r.margin_log2)),
            ("regime_delta_above_min", r.delta_above_min.to_string()),
            ("regime_m_above_min", r.m_above_min.to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        if let Some(x) = r.exact {
            kv.push(("regime_exact".into(), x.to_string()));
        }
        kv
    }

    /// Rebuilds parameters from a key/value list by re-deriving from the
    /// inputs and checking every stored value against the derivation.
    pub fn from_kv(kv: &[(String, String)]) -> Result<Self, ParamError> {
        if kv_lookup(kv, "scheme")? != "ltdf" {
            return Err(ParamError::Parse("not an ltdf parameter set".into()));
        }
        let inp = LtdfInputs {
            k: kv_u64(kv, "k")?,
            big_gamma: parse_ratio(kv_lookup(kv, "Gamma")?)?,
            d: Some(parse_ratio(kv_lookup(kv, "D")?)?),
            code: CodeSpec {
                rho: parse_ratio(kv_lookup(kv, "rho_C")?)?,
                delta: kv_lookup(kv, "delta_C")?
                    .parse()
                    .map_err(|_| ParamError::Parse("`delta_C` is not a number".into()))?,
            },
            sizing: LtdfSizing::Explicit {
                n: kv_u64(kv, "n")?,
                t: kv_u64(kv, "t")?,
                s: kv_u64(kv, "s")?,
            },
            good_d: kv_u64(kv, "good_d")?.to_usize().unwrap_or(usize::MAX),
        };
        let mut p = derive_ltdf(&inp)?;
        // A stored eps of 0 marks a noiseless key and is the one allowed override.
        if kv_lookup(kv, "eps").ok() == Some("0") {
            p.eps = 0.0;
        }
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
}
