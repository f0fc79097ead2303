use num_bigint::BigUint;
use num_rational::Rational64;
use num_traits::{One, Pow, ToPrimitive, Zero};

use super::ParamError;

/// Binary entropy `H(x) = -x·log2(x) - (1-x)·log2(1-x)`, with `H(0) = H(1) = 0`.
pub fn entropy(x: f64) -> Result<f64, ParamError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(ParamError::Domain(format!("entropy argument {x} outside [0, 1]")));
    }
    if x == 0.0 || x == 1.0 {
        return Ok(0.0);
    }
    Ok(-x * x.log2() - (1.0 - x) * (1.0 - x).log2())
}

/// The preimage of `y` under `H` restricted to `[0, 1/2]`, by bisection to 1e-12.
pub fn entropy_inv(y: f64) -> Result<f64, ParamError> {
    if !(0.0..=1.0).contains(&y) {
        return Err(ParamError::Domain(format!("entropy_inv argument {y} outside [0, 1]")));
    }
    if y == 1.0 {
        return Ok(0.5);
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if entropy(mid)? < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `|B≤(n, w)| = sum_{i <= w} C(n, i)`.
pub fn ball_le(n: u64, w: u64) -> BigUint {
    let w = w.min(n);
    let mut term = BigUint::one();
    let mut sum = BigUint::one();
    for i in 0..w {
        term = term * (n - i) / (i + 1);
        sum += &term;
    }
    sum
}

/// Exact sizes of the Hamming balls around the origin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallSizes {
    /// Vectors of weight at most `w`.
    pub at_most: BigUint,
    /// Vectors of weight exactly `w`.
    pub exact: BigUint,
    /// Regular vectors: one set bit in each of `w` blocks of length `n / w`.
    pub regular: BigUint,
}

/// # Errors
/// `w > n`, or `w` not dividing `n` (the regular ball is undefined).
pub fn hamming_ball_sizes(n: u64, w: u64) -> Result<BallSizes, ParamError> {
    if w > n {
        return Err(ParamError::Domain(format!("ball weight {w} exceeds length {n}")));
    }
    if w == 0 {
        return Ok(BallSizes {
            at_most: BigUint::one(),
            exact: BigUint::one(),
            regular: BigUint::one(),
        });
    }
    if !n.is_multiple_of(w) {
        return Err(ParamError::Domain(format!(
            "regular ball needs w | n (n={n}, w={w})"
        )));
    }
    Ok(BallSizes {
        at_most: ball_le(n, w),
        exact: binomial(n, w),
        regular: BigUint::from(n / w).pow(w as u32),
    })
}

/// `log2` of a big integer, accurate to double precision.
pub fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("fits");
    top.log2() + shift as f64
}

/// `ceil(x^(p/q))` for `p/q >= 0`.
pub fn ceil_pow_ratio(x: u64, e: Rational64) -> Result<BigUint, ParamError> {
    if *e.numer() < 0 {
        return Err(ParamError::Domain(format!("negative exponent {e}")));
    }
    let p = *e.numer() as u32;
    let q = *e.denom() as u32;
    let target = BigUint::from(x).pow(p);
    let r = target.nth_root(q);
    if r.clone().pow(q) == target {
        Ok(r)
    } else {
        Ok(r + 1u32)
    }
}

/// Exact `log2(x)` when `x` is a power of two.
pub fn exact_log2(x: u64) -> Option<u32> {
    x.is_power_of_two().then(|| x.trailing_zeros())
}

/// Parses `"3"`, `"3/2"` or a finite decimal such as `"1.5"` exactly.
pub fn parse_ratio(s: &str) -> Result<Rational64, ParamError> {
    let s = s.trim();
    let bad = || ParamError::Domain(format!("cannot parse `{s}` as a rational"));
    if let Some((a, b)) = s.split_once('/') {
        let a: i64 = a.trim().parse().map_err(|_| bad())?;
        let b: i64 = b.trim().parse().map_err(|_| bad())?;
        if b == 0 {
            return Err(bad());
        }
        return Ok(Rational64::new(a, b));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.len() > 12 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = int.starts_with('-');
        let int_v: i64 = if int.is_empty() || int == "-" { 0 } else { int.parse().map_err(|_| bad())? };
        let den = 10i64.pow(frac.len() as u32);
        let frac_v: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let num = int_v.abs() * den + frac_v;
        return Ok(Rational64::new(if neg { -num } else { num }, den));
    }
    s.parse::<i64>().map(Rational64::from_integer).map_err(|_| bad())
}

pub fn ratio_to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn fmt_ratio(r: Rational64) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_fixed_points() {
        assert_eq!(entropy(0.5).unwrap(), 1.0);
        assert!((entropy_inv(1.0).unwrap() - 0.5).abs() < 1e-12);
        assert!(entropy(1.2).is_err());
        assert!(entropy_inv(-0.1).is_err());
    }

    #[test]
    fn small_balls() {
        let b = hamming_ball_sizes(4, 2).unwrap();
        assert_eq!(
            (b.at_most, b.exact, b.regular),
            (11u32.into(), 6u32.into(), 4u32.into())
        );
        let z = hamming_ball_sizes(9, 0).unwrap();
        assert_eq!((z.at_most, z.exact, z.regular), (1u32.into(), 1u32.into(), 1u32.into()));
        assert!(hamming_ball_sizes(5, 2).is_err());
    }

    #[test]
    fn ratios_parse_exactly() {
        assert_eq!(parse_ratio("1.5").unwrap(), Rational64::new(3, 2));
        assert_eq!(parse_ratio("10/11").unwrap(), Rational64::new(10, 11));
        assert_eq!(parse_ratio("4").unwrap(), Rational64::from_integer(4));
        assert!(parse_ratio("x").is_err());
        assert!(parse_ratio("1/0").is_err());
    }

    #[test]
    fn ceil_pow_is_exact_on_powers() {
        assert_eq!(ceil_pow_ratio(64, Rational64::new(3, 2)).unwrap(), BigUint::from(512u32));
        assert_eq!(ceil_pow_ratio(2, Rational64::new(1, 2)).unwrap(), BigUint::from(2u32));
    }

    #[test]
    fn big_log2() {
        let x = BigUint::one() << 5000u32;
        assert!((log2_big(&x) - 5000.0).abs() < 1e-9);
        assert!((log2_big(&BigUint::from(1000u32)) - 1000f64.log2()).abs() < 1e-12);
    }
}
