use num_bigint::BigUint;
use num_rational::Rational64;
use num_traits::{One, Pow};
use proptest::prelude::*;

use dslpn::params::{
    ball_le, check_compression, derive_crhf, derive_ltdf, entropy, entropy_inv, hamming_ball_sizes, log2_big, min_delta,
    min_m, CodeSpec, CompressionFailure, CompressionRegime, CrhfParams, LtdfInputs, LtdfParams, LtdfSizing,
    ParamError,
};

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

/// Binomials from Pascal's triangle, as an independent count.
fn pascal(n: usize) -> Vec<Vec<u128>> {
    let mut rows = vec![vec![1u128]];
    for i in 1..=n {
        let prev = &rows[i - 1];
        let mut row = vec![1u128; i + 1];
        for j in 1..i {
            row[j] = prev[j - 1] + prev[j];
        }
        rows.push(row);
    }
    rows
}

#[test]
fn entropy_points() {
    assert_eq!(entropy(0.5).unwrap(), 1.0);
    assert_eq!(entropy_inv(1.0).unwrap(), 0.5);
    let x = entropy_inv(0.3).unwrap();
    assert!(x <= 0.5);
    assert!((entropy(x).unwrap() - 0.3).abs() < 1e-10);
    assert!(entropy(1.5).is_err());
    assert!(entropy_inv(-0.1).is_err());
}

#[test]
fn entropy_sandwich() {
    for i in 1..50 {
        let d = i as f64 / 100.0;
        let h = entropy(d).unwrap();
        assert!(d * (1.0 / d).log2() < h && h < d * (4.0 / d).log2(), "d = {d}");
    }
}

#[test]
fn ball_sizes_small() {
    let b = hamming_ball_sizes(9, 0).unwrap();
    assert_eq!((b.at_most, b.exact, b.regular), (1u32.into(), 1u32.into(), 1u32.into()));
    let b = hamming_ball_sizes(4, 2).unwrap();
    assert_eq!(
        (b.at_most, b.exact, b.regular),
        (BigUint::from(11u32), BigUint::from(6u32), BigUint::from(4u32))
    );
    assert!(matches!(hamming_ball_sizes(10, 3), Err(ParamError::Domain(_))));
    assert!(hamming_ball_sizes(3, 4).is_err());
}

#[test]
fn ball_sizes_match_pascal_and_sandwich() {
    let tri = pascal(60);
    for (n, w) in [(30u64, 6u64), (30, 5), (60, 12), (48, 8), (24, 4)] {
        let b = hamming_ball_sizes(n, w).unwrap();
        let row = &tri[n as usize];
        let at_most: u128 = row[..=w as usize].iter().sum();
        assert_eq!(b.at_most, BigUint::from(at_most));
        assert_eq!(b.exact, BigUint::from(row[w as usize]));
        assert_eq!(b.regular, BigUint::from((n / w) as u128).pow(w as u32));
        assert!(b.regular < b.exact && b.exact < b.at_most);
        let upper = w as f64 * std::f64::consts::E.log2() + 1.0 + log2_big(&b.regular);
        assert!(log2_big(&b.at_most) < upper);
    }
}

#[test]
fn min_delta_and_min_m() {
    assert_eq!(min_delta(6, r(2, 1)), r(9, 11));
    assert_eq!(min_delta(3, r(1, 1)), r(3, 4));
    // 1 + (2·6 - 1)(1 - 10/11) = 2.
    for n in [64u64, 4096, 1 << 20] {
        assert_eq!(min_m(n, 6, r(2, 1), r(10, 11)).unwrap(), BigUint::from(n) * n);
    }
}

#[test]
fn compression_worked_point() {
    let n = 1u64 << 12;
    // n^(10/11) = 2^10.9..., rounded to 2^11.
    let c = check_compression(&CompressionRegime::new(6, r(2, 1), n, n * n, 1 << 11));
    assert!(c.pass, "{c:?}");
    assert!(c.margin_log2 > 0.0);
    assert!(c.m_above_min);
    assert!(c.delta_above_min);
}

#[test]
fn compression_failures() {
    let capped = check_compression(&CompressionRegime::new(3, r(2, 1), 64, 1024, 8));
    assert!(capped.failures.contains(&CompressionFailure::SampleCap));
    let flat = check_compression(&CompressionRegime::new(6, r(2, 1), 256, 256, 256));
    assert!(!flat.pass);
    assert!(flat.failures.contains(&CompressionFailure::Degenerate));
    let thin = check_compression(&CompressionRegime::new(6, r(2, 1), 4096, 8192, 4));
    assert!(thin.failures.contains(&CompressionFailure::Margin));
}

#[test]
fn passing_regimes_beat_the_exact_ball() {
    let mut passes = 0;
    for ln in 3..=8u32 {
        let n = 1u64 << ln;
        for k in [3u64, 4, 6] {
            for lt in 1..ln {
                for s in 1..=12u32 {
                    let (t, m) = (1u64 << lt, 1u64 << (lt + s));
                    for d in [r(3, 2), r(2, 1), r(3, 1)] {
                        let c = check_compression(&CompressionRegime::new(k, d, n, m, t));
                        if !c.pass {
                            continue;
                        }
                        passes += 1;
                        let reg = hamming_ball_sizes(m, t).unwrap().regular;
                        let ball = ball_le(n, k * t);
                        let (p, q) = (*d.numer() as u32, *d.denom() as u32);
                        assert!(reg.pow(q) > ball.pow(p), "n={n} k={k} t={t} m={m} D={d}");
                    }
                }
            }
        }
    }
    assert!(passes > 20);
}

#[test]
fn ltdf_gamma_two_d_four() {
    let p = derive_ltdf(&LtdfInputs {
        k: 6,
        big_gamma: r(2, 1),
        d: Some(r(4, 1)),
        code: CodeSpec::concatenated(),
        sizing: LtdfSizing::Explicit { n: 64, t: 8, s: 4 },
        good_d: 1,
    })
    .unwrap();
    assert_eq!(p.d_prime, r(4, 1));
    assert_eq!(Rational64::one() / p.d + Rational64::one() / p.d_prime, r(1, 2));
}

#[test]
fn ltdf_gamma_takes_code_bound() {
    let p = derive_ltdf(&LtdfInputs {
        k: 6,
        big_gamma: r(3, 2),
        d: None,
        code: CodeSpec {
            rho: r(1, 8),
            delta: 0.001,
        },
        sizing: LtdfSizing::Explicit { n: 64, t: 8, s: 4 },
        good_d: 1,
    });
    // rho_C/gamma = 125 is out of reach for alpha <= 64.
    assert!(matches!(p, Err(ParamError::Infeasible(_))));
    let p = derive_ltdf(&LtdfInputs {
        k: 6,
        big_gamma: r(3, 2),
        d: None,
        code: CodeSpec {
            rho: r(1, 8),
            delta: 0.003,
        },
        sizing: LtdfSizing::Explicit { n: 64, t: 8, s: 4 },
        good_d: 1,
    })
    .unwrap();
    // H^-1((1/8) / (15/4)) is about 0.00347.
    assert!(entropy_inv(1.0 / 30.0).unwrap() > 0.003);
    assert_eq!(p.gamma, 0.003);
    assert_eq!(p.d, r(5, 2));
}

fn check_ltdf_invariants(p: &LtdfParams) {
    p.verify().unwrap();
    let one = Rational64::one();
    assert_eq!(one / p.d + one / p.d_prime, one / p.big_gamma);
    let h_inv = entropy_inv((*p.rho_c.numer() as f64 / *p.rho_c.denom() as f64) / ratio(p.d_prime)).unwrap();
    assert_eq!(p.gamma, p.delta_c.min(h_inv));
    let a = ratio(p.alpha);
    assert!(a * a / (a + 1.0) > ratio(p.rho_c) / p.gamma);
    assert_eq!(p.ell, (p.l as f64 / ratio(p.rho_c)).ceil() as u64);
    assert!((p.eps - p.gamma / ((a + 1.0) * p.t as f64)).abs() < 1e-15);
    assert_eq!(p.m, p.t << p.s);
    assert_eq!(p.l, p.t * p.s);
    assert!(p.gamma * p.ell as f64 <= p.delta_c * p.ell as f64);
}

fn ratio(x: Rational64) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

#[test]
fn ltdf_desk_scale_derivation() {
    let p = derive_ltdf(&LtdfInputs {
        k: 6,
        big_gamma: r(3, 2),
        d: None,
        code: CodeSpec::concatenated(),
        sizing: LtdfSizing::Asymptotic { n: 4096 },
        good_d: 3,
    })
    .unwrap();
    check_ltdf_invariants(&p);
    assert!(p.delta > min_delta(6, p.d));
    assert!(BigUint::from(p.m) >= min_m(p.n, 6, p.d, p.delta).unwrap());
    for preset in [LtdfParams::desk(), LtdfParams::tiny_lossy(), LtdfParams::tiny_exhaustive()] {
        check_ltdf_invariants(&preset);
    }
    assert!(LtdfParams::tiny_lossy().regime.pass);
    assert!(LtdfParams::tiny_lossy().l <= 20);
}

#[test]
fn ltdf_rejects_bad_inputs() {
    let base = LtdfInputs {
        k: 6,
        big_gamma: r(3, 2),
        d: None,
        code: CodeSpec::concatenated(),
        sizing: LtdfSizing::Explicit { n: 64, t: 8, s: 4 },
        good_d: 1,
    };
    assert!(derive_ltdf(&LtdfInputs { big_gamma: r(1, 1), ..base }).is_err());
    assert!(derive_ltdf(&LtdfInputs { d: Some(r(1, 1)), ..base }).is_err());
    assert!(derive_ltdf(&LtdfInputs {
        sizing: LtdfSizing::Explicit { n: 63, t: 8, s: 4 },
        ..base
    })
    .is_err());
}

#[test]
fn ltdf_kv_round_trip() {
    let p = LtdfParams::desk();
    assert_eq!(LtdfParams::from_kv(&p.to_kv()).unwrap(), p);
}

#[test]
fn crhf_points() {
    let p = derive_crhf(3, r(4, 1), 8).unwrap();
    assert_eq!(p.rho, r(1, 4));
    assert!(p.rho * Rational64::from_integer(p.ttilde as i64) > Rational64::from_integer(16));
    assert!(p.out_len + 16 < p.ttilde);
    assert!(matches!(derive_crhf(3, r(2, 1), 8), Err(ParamError::Domain(_))));
    assert_eq!(p.eps * 8.0 * p.t as f64, (p.n as f64).log2());
    assert_eq!(CrhfParams::from_kv(&p.to_kv()).unwrap(), p);
    let tiny = CrhfParams::tiny();
    assert_eq!((tiny.ttilde, tiny.out_len), (16, 14));
}

#[test]
fn crhf_sweep_compresses() {
    for k in [3u64, 4, 6] {
        for d in [r(5, 2), r(3, 1), r(4, 1)] {
            for lambda in [1u64, 4, 16, 64] {
                let p = derive_crhf(k, d, lambda).unwrap();
                p.verify().unwrap();
                assert!(p.out_len < p.ttilde - 2 * lambda, "k={k} D={d} lambda={lambda}");
                let cap = BigUint::from(p.n).pow(k as u32);
                assert!(BigUint::from(p.m).pow(2u32) < cap);
                assert!(BigUint::from(p.m) >= min_m(p.n, k, d, p.delta).unwrap());
            }
        }
    }
    // m_min then exceeds 2^63.
    assert!(matches!(derive_crhf(6, r(8, 1), 1), Err(ParamError::Infeasible(_))));
}

proptest! {
    #[test]
    fn min_delta_grows_with_d(k in 3u64..12, a in 1i64..40, b in 1i64..40) {
        let (lo, hi) = (r(10 + a.min(b), 10), r(10 + a.max(b), 10));
        prop_assert!(min_delta(k, lo) <= min_delta(k, hi));
        prop_assert!(min_delta(k, hi) < Rational64::one());
    }

    #[test]
    fn min_m_decreases_in_delta(k in 3u64..8, j in 1i64..10, j2 in 1i64..10) {
        let (lo, hi) = (r(j.min(j2), 10), r(j.max(j2), 10));
        prop_assert!(min_m(256, k, r(2, 1), hi).unwrap() <= min_m(256, k, r(2, 1), lo).unwrap());
    }

    #[test]
    fn entropy_round_trip(y in 0.001f64..0.999) {
        let x = entropy_inv(y).unwrap();
        prop_assert!((entropy(x).unwrap() - y).abs() < 1e-10);
    }
}
