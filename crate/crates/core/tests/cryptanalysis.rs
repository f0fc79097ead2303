use std::collections::HashSet;

use dslpn::cryptanalysis::{
    analytic_bias, bias_of, distinguish, distinguish_dense_sparse, dual_distance, dual_distance_sparse,
    dual_distance_stats, sparse_attack, unmask_square_t, AnalysisError, ColumnSampler, DistinguisherSetup,
    DualDistance, Strategy, UnmaskOutcome,
};
use dslpn::gf2::{BitMatrix, BitVec, SparseMatrix};
use dslpn::sampling::{par_trials, uniform_sparse, Seed};
use rand::Rng;

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Smallest nonzero kernel weight by trying every support of size `1..=w_max`.
fn brute_dual_distance(cols: &[BitVec], w_max: usize) -> Option<usize> {
    fn rec(cols: &[BitVec], start: usize, left: usize, acc: &BitVec) -> bool {
        if left == 0 {
            return acc.is_zero();
        }
        (start..cols.len()).any(|j| rec(cols, j + 1, left - 1, &(acc ^ &cols[j])))
    }
    (1..=w_max).find(|&w| rec(cols, 0, w, &BitVec::zeros(cols[0].len())))
}

/// Minimum weight over the full kernel span.
fn span_min_weight(a: &BitMatrix) -> Option<usize> {
    let basis = a.kernel_basis();
    (1u32..1 << basis.len())
        .map(|mask| {
            let mut v = BitVec::zeros(a.cols());
            for (i, b) in basis.iter().enumerate() {
                if (mask >> i) & 1 == 1 {
                    v.xor_in_place(b);
                }
            }
            v.weight()
        })
        .min()
}

fn attack_setup() -> DistinguisherSetup {
    DistinguisherSetup {
        n: 64,
        m: 2048,
        k: 3,
        alpha: None,
        eps: 1.0 / 128.0,
        t_size: 16,
        max_subsets: 50,
        columns: ColumnSampler::Uniform,
        draws: 50,
    }
}

#[test]
fn bias_examples() {
    let a = BitMatrix::from_bit_rows(&["1100", "0110"]);
    let off = bias_of(&a, &BitVec::from_bit_str("1000"), 0.1, 10_000, &Seed::from_u64(1)).unwrap();
    assert!(!off.in_kernel);
    assert_eq!(off.analytic_bias, 0.0);
    assert!(off.sigmas() < 4.0);
    let on = bias_of(&a, &BitVec::from_bit_str("1110"), 0.5, 10_000, &Seed::from_u64(2)).unwrap();
    assert!(on.in_kernel);
    assert_eq!(on.analytic_bias, 0.0);
    assert_eq!(
        bias_of(&a, &BitVec::zeros(4), 0.1, 10, &Seed::from_u64(3)),
        Err(AnalysisError::ZeroVector)
    );
    assert!((analytic_bias(true, 0.05, 4) - 0.32805).abs() < 1e-12);
}

#[test]
fn bias_weight_four_at_scale() {
    let a = BitMatrix::from_bit_rows(&["110000", "011000", "001100"]);
    let v = BitVec::from_bit_str("111100");
    assert!(a.mul_vec(&v).unwrap().is_zero());
    let r = bias_of(&a, &v, 0.05, 100_000, &Seed::from_u64(4)).unwrap();
    assert!((r.analytic_bias - 0.32805).abs() < 1e-12);
    assert!(r.sigmas() < 4.0, "{r:?}");
}

#[test]
fn bias_agrees_on_random_configurations() {
    let mut rng = Seed::from_u64(5).rng();
    for i in 0..100 {
        let w = rng.gen_range(1..=8);
        let eps = rng.gen_range(0.0..0.3);
        // The first `w` columns sum to zero exactly when `in_kernel`.
        let in_kernel = rng.gen_bool(0.5);
        let mut cols: Vec<BitVec> = (1..w).map(|_| BitVec::random(10, &mut rng)).collect();
        let mut last = cols.iter().fold(BitVec::zeros(10), |acc, c| &acc ^ c);
        if !in_kernel {
            last.flip(rng.gen_range(0..10));
        }
        cols.push(last);
        cols.extend((0..6).map(|_| BitVec::random(10, &mut rng)));
        let a = BitMatrix::from_columns(10, &cols).unwrap();
        let v = BitVec::from_indices(cols.len(), 0..w);
        let r = bias_of(&a, &v, eps, 20_000, &Seed::from_u64(100 + i)).unwrap();
        assert_eq!(r.in_kernel, a.mul_vec(&v).unwrap().is_zero());
        assert!(r.sigmas() < 4.0, "config {i}: {r:?}");
    }
}

#[test]
fn dual_distance_examples() {
    let a = BitMatrix::from_columns(4, &[
        BitVec::from_bit_str("1100"),
        BitVec::from_bit_str("0110"),
        BitVec::from_bit_str("1100"),
        BitVec::from_bit_str("0001"),
    ])
    .unwrap();
    assert_eq!(
        dual_distance(&a, 3),
        DualDistance::Found {
            d: 2,
            witness: BitVec::from_indices(4, [0, 2])
        }
    );
    assert_eq!(dual_distance(&BitMatrix::identity(12), 5), DualDistance::Above(5));
}

#[test]
fn dual_distance_matches_span_oracle() {
    let mut rng = Seed::from_u64(6).rng();
    for _ in 0..30 {
        let m = uniform_sparse(12, 18, 3, &mut rng).unwrap();
        let dense = m.densify();
        let got = dual_distance(&dense, 18);
        assert_eq!(got.distance(), span_min_weight(&dense));
        assert_eq!(dual_distance_sparse(&m, 18), got);
        if let DualDistance::Found { d, witness } = got {
            assert_eq!(witness.weight(), d);
            assert!(dense.mul_vec(&witness).unwrap().is_zero());
        }
    }
}

#[test]
fn dual_distance_matches_support_search() {
    let mut rng = Seed::from_u64(7).rng();
    for _ in 0..5 {
        let m = uniform_sparse(24, 80, 3, &mut rng).unwrap();
        let cols: Vec<BitVec> = (0..80).map(|j| m.column(j)).collect();
        assert_eq!(dual_distance_sparse(&m, 4).distance(), brute_dual_distance(&cols, 4));
    }
}

#[test]
fn dual_distance_statistics() {
    let seed = Seed::from_u64(8);
    let pairs = dual_distance_stats(16, 20, 2, 0.5, 1.0, 200, |i| seed.trial("k2", i)).unwrap();
    assert!(pairs.frequency > 0.5, "{pairs:?}");
    assert_eq!(pairs.predicted_order, 1.0);
    let n = 64usize;
    let m = (n as f64).powf(1.5) as usize;
    let s = dual_distance_stats(n, m, 4, 0.5, 0.5, 40, |i| seed.trial("k4", i)).unwrap();
    let floor = 1.0 - (-(m as f64 * (m - 1) as f64 / 2.0) / binom(n, 4)).exp();
    assert!((s.birthday_floor - floor).abs() < 1e-12);
    assert!(s.frequency >= s.birthday_floor / 10.0 && s.frequency <= s.birthday_floor * 10.0, "{s:?}");
}

#[test]
fn planted_pair_and_reported_failure() {
    let m = SparseMatrix::new(10, 2, vec![vec![0, 4], vec![1, 2], vec![7, 9], vec![1, 2]]).unwrap();
    let r = sparse_attack(&m, Some(&BitVec::from_bit_str("0101")), 10, 1, &mut Seed::from_u64(9).rng()).unwrap();
    assert_eq!(r.dependency, Some(BitVec::from_indices(4, [1, 3])));
    assert_eq!(r.decision, Some(false));
    let lone = SparseMatrix::new(10, 2, vec![vec![0, 4]]).unwrap();
    let r = sparse_attack(&lone, None, 3, 7, &mut Seed::from_u64(9).rng()).unwrap();
    assert!(!r.success());
    assert_eq!(r.attempts(), 7);
}

#[test]
fn attack_finds_verified_dependencies() {
    let hits = par_trials(&Seed::from_u64(10), "attack", 200, |_, rng| {
        let m = uniform_sparse(64, 2048, 3, rng).unwrap();
        let r = sparse_attack(&m, None, 16, 50, rng).unwrap();
        if let Some(v) = &r.dependency {
            assert!(m.mul_vec(v).unwrap().is_zero());
            let found: HashSet<usize> = r.columns_found.iter().copied().collect();
            assert!(v.iter_ones().all(|j| found.contains(&j)));
            assert!(v.weight() <= r.subset.len() + 1);
        }
        r.success()
    });
    let rate = hits.iter().filter(|&&h| h).count() as f64 / 200.0;
    assert!(rate >= 0.9, "{rate}");
}

#[test]
fn t_sizes_match_expectation() {
    let (n, m, k, t) = (64, 2048, 3, 16);
    let sizes: Vec<f64> = par_trials(&Seed::from_u64(11), "t", 400, |_, rng| {
        let mat = uniform_sparse(n, m, k, rng).unwrap();
        sparse_attack(&mat, None, t, 1, rng).unwrap().t_sizes[0] as f64
    });
    let p = binom(t, k) / binom(n, k);
    let mean = sizes.iter().sum::<f64>() / sizes.len() as f64;
    let sd = (m as f64 * p * (1.0 - p) / sizes.len() as f64).sqrt();
    assert!((mean - m as f64 * p).abs() < 4.0 * sd, "mean {mean}, expected {}", m as f64 * p);
}

#[test]
fn distinguisher_tracks_piling_up() {
    let est = distinguish(&attack_setup(), Strategy::SparseAttackPipeline, 200, &Seed::from_u64(12)).unwrap();
    assert!(est.found >= 180);
    assert!(est.advantage > 0.3);
    assert!(est.sigmas_from(est.predicted) < 4.0, "{est:?}");
    let noise = DistinguisherSetup {
        eps: 0.5,
        ..attack_setup()
    };
    let flat = distinguish(&noise, Strategy::SparseAttackPipeline, 100, &Seed::from_u64(13)).unwrap();
    assert!(flat.sigmas_from(0.0) < 4.0, "{flat:?}");
}

#[test]
fn kernel_strategy_breaks_plain_sparse_lpn() {
    let setup = DistinguisherSetup {
        n: 32,
        m: 48,
        ..attack_setup()
    };
    let est = distinguish(&setup, Strategy::BestKernelVector, 50, &Seed::from_u64(14)).unwrap();
    assert_eq!(est.found, 50);
    assert!(est.advantage > 0.0 && est.sigmas_from(est.predicted) < 4.0, "{est:?}");
}

#[test]
fn dense_sparse_null() {
    let setup = DistinguisherSetup {
        columns: ColumnSampler::Distinct,
        draws: 1,
        ..attack_setup()
    };
    let est = distinguish_dense_sparse(&setup, 0.5, Strategy::SparseAttackPipeline, 2000, &Seed::from_u64(15)).unwrap();
    assert!(est.sigmas_from(0.0) < 4.0, "{est:?}");
}

fn sorted_rows(a: &BitMatrix) -> Vec<BitVec> {
    let mut rows = a.row_vecs().to_vec();
    rows.sort();
    rows
}

#[test]
fn unmasking_dichotomy() {
    let (n, m, k) = (32, 512, 3);
    let outcomes = par_trials(&Seed::from_u64(16), "square", 50, |_, rng| {
        let sparse = uniform_sparse(n, m, k, rng).unwrap().densify();
        let t = loop {
            let t = BitMatrix::random(n, n, rng);
            if t.rank() == n {
                break t;
            }
        };
        let a = t.mul(&sparse).unwrap();
        match unmask_square_t(&a, n, k, 500, rng).unwrap() {
            UnmaskOutcome::Recovered { za, .. } => sorted_rows(&za) == sorted_rows(&sparse),
            UnmaskOutcome::Failure { .. } => false,
        }
    });
    let ok = outcomes.iter().filter(|&&o| o).count();
    assert!(ok >= 40, "{ok}/50");
    let failures = par_trials(&Seed::from_u64(17), "compressing", 20, |_, rng| {
        let sparse = uniform_sparse(n, m, k, rng).unwrap();
        let a = sparse.left_mul(&BitMatrix::random(n / 2, n, rng)).unwrap();
        !unmask_square_t(&a, n, k, 50, rng).unwrap().is_recovered()
    });
    assert!(failures.iter().all(|&f| f));
}

#[test]
fn identity_mask_unmasks_to_identity() {
    let mut rng = Seed::from_u64(18).rng();
    let m = uniform_sparse(16, 256, 3, &mut rng).unwrap().densify();
    match unmask_square_t(&m, 16, 3, 400, &mut rng).unwrap() {
        UnmaskOutcome::Recovered { z, .. } => assert_eq!(z, BitMatrix::identity(16)),
        other => panic!("{other:?}"),
    }
}
