use std::collections::HashSet;

use dslpn::gf2::io::Object;
use dslpn::gf2::{BitMatrix, BitVec, SparseMatrix};
use dslpn::sampling::{uniform_sparse, Seed};
use proptest::prelude::*;
use rand::Rng;

/// Row span enumerated explicitly.
fn span_size(a: &BitMatrix) -> usize {
    let mut seen = HashSet::new();
    for mask in 0u32..1 << a.rows() {
        let mut v = BitVec::zeros(a.cols());
        for i in 0..a.rows() {
            if (mask >> i) & 1 == 1 {
                v.xor_in_place(a.row(i));
            }
        }
        seen.insert(v);
    }
    seen.len()
}

/// `A·x` by the textbook triple loop.
fn naive_mul_vec(a: &BitMatrix, x: &BitVec) -> BitVec {
    BitVec::from_bools(
        &(0..a.rows())
            .map(|i| (0..a.cols()).fold(false, |acc, j| acc ^ (a.get(i, j) & x.get(j))))
            .collect::<Vec<_>>(),
    )
}

fn naive_mul(a: &BitMatrix, b: &BitMatrix) -> BitMatrix {
    let mut out = BitMatrix::zeros(a.rows(), b.cols());
    for i in 0..a.rows() {
        for j in 0..b.cols() {
            let v = (0..a.cols()).fold(false, |acc, l| acc ^ (a.get(i, l) & b.get(l, j)));
            out.set(i, j, v);
        }
    }
    out
}

#[test]
fn hand_product() {
    let a = BitMatrix::from_bit_rows(&["11", "01"]);
    let b = BitMatrix::from_bit_rows(&["1", "1"]);
    assert_eq!(a.mul(&b).unwrap(), BitMatrix::from_bit_rows(&["0", "1"]));
    assert!(a.mul(&BitMatrix::zeros(3, 2)).is_err());
    let i3 = BitMatrix::identity(3);
    let c = BitMatrix::from_bit_rows(&["101", "011", "110"]);
    assert_eq!(i3.mul(&c).unwrap(), c);
    assert!(c.mul(&BitMatrix::zeros(3, 4)).unwrap().is_zero());
}

#[test]
fn sparse_products_match_dense() {
    let mut rng = Seed::from_u64(1).rng();
    for _ in 0..100 {
        let n = rng.gen_range(4..=64);
        let m = rng.gen_range(1..=64);
        let k = rng.gen_range(1..=n.min(5));
        let sp = uniform_sparse(n, m, k, &mut rng).unwrap();
        let x = BitVec::random(m, &mut rng);
        let dense = sp.densify();
        assert_eq!(sp.mul_vec(&x).unwrap(), naive_mul_vec(&dense, &x));
        assert!(sp.mul_vec(&x).unwrap().weight() <= k * x.weight());
        let j = rng.gen_range(0..m);
        assert_eq!(sp.mul_vec(&BitVec::unit(m, j)).unwrap().weight(), k);
        assert_eq!(SparseMatrix::from_dense(&dense, k).unwrap(), sp);
        let d = BitMatrix::random(rng.gen_range(1..8), n, &mut rng);
        assert_eq!(sp.left_mul(&d).unwrap(), naive_mul(&d, &dense));
    }
}

#[test]
fn rank_matches_span_count() {
    let mut rng = Seed::from_u64(2).rng();
    for _ in 0..50 {
        let a = BitMatrix::random(8, 8, &mut rng);
        assert_eq!(span_size(&a), 1 << a.rank());
    }
    assert_eq!(BitMatrix::identity(9).rank(), 9);
    assert_eq!(BitMatrix::zeros(5, 7).rank(), 0);
}

#[test]
fn frozen_rank_and_kernel() {
    let a = BitMatrix::from_bit_rows(&["110100", "011010", "101110", "000001"]);
    assert_eq!(a.rank(), 3);
    let ker: Vec<String> = a.kernel_basis().iter().map(|v| v.to_string()).collect();
    // RREF rows 101110, 011010, 000001; free columns 2, 3, 4.
    assert_eq!(ker, ["111000", "100100", "110010"]);
}

#[test]
fn kernel_is_exhaustive() {
    let mut rng = Seed::from_u64(3).rng();
    for _ in 0..20 {
        let a = BitMatrix::random(6, 10, &mut rng);
        let basis = a.kernel_basis();
        let mut span = HashSet::new();
        for mask in 0u32..1 << basis.len() {
            let mut v = BitVec::zeros(10);
            for (i, b) in basis.iter().enumerate() {
                if (mask >> i) & 1 == 1 {
                    v.xor_in_place(b);
                }
            }
            span.insert(v);
        }
        for x in 0u64..1 << 10 {
            let x = BitVec::from_u64(10, x);
            assert_eq!(naive_mul_vec(&a, &x).is_zero(), span.contains(&x));
        }
    }
    assert!(BitMatrix::identity(5).kernel_basis().is_empty());
    assert_eq!(BitMatrix::zeros(3, 7).kernel_basis().len(), 7);
}

#[test]
fn left_kernel_annihilates() {
    let mut rng = Seed::from_u64(4).rng();
    let a = BitMatrix::random(12, 7, &mut rng);
    let left = a.left_kernel_basis();
    assert_eq!(left.len(), 12 - a.rank());
    for z in left {
        assert!(a.vec_mul(&z).unwrap().is_zero());
    }
}

#[test]
fn inversion_and_solving() {
    let mut rng = Seed::from_u64(5).rng();
    assert_eq!(BitMatrix::identity(6).invert().unwrap(), Some(BitMatrix::identity(6)));
    assert_eq!(BitMatrix::zeros(4, 4).invert().unwrap(), None);
    assert!(BitMatrix::zeros(3, 4).invert().is_err());
    let mut done = 0;
    while done < 20 {
        let a = BitMatrix::random(8, 8, &mut rng);
        if let Some(inv) = a.invert().unwrap() {
            assert_eq!(naive_mul(&a, &inv), BitMatrix::identity(8));
            done += 1;
        }
    }
    for _ in 0..50 {
        let a = BitMatrix::random(8, 12, &mut rng);
        let x = BitVec::random(12, &mut rng);
        let y = a.mul_vec(&x).unwrap();
        let x2 = a.solve(&y).unwrap().expect("consistent system");
        assert_eq!(naive_mul_vec(&a, &x2), y);
    }
    let y = BitVec::random(5, &mut rng);
    assert_eq!(BitMatrix::identity(5).solve(&y).unwrap(), Some(y));
    assert_eq!(BitMatrix::zeros(3, 3).solve(&BitVec::ones(3)).unwrap(), None);
}

#[test]
fn serialized_bitvec_layout() {
    let v = BitVec::from_bit_str("1011");
    let bytes = Object::BitVec(v.clone()).to_bytes().unwrap();
    assert_eq!(bytes, [b'D', b'S', b'L', b'1', 1, 0, 0, 4, 0, 0, 0, 0b1101]);
    assert_eq!(Object::from_bytes(&bytes).unwrap().into_bitvec().unwrap(), v);
}

fn matrix(max: usize) -> impl Strategy<Value = BitMatrix> {
    (1..=max, 1..=max, any::<u64>()).prop_map(|(r, c, s)| BitMatrix::random(r, c, &mut Seed::from_u64(s).rng()))
}

proptest! {
    #[test]
    fn product_is_associative(a in 1usize..=32, b in 1usize..=32, c in 1usize..=32, d in 1usize..=32, s: u64) {
        let mut rng = Seed::from_u64(s).rng();
        let x = BitMatrix::random(a, b, &mut rng);
        let y = BitMatrix::random(b, c, &mut rng);
        let z = BitMatrix::random(c, d, &mut rng);
        prop_assert_eq!(x.mul(&y).unwrap().mul(&z).unwrap(), x.mul(&y.mul(&z).unwrap()).unwrap());
    }

    #[test]
    fn rank_nullity(a in matrix(70)) {
        let ker = a.kernel_basis();
        prop_assert_eq!(a.rank() + ker.len(), a.cols());
        prop_assert!(a.rank() <= a.rows().min(a.cols()));
        for v in &ker {
            prop_assert!(a.mul_vec(v).unwrap().is_zero());
            prop_assert!(v.tail_is_clean());
        }
    }

    #[test]
    fn invertible_iff_full_rank(n in 1usize..=24, s: u64) {
        let a = BitMatrix::random(n, n, &mut Seed::from_u64(s).rng());
        let inv = a.invert().unwrap();
        prop_assert_eq!(inv.is_some(), a.rank() == n);
        if let Some(inv) = inv {
            prop_assert_eq!(a.mul(&inv).unwrap(), BitMatrix::identity(n));
        }
    }

    #[test]
    fn matrix_bytes_round_trip(a in matrix(40)) {
        let bytes = Object::BitMatrix(a.clone()).to_bytes().unwrap();
        prop_assert_eq!(Object::from_bytes(&bytes).unwrap().into_bitmatrix().unwrap(), a);
    }

    #[test]
    fn tails_stay_clean(len in 1usize..200, s: u64) {
        let mut rng = Seed::from_u64(s).rng();
        let a = BitVec::random(len, &mut rng);
        let b = BitVec::ones(len);
        let mut c = &a ^ &b;
        c.flip(len - 1);
        prop_assert!(c.tail_is_clean());
        prop_assert!(c.weight() <= len);
        prop_assert!(a.slice(0, len / 2 + 1).tail_is_clean());
        prop_assert!(a.concat(&b).tail_is_clean());
    }
}
