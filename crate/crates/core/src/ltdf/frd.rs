use crate::gf2::{BitMatrix, BitVec};

/// Polynomials over GF(2) as little-endian bit words (bit `i` is the
/// coefficient of `x^i`). Helpers operate on trimmed or untrimmed slices.
mod poly {
    pub fn degree(a: &[u64]) -> Option<usize> {
        a.iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| 64 * i + 63 - w.leading_zeros() as usize)
    }

    pub fn bit(a: &[u64], i: usize) -> bool {
        a.get(i / 64).is_some_and(|w| (w >> (i % 64)) & 1 == 1)
    }

    fn xor_shifted(acc: &mut Vec<u64>, b: &[u64], shift: usize) {
        let (ws, bs) = (shift / 64, shift % 64);
        let need = b.len() + ws + 1;
        if acc.len() < need {
            acc.resize(need, 0);
        }
        for (i, &w) in b.iter().enumerate() {
            acc[i + ws] ^= w << bs;
            if bs != 0 {
                acc[i + ws + 1] ^= w >> (64 - bs);
            }
        }
    }

    /// `a mod f`.
    pub fn rem(a: &[u64], f: &[u64]) -> Vec<u64> {
        let df = degree(f).expect("modulus is nonzero");
        let mut r = a.to_vec();
        while let Some(dr) = degree(&r) {
            if dr < df {
                break;
            }
            xor_shifted(&mut r, f, dr - df);
        }
        r.truncate(df / 64 + 1);
        r
    }

    /// `a · b mod f`.
    pub fn mulmod(a: &[u64], b: &[u64], f: &[u64]) -> Vec<u64> {
        let mut prod = vec![0u64; a.len() + b.len() + 1];
        if let Some(db) = degree(b) {
            for i in 0..=db {
                if bit(b, i) {
                    xor_shifted(&mut prod, a, i);
                }
            }
        }
        rem(&prod, f)
    }

    pub fn gcd(a: &[u64], b: &[u64]) -> Vec<u64> {
        let (mut a, mut b) = (a.to_vec(), b.to_vec());
        while degree(&b).is_some() {
            let r = rem(&a, &b);
            a = b;
            b = r;
        }
        a
    }

    pub fn is_one(a: &[u64]) -> bool {
        degree(a) == Some(0)
    }
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's test: `f` of degree `L` is irreducible iff `x^(2^L) = x (mod f)` and
/// `gcd(x^(2^(L/q)) - x, f) = 1` for every prime `q | L`.
pub fn is_irreducible(f: &[u64]) -> bool {
    let Some(l) = poly::degree(f) else {
        return false;
    };
    if l == 0 {
        return false;
    }
    let x = poly::rem(&[2], f);
    let checkpoints: Vec<usize> = prime_factors(l).iter().map(|q| l / q).collect();
    let mut h = x.clone();
    let mut at = Vec::new();
    for i in 1..=l {
        h = poly::mulmod(&h, &h, f);
        if checkpoints.contains(&i) {
            at.push(h.clone());
        }
    }
    let mut hx = h;
    hx.resize(hx.len().max(x.len()), 0);
    for (a, b) in hx.iter_mut().zip(&x) {
        *a ^= b;
    }
    if poly::degree(&hx).is_some() {
        return false;
    }
    at.into_iter().all(|mut hq| {
        hq.resize(hq.len().max(x.len()), 0);
        for (a, b) in hq.iter_mut().zip(&x) {
            *a ^= b;
        }
        poly::is_one(&poly::gcd(f, &hq))
    })
}

/// Full-rank-difference family: `H_tau` is multiplication by `tau` in
/// GF(2^L) = GF(2)[x]/(modulus), so `H_tau ⊕ H_tau' = H_(tau ⊕ tau')` is
/// invertible whenever `tau != tau'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrdFamily {
    l: usize,
    /// Modulus including the leading `x^L` term.
    modulus: Vec<u64>,
}

impl FrdFamily {
    /// Uses the lexicographically first irreducible polynomial of degree `l`
    /// (smallest when read as an integer).
    pub fn new(l: usize) -> Self {
        assert!(l >= 1, "field degree must be positive");
        let words = l / 64 + 1;
        let mut f = vec![0u64; words];
        f[l / 64] |= 1 << (l % 64);
        // Tail coefficients count up through x^l + 1, x^l + x, x^l + x + 1, ...
        let mut tail = BitVec::zeros(l);
        loop {
            let mut cand = f.clone();
            for (c, t) in cand.iter_mut().zip(tail.words()) {
                *c |= t;
            }
            if is_irreducible(&cand) {
                return Self { l, modulus: cand };
            }
            increment(&mut tail);
        }
    }

    /// # Panics
    /// If `modulus` is not irreducible.
    pub fn with_modulus(modulus: &BitVec) -> Self {
        let words = modulus.words().to_vec();
        let l = poly::degree(&words).expect("nonzero modulus");
        assert!(is_irreducible(&words), "modulus is not irreducible");
        Self { l, modulus: words }
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn modulus(&self) -> BitVec {
        BitVec::from_words(self.l + 1, self.modulus.clone())
    }

    fn check(&self, v: &BitVec) {
        assert_eq!(v.len(), self.l, "field element must have {} bits", self.l);
    }

    /// `a · b` in the field.
    pub fn mul(&self, a: &BitVec, b: &BitVec) -> BitVec {
        self.check(a);
        self.check(b);
        let r = poly::mulmod(a.words(), b.words(), &self.modulus);
        BitVec::from_words(self.l, r)
    }

    /// `a^(2^L - 2)`, the inverse of a nonzero `a`; `None` for zero.
    pub fn inv(&self, a: &BitVec) -> Option<BitVec> {
        self.check(a);
        if a.is_zero() {
            return None;
        }
        // 2^L - 2 = 2 + 4 + ... + 2^(L-1).
        let mut sq = a.clone();
        let mut acc = BitVec::unit(self.l, 0);
        for _ in 1..self.l {
            sq = self.mul(&sq, &sq);
            acc = self.mul(&acc, &sq);
        }
        Some(acc)
    }

    /// `H_tau`: column `j` is `tau · x^j`.
    pub fn matrix(&self, tau: &BitVec) -> BitMatrix {
        self.check(tau);
        let mut col = tau.clone();
        let mut cols = Vec::with_capacity(self.l);
        for j in 0..self.l {
            if j > 0 {
                col = BitVec::from_words(self.l, poly::mulmod(col.words(), &[2], &self.modulus));
            }
            cols.push(col.clone());
        }
        BitMatrix::from_columns(self.l, &cols).expect("square")
    }
}

fn increment(v: &mut BitVec) {
    for i in 0..v.len() {
        if v.get(i) {
            v.set(i, false);
        } else {
            v.set(i, true);
            return;
        }
    }
    panic!("no irreducible polynomial found");
}
