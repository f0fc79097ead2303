use std::fmt;
use std::ops::{BitAnd, BitXor, BitXorAssign};

use rand::Rng;

pub(crate) const WORD_BITS: usize = 64;

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// A vector over GF(2), packed into 64-bit words.
///
/// Bit `i` lives in `words[i / 64]` at position `i % 64` (little-endian within
/// a word). Bits at positions `>= len` are always zero; every mutating method
/// restores that invariant and checks it in debug builds.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self {
            len,
            words: vec![u64::MAX; words_for(len)],
        };
        v.clear_tail();
        v
    }

    /// Unit vector `e_i` of the given length.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
            }
        }
        v
    }

    /// Builds a vector from a string of `0`/`1` characters (index 0 first).
    /// Other characters (spaces, underscores) are skipped.
    pub fn from_bit_str(s: &str) -> Self {
        let bits: Vec<bool> = s
            .chars()
            .filter_map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect();
        Self::from_bools(&bits)
    }

    /// Sets the listed positions. Panics on an out-of-range index.
    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, indices: I) -> Self {
        let mut v = Self::zeros(len);
        for i in indices {
            v.set(i, true);
        }
        v
    }

    /// Takes ownership of raw words; excess words are dropped and tail bits masked.
    pub fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(words_for(len), 0);
        let mut v = Self { len, words };
        v.clear_tail();
        v
    }

    /// Low `len` bits of `value` (bit 0 of `value` is index 0).
    pub fn from_u64(len: usize, value: u64) -> Self {
        assert!(len <= 64, "from_u64 takes at most 64 bits");
        Self::from_words(len, vec![value])
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let words = (0..words_for(len)).map(|_| rng.gen::<u64>()).collect();
        Self::from_words(len, words)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// First 64 bits as an integer (bit 0 → least significant).
    pub fn to_u64(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range (len {})", self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range (len {})", self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range (len {})", self.len);
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Inner product over GF(2). Panics on length mismatch.
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "dot product length mismatch");
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() & 1 == 1
    }

    pub fn xor_in_place(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "xor length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        self.debug_check();
    }

    /// `true` when every set bit of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "subset test length mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut word = w;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let tz = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(wi * WORD_BITS + tz)
            })
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.len + other.len);
        out.words[..self.words.len()].copy_from_slice(&self.words);
        out.copy_from(self.len, other);
        out
    }

    /// Copies `src` into `self` starting at bit `offset`.
    pub fn copy_from(&mut self, offset: usize, src: &BitVec) {
        assert!(offset + src.len <= self.len, "copy_from out of range");
        if offset.is_multiple_of(WORD_BITS) {
            let start = offset / WORD_BITS;
            for (i, &w) in src.words.iter().enumerate() {
                if i + 1 == src.words.len() && !src.len.is_multiple_of(WORD_BITS) {
                    let keep = (1u64 << (src.len % WORD_BITS)) - 1;
                    self.words[start + i] = (self.words[start + i] & !keep) | w;
                } else {
                    self.words[start + i] = w;
                }
            }
        } else {
            for i in 0..src.len {
                self.set(offset + i, src.get(i));
            }
        }
        self.debug_check();
    }

    /// Bits `start .. start + len`.
    pub fn slice(&self, start: usize, len: usize) -> BitVec {
        assert!(start + len <= self.len, "slice out of range");
        if start.is_multiple_of(WORD_BITS) {
            let first = start / WORD_BITS;
            let words = self.words[first..first + words_for(len)].to_vec();
            return BitVec::from_words(len, words);
        }
        let mut out = BitVec::zeros(len);
        for i in 0..len {
            if self.get(start + i) {
                out.words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
            }
        }
        out
    }

    /// Little-endian byte packing, `ceil(len / 8)` bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        let n = self.len.div_ceil(8);
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push((self.words[i / 8] >> (8 * (i % 8))) as u8);
        }
        out
    }

    /// Inverse of [`BitVec::to_bytes`]; bits beyond `len` in the last byte are ignored.
    pub fn from_bytes(len: usize, bytes: &[u8]) -> Self {
        let mut words = vec![0u64; words_for(len)];
        for (i, &b) in bytes.iter().take(len.div_ceil(8)).enumerate() {
            words[i / 8] |= (b as u64) << (8 * (i % 8));
        }
        Self::from_words(len, words)
    }

    pub fn to_hex(&self) -> String {
        self.to_bytes().iter().map(|b| format!("{b:02x}")).collect()
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    /// Trailing-bit invariant hook.
    #[inline]
    pub(crate) fn debug_check(&self) {
        debug_assert_eq!(self.words.len(), words_for(self.len));
        debug_assert!(self.tail_is_clean(), "bits beyond len are set");
    }

    pub fn tail_is_clean(&self) -> bool {
        let rem = self.len % WORD_BITS;
        rem == 0 || self.words.last().is_none_or(|w| w >> rem == 0)
    }
}

impl BitXorAssign<&BitVec> for BitVec {
    fn bitxor_assign(&mut self, rhs: &BitVec) {
        self.xor_in_place(rhs);
    }
}

impl BitXor for &BitVec {
    type Output = BitVec;
    fn bitxor(self, rhs: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_in_place(rhs);
        out
    }
}

impl BitAnd for &BitVec {
    type Output = BitVec;
    fn bitand(self, rhs: &BitVec) -> BitVec {
        assert_eq!(self.len, rhs.len, "and length mismatch");
        let words = self.words.iter().zip(&rhs.words).map(|(a, b)| a & b).collect();
        BitVec { len: self.len, words }
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 128 {
            write!(f, "BitVec[{}]({})", self.len, self)
        } else {
            write!(f, "BitVec[{}](weight {})", self.len, self.weight())
        }
    }
}
