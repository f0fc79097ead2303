use rand::Rng;

use crate::gf2::{BitMatrix, BitVec};
use crate::sampling::Seed;

/// Systematic binary `[2b, b]` code `x -> (x, P·x)` with maximum-likelihood
/// decoding through a coset-leader table indexed by the syndrome.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InnerCode {
    b: usize,
    /// `P`, stored as `b` rows of `b` bits (row `i` gives parity bit `i`).
    parity: Vec<u32>,
    distance: usize,
    /// `leaders[s]`: a minimum-weight error pattern (`2b` bits, packed) with syndrome `s`.
    leaders: Vec<u32>,
}

/// Work budget of the seeded search, in encoded words (`candidates · 2^b`).
const SEARCH_BUDGET: usize = 1 << 22;

impl InnerCode {
    /// Best-distance code among a fixed seeded sample of parity matrices.
    pub fn search(b: usize) -> Self {
        assert!((1..=15).contains(&b), "inner dimension {b} outside 1..=15");
        let mut rng = Seed::from_u64(0x1c0d_e000 + b as u64).derive("inner-code").rng();
        let mask = (1u32 << b) - 1;
        let mut best: Option<(usize, Vec<u32>)> = None;
        for _ in 0..(SEARCH_BUDGET >> b).max(256) {
            let parity: Vec<u32> = (0..b).map(|_| rng.gen::<u32>() & mask).collect();
            let d = min_distance(b, &parity);
            if best.as_ref().is_none_or(|(bd, _)| d > *bd) {
                best = Some((d, parity));
            }
        }
        let (_, parity) = best.expect("at least one candidate");
        Self::from_parity(b, parity)
    }

    /// Rebuilds the code (distance and decoding table) from `P`.
    pub fn from_parity(b: usize, parity: Vec<u32>) -> Self {
        assert_eq!(parity.len(), b, "parity matrix must have b rows");
        let distance = min_distance(b, &parity);
        let mut code = Self {
            b,
            parity,
            distance,
            leaders: Vec::new(),
        };
        code.leaders = code.build_leaders();
        code
    }

    pub fn dim(&self) -> usize {
        self.b
    }

    pub fn len(&self) -> usize {
        2 * self.b
    }

    pub fn distance(&self) -> usize {
        self.distance
    }

    pub fn parity_rows(&self) -> &[u32] {
        &self.parity
    }

    pub fn leaders(&self) -> &[u32] {
        &self.leaders
    }

    fn parity_of(&self, x: u32) -> u32 {
        self.parity
            .iter()
            .enumerate()
            .fold(0u32, |acc, (i, &row)| acc | (((row & x).count_ones() & 1) << i))
    }

    /// Codeword bits: low `b` bits are `x`, high `b` bits are `P·x`.
    pub fn encode(&self, x: u32) -> u32 {
        x | (self.parity_of(x) << self.b)
    }

    fn syndrome(&self, word: u32) -> u32 {
        let mask = (1u32 << self.b) - 1;
        self.parity_of(word & mask) ^ (word >> self.b)
    }

    /// Nearest codeword's message.
    pub fn decode(&self, word: u32) -> u32 {
        let fixed = word ^ self.leaders[self.syndrome(word) as usize];
        fixed & ((1u32 << self.b) - 1)
    }

    fn build_leaders(&self) -> Vec<u32> {
        let n = 2 * self.b;
        let size = 1usize << self.b;
        let mut leaders = vec![u32::MAX; size];
        let mut filled = 0;
        for w in 0..=n {
            for_each_weight(n, w, |e| {
                let s = self.syndrome(e) as usize;
                if leaders[s] == u32::MAX {
                    leaders[s] = e;
                    filled += 1;
                }
            });
            if filled == size {
                break;
            }
        }
        leaders
    }

    /// Generator as a `2b × b` matrix (column `j` is the codeword of `e_j`).
    pub fn generator(&self) -> BitMatrix {
        let cols: Vec<BitVec> = (0..self.b)
            .map(|j| BitVec::from_u64(2 * self.b, self.encode(1 << j) as u64))
            .collect();
        BitMatrix::from_columns(2 * self.b, &cols).expect("consistent shapes")
    }
}

/// Every `n`-bit word of weight `w`, in increasing numeric order (Gosper's hack).
fn for_each_weight(n: usize, w: usize, mut f: impl FnMut(u32)) {
    if w == 0 {
        f(0);
        return;
    }
    if w > n {
        return;
    }
    let limit = 1u64 << n;
    let mut v: u64 = (1u64 << w) - 1;
    while v < limit {
        f(v as u32);
        let c = v & v.wrapping_neg();
        let r = v + c;
        v = (((r ^ v) >> 2) / c) | r;
    }
}

fn min_distance(b: usize, parity: &[u32]) -> usize {
    let code = InnerCode {
        b,
        parity: parity.to_vec(),
        distance: 0,
        leaders: Vec::new(),
    };
    (1u32..1 << b)
        .map(|x| code.encode(x).count_ones() as usize)
        .min()
        .unwrap_or(2 * b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gosper_counts() {
        let mut c = 0;
        for_each_weight(8, 3, |_| c += 1);
        assert_eq!(c, 56);
    }

    #[test]
    fn search_reaches_known_distances() {
        // Best [2b, b] distances: b=3 -> 3, b=4 -> 4, b=8 -> 5.
        assert_eq!(InnerCode::search(3).distance(), 3);
        assert_eq!(InnerCode::search(4).distance(), 4);
        assert!(InnerCode::search(8).distance() >= 4);
    }

    #[test]
    fn ml_decoding_within_half_distance() {
        let code = InnerCode::search(5);
        let radius = (code.distance() - 1) / 2;
        for x in 0..32u32 {
            let cw = code.encode(x);
            for w in 0..=radius {
                for_each_weight(10, w, |e| assert_eq!(code.decode(cw ^ e), x));
            }
        }
    }
}
