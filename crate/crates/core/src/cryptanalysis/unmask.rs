use std::collections::BTreeSet;

use rand::Rng;

use crate::gf2::{BitMatrix, BitVec};
use crate::sampling::k_subset;

use super::AnalysisError;

/// Left-kernel spans up to this dimension are enumerated in full.
const SPAN_LIMIT: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnmaskOutcome {
    /// `z·A = M` up to row order; rows of `z` are sorted.
    Recovered { z: BitMatrix, za: BitMatrix, tries: usize },
    Failure { tries: usize, candidates: usize, rank: usize },
}

impl UnmaskOutcome {
    pub fn is_recovered(&self) -> bool {
        matches!(self, UnmaskOutcome::Recovered { .. })
    }
}

/// Searches for `Z` with `Z·A` sparse, where `A = T·M` and `M` is `n × m`
/// with `k`-sparse columns.
///
/// Each try takes `r = rows(A)` random columns `I` and keeps every vector `z`
/// of the left kernel of `A_I` whose product `z·A` has weight at most `2km/n`.
/// Once the candidates span `n` dimensions, the lightest independent ones are
/// taken and accepted if every column of `Z·A` has weight exactly `k`. When
/// `r < n` the candidates can never span `n` dimensions.
pub fn unmask_square_t<R: Rng + ?Sized>(
    a: &BitMatrix,
    n: usize,
    k: usize,
    max_tries: usize,
    rng: &mut R,
) -> Result<UnmaskOutcome, AnalysisError> {
    let (r, m) = (a.rows(), a.cols());
    if r == 0 || r > m || n == 0 {
        return Err(AnalysisError::Shape(format!("cannot unmask a {r} x {m} matrix to {n} rows")));
    }
    let threshold = 2 * k * m / n;
    let mut pool: BTreeSet<(usize, BitVec)> = BTreeSet::new();
    let mut rank = 0;
    for tries in 1..=max_tries {
        let cols: Vec<usize> = k_subset(m, r, rng).into_iter().map(|i| i as usize).collect();
        let basis = a.select_columns(&cols).left_kernel_basis();
        let mut added = false;
        for z in span_or_basis(&basis) {
            let za = a.vec_mul(&z)?;
            let w = za.weight();
            if w > 0 && w <= threshold {
                added |= pool.insert((w, z));
            }
        }
        if !added {
            continue;
        }
        let chosen = greedy_basis(&pool, r);
        rank = chosen.len();
        if rank < n {
            continue;
        }
        let mut rows: Vec<BitVec> = chosen.into_iter().take(n).collect();
        rows.sort();
        let z = BitMatrix::from_rows(r, rows)?;
        let za = z.mul(a)?;
        let cols_ok = (0..m).all(|j| za.column(j).weight() == k);
        if cols_ok {
            return Ok(UnmaskOutcome::Recovered { z, za, tries });
        }
    }
    Ok(UnmaskOutcome::Failure {
        tries: max_tries,
        candidates: pool.len(),
        rank,
    })
}

fn span_or_basis(basis: &[BitVec]) -> Vec<BitVec> {
    if basis.is_empty() || basis.len() > SPAN_LIMIT {
        return basis.to_vec();
    }
    (1u32..1 << basis.len())
        .map(|mask| {
            let mut v = BitVec::zeros(basis[0].len());
            for (i, b) in basis.iter().enumerate() {
                if (mask >> i) & 1 == 1 {
                    v.xor_in_place(b);
                }
            }
            v
        })
        .collect()
}

/// Lightest-first independent subset of the pool.
fn greedy_basis(pool: &BTreeSet<(usize, BitVec)>, len: usize) -> Vec<BitVec> {
    let mut chosen: Vec<BitVec> = Vec::new();
    // Reduced copies with their pivot positions, for incremental independence tests.
    let mut reduced: Vec<(usize, BitVec)> = Vec::new();
    for (_, z) in pool {
        let mut v = z.clone();
        for (p, row) in &reduced {
            if v.get(*p) {
                v.xor_in_place(row);
            }
        }
        let pivot = v.iter_ones().next();
        if let Some(p) = pivot {
            for (_, row) in reduced.iter_mut() {
                if row.get(p) {
                    row.xor_in_place(&v);
                }
            }
            reduced.push((p, v));
            chosen.push(z.clone());
            if chosen.len() == len {
                break;
            }
        }
    }
    chosen
}
