use std::collections::HashMap;

use crate::gf2::{BitMatrix, BitVec, SparseMatrix};
use crate::sampling::{uniform_sparse, SamplingError};

/// Result of a bounded dual-distance search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DualDistance {
    /// Minimum kernel weight `d` with the colex-first kernel vector of that weight.
    Found { d: usize, witness: BitVec },
    /// No nonzero kernel vector of weight `<= w_max`.
    Above(usize),
}

impl DualDistance {
    pub fn distance(&self) -> Option<usize> {
        match self {
            DualDistance::Found { d, .. } => Some(*d),
            DualDistance::Above(_) => None,
        }
    }
}

/// Minimum weight of a nonzero `x` with `A·x = 0`, searched up to `w_max`.
pub fn dual_distance(a: &BitMatrix, w_max: usize) -> DualDistance {
    if a.rank() == a.cols() {
        return DualDistance::Above(w_max);
    }
    let cols: Vec<Vec<u64>> = a
        .transpose()
        .row_vecs()
        .iter()
        .map(|c| c.words().to_vec())
        .collect();
    search(&cols, w_max)
}

pub fn dual_distance_sparse(m: &SparseMatrix, w_max: usize) -> DualDistance {
    let words = m.rows().div_ceil(64);
    let cols: Vec<Vec<u64>> = m
        .columns()
        .iter()
        .map(|c| {
            let mut w = vec![0u64; words];
            for &i in c {
                w[i as usize / 64] |= 1 << (i % 64);
            }
            w
        })
        .collect();
    if m.rows() >= m.cols() && m.densify().rank() == m.cols() {
        return DualDistance::Above(w_max);
    }
    search(&cols, w_max)
}

fn xor_into(acc: &mut [u64], c: &[u64]) {
    for (a, b) in acc.iter_mut().zip(c) {
        *a ^= b;
    }
}

/// Visits every `size`-subset of `0..m` in colex order.
fn for_each_subset(m: usize, size: usize, mut f: impl FnMut(&[usize])) {
    if size > m {
        return;
    }
    if size == 0 {
        f(&[]);
        return;
    }
    // Colex successor: bump the lowest element that can move up.
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        f(&idx);
        let mut i = 0;
        while i + 1 < size && idx[i] + 1 == idx[i + 1] {
            i += 1;
        }
        if i + 1 == size && idx[i] + 1 == m {
            return;
        }
        idx[i] += 1;
        for (j, v) in idx.iter_mut().enumerate().take(i) {
            *v = j;
        }
    }
}

/// `true` when `a` precedes `b` in colex order (both sorted ascending).
fn colex_less(a: &[usize], b: &[usize]) -> bool {
    a.iter().rev().lt(b.iter().rev())
}

/// Meet in the middle at each weight: a weight-`w` support splits uniquely
/// into its lowest `floor(w/2)` and highest `ceil(w/2)` indices.
fn search(cols: &[Vec<u64>], w_max: usize) -> DualDistance {
    let m = cols.len();
    let words = cols.first().map_or(0, Vec::len);
    for w in 1..=w_max.min(m) {
        let hi = w - w / 2;
        let lo = w / 2;
        let mut table: HashMap<Vec<u64>, Vec<Vec<usize>>> = HashMap::new();
        for_each_subset(m, hi, |s| {
            let mut acc = vec![0u64; words];
            for &j in s {
                xor_into(&mut acc, &cols[j]);
            }
            table.entry(acc).or_default().push(s.to_vec());
        });
        let mut best: Option<Vec<usize>> = None;
        for_each_subset(m, lo, |s| {
            let mut acc = vec![0u64; words];
            for &j in s {
                xor_into(&mut acc, &cols[j]);
            }
            let Some(cands) = table.get(&acc) else {
                return;
            };
            let max_lo = s.last().copied();
            for c in cands {
                if max_lo.is_some_and(|x| x >= c[0]) {
                    continue;
                }
                let mut support = s.to_vec();
                support.extend_from_slice(c);
                if best.as_ref().is_none_or(|b| colex_less(&support, b)) {
                    best = Some(support);
                }
            }
        });
        if let Some(support) = best {
            return DualDistance::Found {
                d: w,
                witness: BitVec::from_indices(m, support),
            };
        }
    }
    DualDistance::Above(w_max)
}

/// Monte-Carlo estimate of how often a fresh uniform `k`-sparse `n × m`
/// matrix has dual distance `<= w_bound`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualDistanceStats {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub w_bound: usize,
    pub trials: usize,
    pub hits: usize,
    pub frequency: f64,
    /// Lower bound from duplicate columns alone: `1 - exp(-C(m,2)/C(n,k))`.
    pub birthday_floor: f64,
    /// `(k / n^delta)^(k-2)`, the order predicted for a small-dual-distance event.
    pub predicted_order: f64,
}

/// Frequency of `dd(M) <= c·n^delta` over fresh matrices, one RNG per trial.
pub fn dual_distance_stats(
    n: usize,
    m: usize,
    k: usize,
    delta: f64,
    c: f64,
    trials: usize,
    mut rng_for: impl FnMut(u64) -> crate::sampling::DslRng,
) -> Result<DualDistanceStats, SamplingError> {
    let w_bound = (c * (n as f64).powf(delta)).floor().max(1.0) as usize;
    let mut hits = 0;
    for i in 0..trials {
        let mut rng = rng_for(i as u64);
        let mat = uniform_sparse(n, m, k, &mut rng)?;
        if dual_distance_sparse(&mat, w_bound).distance().is_some() {
            hits += 1;
        }
    }
    let pairs = (m * (m - 1) / 2) as f64;
    let ck = binom_f64(n, k);
    Ok(DualDistanceStats {
        n,
        m,
        k,
        w_bound,
        trials,
        hits,
        frequency: hits as f64 / trials.max(1) as f64,
        birthday_floor: 1.0 - (-pairs / ck).exp(),
        predicted_order: (k as f64 / (n as f64).powf(delta)).powi(k as i32 - 2),
    })
}

pub(crate) fn binom_f64(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
