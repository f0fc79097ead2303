use rand::Rng;

use crate::gf2::{BitMatrix, BitVec, SparseMatrix};
use crate::sampling::{distinct_sparse, k_subset, lpn_sample, par_trials, uniform_sparse, DslRng, Seed};

use super::AnalysisError;

/// One run of the subset attack against a matrix with sparse columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttackReport {
    /// Row subset `S` of the last attempt.
    pub subset: Vec<usize>,
    /// Columns whose support lies inside `S`.
    pub columns_found: Vec<usize>,
    /// Verified kernel vector supported on `columns_found`.
    pub dependency: Option<BitVec>,
    /// `|T|` for every attempt, in order.
    pub t_sizes: Vec<usize>,
    /// `⟨b, dependency⟩` when a sample was supplied.
    pub decision: Option<bool>,
}

impl AttackReport {
    pub fn success(&self) -> bool {
        self.dependency.is_some()
    }

    pub fn attempts(&self) -> usize {
        self.t_sizes.len()
    }
}

/// The subset attack on a `k`-sparse `M`: pick `|S| = t_size` rows, keep the
/// columns supported inside `S`, and return a linear dependency among them.
pub fn sparse_attack<R: Rng + ?Sized>(
    m: &SparseMatrix,
    b: Option<&BitVec>,
    t_size: usize,
    max_subsets: usize,
    rng: &mut R,
) -> Result<AttackReport, AnalysisError> {
    let cols: Vec<BitVec> = (0..m.cols()).map(|j| m.column(j)).collect();
    attack_columns(m.rows(), &cols, b, t_size, max_subsets, rng)
}

/// The same attack run on an arbitrary (possibly dense) public matrix.
pub fn column_attack<R: Rng + ?Sized>(
    a: &BitMatrix,
    b: Option<&BitVec>,
    t_size: usize,
    max_subsets: usize,
    rng: &mut R,
) -> Result<AttackReport, AnalysisError> {
    let cols = a.transpose().into_rows();
    attack_columns(a.rows(), &cols, b, t_size, max_subsets, rng)
}

fn attack_columns<R: Rng + ?Sized>(
    rows: usize,
    cols: &[BitVec],
    b: Option<&BitVec>,
    t_size: usize,
    max_subsets: usize,
    rng: &mut R,
) -> Result<AttackReport, AnalysisError> {
    if t_size == 0 || t_size > rows {
        return Err(AnalysisError::Shape(format!("subset size {t_size} outside 1..={rows}")));
    }
    if let Some(b) = b {
        if b.len() != cols.len() {
            return Err(AnalysisError::Shape(format!(
                "sample has length {}, matrix has {} columns",
                b.len(),
                cols.len()
            )));
        }
    }
    let mut report = AttackReport {
        subset: Vec::new(),
        columns_found: Vec::new(),
        dependency: None,
        t_sizes: Vec::new(),
        decision: None,
    };
    for _ in 0..max_subsets.max(1) {
        let subset: Vec<usize> = k_subset(rows, t_size, rng).into_iter().map(|i| i as usize).collect();
        let mask = BitVec::from_indices(rows, subset.iter().copied());
        let found: Vec<usize> = (0..cols.len()).filter(|&j| cols[j].is_subset_of(&mask)).collect();
        report.t_sizes.push(found.len());
        let dep = find_dependency(cols, &found, &subset);
        report.subset = subset;
        report.columns_found = found;
        if let Some(v) = dep {
            let mut sum = BitVec::zeros(rows);
            for j in v.iter_ones() {
                sum.xor_in_place(&cols[j]);
            }
            if !sum.is_zero() {
                return Err(AnalysisError::Shape("dependency failed verification".into()));
            }
            report.decision = b.map(|b| b.dot(&v));
            report.dependency = Some(v);
            break;
        }
    }
    Ok(report)
}

/// A zero column, then a duplicate pair, then the first kernel basis vector
/// of the columns restricted to `subset`.
fn find_dependency(cols: &[BitVec], found: &[usize], subset: &[usize]) -> Option<BitVec> {
    let m = cols.len();
    if let Some(&j) = found.iter().find(|&&j| cols[j].is_zero()) {
        return Some(BitVec::unit(m, j));
    }
    let mut order = found.to_vec();
    order.sort_by(|&a, &b| cols[a].cmp(&cols[b]).then(a.cmp(&b)));
    if let Some(w) = order.windows(2).find(|w| cols[w[0]] == cols[w[1]]) {
        return Some(BitVec::from_indices(m, [w[0].min(w[1]), w[0].max(w[1])]));
    }
    if found.len() <= subset.len() {
        return None;
    }
    let restricted: Vec<BitVec> = found
        .iter()
        .map(|&j| BitVec::from_bools(&subset.iter().map(|&i| cols[j].get(i)).collect::<Vec<_>>()))
        .collect();
    let sub = BitMatrix::from_columns(subset.len(), &restricted).ok()?;
    let v = sub.kernel_basis().into_iter().next()?;
    Some(BitVec::from_indices(m, v.iter_ones().map(|i| found[i])))
}

/// How a distinguisher picks its test vector from the public matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Lowest-weight vector of the reduced kernel basis.
    BestKernelVector,
    /// The subset attack of [`column_attack`].
    SparseAttackPipeline,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColumnSampler {
    /// Independent uniform `k`-subsets (duplicates allowed).
    Uniform,
    /// Uniform `k`-subsets conditioned on being pairwise distinct.
    Distinct,
}

/// Instance shape for [`distinguish`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistinguisherSetup {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    /// `None` for plain sparse LPN (`A = M`); otherwise `A = T·M` with `T`
    /// of size `alpha·n × n`.
    pub alpha: Option<f64>,
    pub eps: f64,
    pub t_size: usize,
    pub max_subsets: usize,
    pub columns: ColumnSampler,
    /// Fresh samples `b` drawn per matrix.
    pub draws: usize,
}

/// Empirical advantage `2·Pr[correct] - 1` of a distinguisher.
#[derive(Clone, Debug, PartialEq)]
pub struct AdvantageEstimate {
    pub advantage: f64,
    pub stderr: f64,
    pub matrices: usize,
    pub draws: usize,
    /// Matrices for which the strategy produced a verified test vector.
    pub found: usize,
    /// Mean over all draws of `(1 - 2ε)^w / 2` for the vector in use (`0` without one).
    pub predicted: f64,
}

impl AdvantageEstimate {
    pub fn sigmas_from(&self, expected: f64) -> f64 {
        super::sigmas(self.advantage, expected, self.stderr)
    }
}

fn public_matrix(setup: &DistinguisherSetup, rng: &mut DslRng) -> Result<BitMatrix, AnalysisError> {
    let m = match setup.columns {
        ColumnSampler::Uniform => uniform_sparse(setup.n, setup.m, setup.k, rng)?,
        ColumnSampler::Distinct => distinct_sparse(setup.n, setup.m, setup.k, rng)?,
    };
    match setup.alpha {
        None => Ok(m.densify()),
        Some(alpha) => {
            let rows = alpha * setup.n as f64;
            if !(alpha > 0.0) || rows.fract() != 0.0 {
                return Err(AnalysisError::Shape(format!("alpha·n = {rows} must be a positive integer")));
            }
            let t = BitMatrix::random(rows as usize, setup.n, rng);
            Ok(m.left_mul(&t)?)
        }
    }
}

fn test_vector(
    a: &BitMatrix,
    setup: &DistinguisherSetup,
    strategy: Strategy,
    rng: &mut DslRng,
) -> Result<Option<BitVec>, AnalysisError> {
    match strategy {
        Strategy::SparseAttackPipeline => {
            let t_size = setup.t_size.min(a.rows());
            Ok(column_attack(a, None, t_size, setup.max_subsets, rng)?.dependency)
        }
        Strategy::BestKernelVector => Ok(a.kernel_basis().into_iter().min_by_key(|v| v.weight())),
    }
}

/// Runs `strategy` as a full LPN-versus-uniform distinguisher over `matrices`
/// fresh instances. Each draw flips a fair coin for the world; without a test
/// vector the guess is a coin flip.
pub fn distinguish(
    setup: &DistinguisherSetup,
    strategy: Strategy,
    matrices: usize,
    seed: &Seed,
) -> Result<AdvantageEstimate, AnalysisError> {
    let per = par_trials(seed, "distinguish", matrices, |_, rng| -> Result<_, AnalysisError> {
        let a = public_matrix(setup, rng)?;
        let v = test_vector(&a, setup, strategy, rng)?;
        let mut correct = 0usize;
        for _ in 0..setup.draws {
            let lpn: bool = rng.gen();
            let b = if lpn {
                lpn_sample(&a, setup.eps, rng)?
            } else {
                BitVec::random(a.cols(), rng)
            };
            let guess = match &v {
                Some(v) => !b.dot(v),
                None => rng.gen(),
            };
            correct += (guess == lpn) as usize;
        }
        let predicted = v
            .as_ref()
            .map_or(0.0, |v| (1.0 - 2.0 * setup.eps).powi(v.weight() as i32) / 2.0);
        Ok((correct, v.is_some(), predicted))
    });
    let (mut correct, mut found, mut predicted) = (0usize, 0usize, 0.0);
    for r in per {
        let (c, f, p) = r?;
        correct += c;
        found += f as usize;
        predicted += p;
    }
    let draws = matrices * setup.draws;
    let p = correct as f64 / draws.max(1) as f64;
    Ok(AdvantageEstimate {
        advantage: 2.0 * p - 1.0,
        stderr: 2.0 * (p * (1.0 - p) / draws.max(1) as f64).sqrt(),
        matrices,
        draws,
        found,
        predicted: predicted / matrices.max(1) as f64,
    })
}

/// [`distinguish`] on Dense-Sparse instances `A = T·M` with `T` of size `alpha·n × n`.
pub fn distinguish_dense_sparse(
    setup: &DistinguisherSetup,
    alpha: f64,
    strategy: Strategy,
    matrices: usize,
    seed: &Seed,
) -> Result<AdvantageEstimate, AnalysisError> {
    distinguish(
        &DistinguisherSetup {
            alpha: Some(alpha),
            ..*setup
        },
        strategy,
        matrices,
        seed,
    )
}
