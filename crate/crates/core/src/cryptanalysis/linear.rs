use crate::gf2::{BitMatrix, BitVec};
use crate::sampling::{lpn_sample, par_trials, Seed};

use super::{sigmas, AnalysisError};

/// Outcome of running the linear test `b -> ⟨b, v⟩` on fresh LPN samples.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearTestResult {
    pub test_vector: BitVec,
    /// `A·v = 0`.
    pub in_kernel: bool,
    /// `Pr[⟨b, v⟩ = 0] - 1/2` predicted by the piling-up lemma.
    pub analytic_bias: f64,
    pub empirical_bias: f64,
    pub stderr: f64,
    pub trials: usize,
}

impl LinearTestResult {
    pub fn sigmas(&self) -> f64 {
        sigmas(self.empirical_bias, self.analytic_bias, self.stderr)
    }
}

/// `(1 - 2ε)^w / 2` for kernel vectors, `0` otherwise.
pub fn analytic_bias(in_kernel: bool, eps: f64, weight: usize) -> f64 {
    if in_kernel {
        (1.0 - 2.0 * eps).powi(weight as i32) / 2.0
    } else {
        0.0
    }
}

/// Measures the bias of `⟨b, v⟩` over `trials` samples `b = s·A + e`.
pub fn bias_of(a: &BitMatrix, v: &BitVec, eps: f64, trials: usize, seed: &Seed) -> Result<LinearTestResult, AnalysisError> {
    if v.len() != a.cols() {
        return Err(AnalysisError::Shape(format!(
            "test vector has length {}, matrix has {} columns",
            v.len(),
            a.cols()
        )));
    }
    if v.is_zero() {
        return Err(AnalysisError::ZeroVector);
    }
    let in_kernel = a.mul_vec(v)?.is_zero();
    let zeros = par_trials(seed, "bias", trials, |_, rng| lpn_sample(a, eps, rng).map(|b| !b.dot(v)))
        .into_iter()
        .try_fold(0usize, |acc, r| r.map(|z| acc + z as usize))?;
    let p = zeros as f64 / trials.max(1) as f64;
    Ok(LinearTestResult {
        test_vector: v.clone(),
        in_kernel,
        analytic_bias: analytic_bias(in_kernel, eps, v.weight()),
        empirical_bias: p - 0.5,
        stderr: (p * (1.0 - p) / trials.max(1) as f64).sqrt(),
        trials,
    })
}
