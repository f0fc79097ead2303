//! Linear tests, dual-distance search and the sparse-LPN attacks.

mod attack;
mod dual;
mod linear;
mod unmask;

pub use attack::{
    column_attack, distinguish, distinguish_dense_sparse, sparse_attack, AdvantageEstimate, AttackReport,
    ColumnSampler, DistinguisherSetup, Strategy,
};
pub use dual::{dual_distance, dual_distance_sparse, dual_distance_stats, DualDistance, DualDistanceStats};
pub use linear::{analytic_bias, bias_of, LinearTestResult};
pub use unmask::{unmask_square_t, UnmaskOutcome};

pub(crate) use dual::binom_f64;

use thiserror::Error;

use crate::gf2::Gf2Error;
use crate::sampling::SamplingError;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum AnalysisError {
    #[error("test vector must be nonzero")]
    ZeroVector,
    #[error("bad shape: {0}")]
    Shape(String),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

/// `|observed - expected| / stderr`, infinite when a zero-variance estimate misses.
pub fn sigmas(observed: f64, expected: f64, stderr: f64) -> f64 {
    let gap = (observed - expected).abs();
    if stderr > 0.0 {
        gap / stderr
    } else if gap == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}
