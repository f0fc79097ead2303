//! The acceptance suite, one function per criterion.

use std::time::{Duration, Instant};

use dslpn::crhf::{collision_census, crhf_gen, HSampling};
use dslpn::cryptanalysis::{
    bias_of, distinguish, distinguish_dense_sparse, sigmas, sparse_attack, unmask_square_t, ColumnSampler,
    DistinguisherSetup, Strategy, UnmaskOutcome,
};
use dslpn::ecc::{BlockCode, CodeRegistry, ConcatenatedCode, InnerCode};
use dslpn::gadget::{gadget_matrix, sparsify, GadgetParams};
use dslpn::gf2::{BitMatrix, BitVec};
use dslpn::ltdf::{abo_eval, abo_gen, abo_invert, lossiness_measure, noise_marginal, noise_weight_check, FrdFamily};
use dslpn::params::{
    ball_le, derive_crhf, derive_ltdf, min_delta, min_m, CodeSpec, CrhfParams, LtdfInputs, LtdfParams, LtdfSizing,
};
use dslpn::sampling::{k_subset, par_trials, uniform_sparse, Seed};
use num_bigint::BigUint;
use num_rational::Rational64;
use rand::Rng;

/// Result of one criterion. `detail` holds only seed-determined values.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed: Duration,
}

struct Check {
    pass: bool,
    detail: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Self {
            pass: true,
            detail: Vec::new(),
        }
    }

    fn note(&mut self, key: &str, value: impl ToString) {
        self.detail.push(format!("{key}={}", value.to_string()));
    }

    fn require(&mut self, ok: bool, what: &str) {
        if !ok {
            self.pass = false;
            self.detail.push(format!("FAILED:{what}"));
        }
    }
}

type Runner = fn(&Seed) -> Result<Check, String>;

/// `(id, name, runtime limit, runner)`.
const CRITERIA: &[(u32, &str, Option<u64>, Runner)] = &[
    (1, "gadget-identity", Some(1), gadget_identity),
    (2, "frd-family", Some(5), frd_family),
    (3, "ltdf-inversion", None, ltdf_inversion),
    (4, "ltdf-lossiness", None, ltdf_lossiness),
    (5, "noise-bound", None, noise_bound),
    (6, "crhf-collisions", Some(60), crhf_collisions),
    (7, "bias-oracle", None, bias_oracle),
    (8, "sparse-lpn-attack", Some(300), sparse_lpn_attack),
    (9, "unmasking-dichotomy", None, unmasking),
    (10, "dense-sparse-null", None, dense_sparse_null),
    (11, "parameter-consistency", None, parameter_consistency),
    (12, "ecc-contract", None, ecc_contract),
];

/// Identifiers of the criteria run in-process.
pub fn ids() -> Vec<u32> {
    CRITERIA.iter().map(|c| c.0).collect()
}

pub fn run(id: u32, seed: &Seed) -> Option<Outcome> {
    let &(id, name, limit, runner) = CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let result = runner(&seed.derive(&format!("criterion-{id}")));
    let elapsed = start.elapsed();
    let (pass, mut detail) = match result {
        Ok(c) => (c.pass, c.detail),
        Err(e) => (false, vec![format!("error={e}")]),
    };
    let mut pass = pass;
    if let Some(secs) = limit {
        detail.push(format!("limit_s={secs}"));
        if elapsed > Duration::from_secs(secs) {
            pass = false;
            detail.push("FAILED:runtime".into());
        }
    }
    Some(Outcome {
        id,
        name,
        pass,
        detail: detail.join(" "),
        elapsed,
    })
}

pub fn run_all(seed: &Seed, mut progress: impl FnMut(&Outcome)) -> Vec<Outcome> {
    ids()
        .into_iter()
        .map(|id| {
            let o = run(id, seed).expect("declared criterion");
            progress(&o);
            o
        })
        .collect()
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn gadget_identity(_: &Seed) -> Result<Check, String> {
    let mut c = Check::new();
    let mut total = 0u64;
    for (w, s) in [(2, 4), (3, 4), (4, 3)] {
        let p = GadgetParams::from_blocks(w, s).map_err(err)?;
        let g = gadget_matrix(&p);
        let len = p.dense_len();
        let mut bad = 0u64;
        for i in 0..1u64 << len {
            let x = BitVec::from_u64(len, i);
            let xt = sparsify(&p, &x).map_err(err)?;
            if xt.weight() != w || g.mul_vec(&xt).map_err(err)? != x {
                bad += 1;
            }
        }
        total += 1 << len;
        c.require(bad == 0, &format!("identity(w={w},s={s})"));
    }
    c.note("inputs", total);
    Ok(c)
}

fn frd_family(_: &Seed) -> Result<Check, String> {
    let mut c = Check::new();
    let frd = FrdFamily::new(8);
    let mats: Vec<BitMatrix> = (0..256u64).map(|t| frd.matrix(&BitVec::from_u64(8, t))).collect();
    let mut pairs = 0u64;
    let mut singular = 0u64;
    for a in 0..256 {
        for b in a + 1..256 {
            pairs += 1;
            if mats[a].add(&mats[b]).map_err(err)?.rank() != 8 {
                singular += 1;
            }
        }
    }
    c.note("pairs", pairs);
    c.note("singular", singular);
    c.require(pairs == 32_640 && singular == 0, "pairwise-invertible");
    c.require(mats[0].is_zero(), "H_0=0");
    c.require(mats[1] == BitMatrix::identity(8), "H_1=I");
    Ok(c)
}

fn random_branch_except<R: Rng + ?Sized>(l: usize, avoid: &BitVec, rng: &mut R) -> BitVec {
    loop {
        let t = BitVec::random(l, rng);
        if t != *avoid {
            return t;
        }
    }
}

fn ltdf_inversion(seed: &Seed) -> Result<Check, String> {
    let mut c = Check::new();
    let mut registry = CodeRegistry::new();
    let p = LtdfParams::desk();
    let l = p.l as usize;
    let mut rng = seed.derive("keygen").rng();
    let tau_star = BitVec::random(l, &mut rng);
    let code = registry.concatenated(l).map_err(err)?;
    let kp = abo_gen(&p, &tau_star, code, &mut rng, false).map_err(err)?;
    let ok = par_trials(seed, "round-trips", 1000, |_, rng| {
        let tau = random_branch_except(l, &tau_star, rng);
        let x = BitVec::random(l, rng);
        abo_eval(&kp.fk, &tau, &x)
            .and_then(|y| abo_invert(&kp.td, &kp.fk, &tau, &y))
            .is_ok_and(|back| back == x)
    });
    let successes = ok.iter().filter(|&&b| b).count();
    c.note("desk_successes", format!("{successes}/1000"));
    c.require(successes as f64 / 1000.0 >= 0.999, "desk-rate");

    let tiny = LtdfParams::tiny_exhaustive().with_eps(0.0);
    let tl = tiny.l as usize;
    let mut rng = seed.derive("tiny").rng();
    let tau_star = BitVec::random(tl, &mut rng);
    let code = registry.concatenated(tl).map_err(err)?;
    let kp = abo_gen(&tiny, &tau_star, code, &mut rng, false).map_err(err)?;
    let mut failures = 0u64;
    let mut checked = 0u64;
    for _ in 0..4 {
        let tau = random_branch_except(tl, &tau_star, &mut rng);
        for i in 0..1u64 << tl {
            let x = BitVec::from_u64(tl, i);
            let y = abo_eval(&kp.fk, &tau, &x).map_err(err)?;
            checked += 1;
            if abo_invert(&kp.td, &kp.fk, &tau, &y).ok() != Some(x) {
                failures += 1;
            }
        }
    }
    c.note("noiseless_checked", checked);
    c.note("noiseless_failures", failures);
    c.require(failures == 0, "noiseless-exhaustive");
    Ok(c)
}

fn ltdf_lossiness(seed: &Seed) -> Result<Check, String> {
    let mut c = Check::new();
    let p = LtdfParams::tiny_lossy();
    c.require(p.regime.pass, "compression-regime");
    c.require(p.l <= 20, "domain<=2^20");
    let l = p.l as usize;
    let mut rng = seed.rng();
    let tau_star = BitVec::random(l, &mut rng);
    let code = CodeRegistry::new().concatenated(l).map_err(err)?;
    let kp = abo_gen(&p, &tau_star, code, &mut rng, false).map_err(err)?;
    let lo = lossiness_measure(&kp.fk, &kp.td).map_err(err)?;
    let bound = BigUint::from(lo.distinct_y1) * ball_le(p.ell, lo.max_noise as u64);
    c.note("domain", lo.domain);
    c.note("injective_image", lo.injective_image);
    c.note("lossy_image", lo.lossy_image);
    c.note("distinct_y1", lo.distinct_y1);
    c.note("max_noise", lo.max_noise);
    c.require(lo.injective_image == lo.domain, "injective-image");
    c.require(lo.lossy_image < lo.domain, "lossy-image");
    c.require(BigUint::from(lo.lossy_image) <= bound, "counting-bound");
    Ok(c)
}

fn noise_bound(seed: &Seed) -> Result<Check, String> {
    let mut c = Check::new();
    let p = LtdfParams::desk();
    let l = p.l as usize;
    let mut rng = seed.derive("keygen").rng();
    let code = CodeRegistry::new().concatenated(l).map_err(err)?;
    let kp = abo_gen(&p, &BitVec::random(l, &mut rng), code, &mut rng, true).map_err(err)?;
    let e = &kp.debug.as_ref().ok_or("debug parts missing")?.e;
    let worst = noise_weight_check(e, kp.fk.gadget(), 10_000, &mut seed.derive("weights").rng()).map_err(err)?;
    let budget = p.gamma * p.ell as f64;
    c.note("max_weight", worst);
    c.note("gamma_ell", format!("{budget:.3}"));
    c.require(worst as f64 <= budget, "max-weight");
    let marg = noise_marginal(p.eps, p.ell as usize, p.t as usize, 10_000, &mut seed.derive("marginal").rng())
        .map_err(err)?;
    c.note("marginal", format!("{:.6}", marg.observed));
    c.note("expected", format!("{:.6}", marg.expected));
    c.note("sigmas", format!("{:.2}", marg.sigmas()));
    c.require(marg.sigmas() <= 3.0, "marginal");
    Ok(c)
}

fn crhf_collisions(seed: &Seed) -> Result<Check, String> {
    let mut c = Check::new();
    let mut derived = 0;
    for k in [3u64, 4, 6] {
        for d in [Rational64::new(5, 2), Rational64::from_integer(3), Rational64::from_integer(4)] {
            for lambda in [1u64, 4, 16, 64] {
                let p = derive_crhf(k, d, lambda).map_err(err)?;
                derived += 1;
                c.require(p.out_len + 2 * lambda < p.ttilde, &format!("compression(k={k},D={d},lambda={lambda})"));
            }
        }
    }
    c.note("derived", derived);
    let p = CrhfParams::tiny();
    let key = crhf_gen(&p, HSampling::DistanceChecked { max_attempts: 20_000 }, &mut seed.rng(), true)
        .map_err(err)?;
    let census = collision_census(&key).map_err(err)?;
    c.note("inputs", census.inputs);
    c.note("pairs", census.pairs);
    c.note("kernel_of_m", census.kernel_of_m);
    c.note("mask_only", census.mask_only);
    c.require(census.pairs > 0, "collisions-exist");
    c.require(census.mask_only == 0, "dichotomy");
    Ok(c)
}

/// Random `rows × (w + extra)` matrix whose first `w` columns sum to zero
/// exactly when `in_kernel`.
pub(crate) fn planted_test<R: Rng + ?Sized>(w: usize, in_kernel: bool, rng: &mut R) -> (BitMatrix, BitVec) {
    let rows = 12;
    let mut cols: Vec<BitVec> = (1..w).map(|_| BitVec::random(rows, rng)).collect();
    let mut last = cols.iter().fold(BitVec::zeros(rows), |acc, c| &acc ^ c);
    if !in_kernel {
        last.flip(rng.gen_range(0..rows));
    }
    cols.push(last);
    cols.extend((0..4).map(|_| BitVec::random(rows, rng)));
    let v = BitVec::from_indices(cols.len(), 0..w);
    (BitMatrix::from_columns(rows, &cols).expect("equal heights"), v)
}

fn bias_oracle(seed: &Seed) -> Result<Check, String> {
    let mut c = Check::new();
    let mut rng = seed.derive("configs").rng();
    let mut worst = 0.0f64;
    for i in 0..20 {
        let w = rng.gen_range(1..=10);
        let eps = rng.gen_range(0.01..0.25);
        let (a, v) = planted_test(w, true, &mut rng);
        let r = bias_of(&a, &v, eps, 100_000, &seed.derive(&format!("config-{i}"))).map_err(err)?;
        worst = worst.max(r.sigmas());
        c.require(r.in_kernel && r.sigmas() < 4.0, &format!("config-{i}(w={w},eps={eps:.4})"));
    }
    c.note("configs", 20);
    c.note("worst_sigmas", format!("{worst:.2}"));
    let (a, v) = planted_test(4, false, &mut rng);
    let gate = bias_of(&a, &v, 0.05, 100_000, &seed.derive("gate")).map_err(err)?;
    c.note("gate_bias", format!("{:.5}", gate.empirical_bias));
    c.require(!gate.in_kernel && gate.analytic_bias == 0.0 && gate.sigmas() < 4.0, "kernel-gate");
    Ok(c)
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

fn sparse_lpn_attack(seed: &Seed) -> Result<Check, String> {
    let mut c = Check::new();
    let s = attack_setup();
    let delta = (s.t_size as f64).ln() / (s.n as f64).ln();
    let threshold = (s.n as f64).powf(1.0 + 2.0 * (1.0 - delta));
    c.note("m_over_threshold", format!("{:.3}", s.m as f64 / threshold));
    c.require(s.eps == 1.0 / (8.0 * s.t_size as f64), "eps=1/(8t)");
    let found = par_trials(seed, "dependencies", 200, |_, rng| {
        let Ok(m) = uniform_sparse(s.n, s.m, s.k, rng) else {
            return false;
        };
        match sparse_attack(&m, None, s.t_size, s.max_subsets, rng) {
            Ok(r) => r
                .dependency
                .is_some_and(|v| !v.is_zero() && m.mul_vec(&v).is_ok_and(|mv| mv.is_zero())),
            Err(_) => false,
        }
    });
    let hits = found.iter().filter(|&&f| f).count();
    c.note("verified", format!("{hits}/200"));
    c.require(hits >= 180, "dependency-rate");
    let est = distinguish(&s, Strategy::SparseAttackPipeline, 200, &seed.derive("advantage")).map_err(err)?;
    c.note("advantage", format!("{:.4}", est.advantage));
    c.note("stderr", format!("{:.4}", est.stderr));
    c.note("predicted", format!("{:.4}", est.predicted));
    c.require(est.sigmas_from(est.predicted) < 4.0, "advantage");
    Ok(c)
}

fn sorted_rows(a: &BitMatrix) -> Vec<BitVec> {
    let mut rows = a.row_vecs().to_vec();
    rows.sort();
    rows
}

fn unmasking(seed: &Seed) -> Result<Check, String> {
    let mut c = Check::new();
    let (n, m, k) = (32, 512, 3);
    let square = par_trials(seed, "square", 50, |_, rng| {
        let Ok(sparse) = uniform_sparse(n, m, k, rng) else {
            return false;
        };
        let t = loop {
            let t = BitMatrix::random(n, n, rng);
            if t.rank() == n {
                break t;
            }
        };
        let Ok(a) = sparse.left_mul(&t) else {
            return false;
        };
        match unmask_square_t(&a, n, k, 500, rng) {
            Ok(UnmaskOutcome::Recovered { za, .. }) => sorted_rows(&za) == sorted_rows(&sparse.densify()),
            _ => false,
        }
    });
    let recovered = square.iter().filter(|&&r| r).count();
    c.note("square_recovered", format!("{recovered}/50"));
    c.require(recovered >= 40, "square-rate");
    let compressing = par_trials(seed, "compressing", 50, |_, rng| {
        let Ok(sparse) = uniform_sparse(n, m, k, rng) else {
            return false;
        };
        let Ok(a) = sparse.left_mul(&BitMatrix::random(n / 2, n, rng)) else {
            return false;
        };
        matches!(unmask_square_t(&a, n, k, 50, rng), Ok(UnmaskOutcome::Failure { .. }))
    });
    let failed = compressing.iter().filter(|&&f| f).count();
    c.note("compressing_failures", format!("{failed}/50"));
    c.require(failed == 50, "compressing-failure");
    Ok(c)
}

fn dense_sparse_null(seed: &Seed) -> Result<Check, String> {
    let mut c = Check::new();
    let s = DistinguisherSetup {
        columns: ColumnSampler::Distinct,
        draws: 1,
        ..attack_setup()
    };
    let est = distinguish_dense_sparse(&s, 0.5, Strategy::SparseAttackPipeline, 10_000, seed).map_err(err)?;
    c.note("trials", est.draws);
    c.note("advantage", format!("{:.4}", est.advantage));
    c.note("stderr", format!("{:.4}", est.stderr));
    c.note("sigmas", format!("{:.2}", sigmas(est.advantage, 0.0, est.stderr)));
    c.require(est.sigmas_from(0.0) < 4.0, "null");
    Ok(c)
}

fn ltdf_invariants(p: &LtdfParams) -> Result<(), String> {
    p.verify().map_err(err)?;
    let f = |r: Rational64| *r.numer() as f64 / *r.denom() as f64;
    let one = Rational64::from_integer(1);
    let a = f(p.alpha);
    let checks = [
        (one / p.d + one / p.d_prime == one / p.big_gamma, "1/D+1/D'=1/Gamma"),
        (a * a / (a + 1.0) > f(p.rho_c) / p.gamma, "alpha"),
        (p.ell == (p.l * *p.rho_c.denom() as u64).div_ceil(*p.rho_c.numer() as u64), "ell"),
        ((p.eps - p.gamma / ((a + 1.0) * p.t as f64)).abs() < 1e-15, "eps"),
        (p.m == p.t << p.s && p.l == p.t * p.s, "shape"),
        (p.gamma <= p.delta_c, "gamma<=delta_C"),
    ];
    match checks.iter().find(|(ok, _)| !ok) {
        Some((_, what)) => Err(what.to_string()),
        None => Ok(()),
    }
}

fn parameter_consistency(_: &Seed) -> Result<Check, String> {
    let mut c = Check::new();
    let (mut ltdf_ok, mut ltdf_infeasible) = (0, 0);
    for k in [3u64, 4, 6] {
        for gamma in [Rational64::new(3, 2), Rational64::from_integer(2), Rational64::from_integer(3)] {
            for d in [None, Some(gamma + 2)] {
                for n in [1u64 << 10, 1 << 12, 1 << 14] {
                    let inp = LtdfInputs {
                        k,
                        big_gamma: gamma,
                        d,
                        code: CodeSpec::concatenated(),
                        sizing: LtdfSizing::Asymptotic { n },
                        good_d: 3,
                    };
                    match derive_ltdf(&inp) {
                        Ok(p) => {
                            ltdf_ok += 1;
                            if let Err(what) = ltdf_invariants(&p) {
                                c.require(false, &format!("ltdf(k={k},Gamma={gamma},n={n}):{what}"));
                            }
                            let mm = min_m(p.n, k, p.d, p.delta).map_err(err)?;
                            c.require(p.delta > min_delta(k, p.d) && BigUint::from(p.m) >= mm, "ltdf-sizing");
                        }
                        Err(_) => ltdf_infeasible += 1,
                    }
                }
            }
        }
    }
    for preset in [LtdfParams::desk(), LtdfParams::tiny_lossy(), LtdfParams::tiny_exhaustive()] {
        if let Err(what) = ltdf_invariants(&preset) {
            c.require(false, &format!("preset:{what}"));
        }
    }
    c.note("ltdf_derived", ltdf_ok);
    c.note("ltdf_infeasible", ltdf_infeasible);
    c.require(ltdf_ok > 0, "ltdf-nonempty");
    let mut crhf_ok = 0;
    for k in [3u64, 4, 6] {
        for d in [Rational64::new(5, 2), Rational64::from_integer(3), Rational64::from_integer(4)] {
            for lambda in [1u64, 4, 16, 64] {
                let p = derive_crhf(k, d, lambda).map_err(err)?;
                crhf_ok += 1;
                c.require(p.verify().is_ok(), &format!("crhf(k={k},D={d},lambda={lambda})"));
                c.require(p.delta > min_delta(k, d), "crhf-delta");
            }
        }
    }
    c.note("crhf_derived", crhf_ok);
    let worked = Rational64::new(10, 11);
    c.require(min_delta(6, Rational64::from_integer(2)) < worked, "worked-delta");
    for n in [64u64, 4096, 1 << 20] {
        let mm = min_m(n, 6, Rational64::from_integer(2), worked).map_err(err)?;
        c.require(mm == BigUint::from(n) * n, &format!("m=n^2(n={n})"));
    }
    Ok(c)
}

fn for_each_pattern(len: usize, max_w: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(len: usize, start: usize, left: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        f(cur);
        if left == 0 {
            return;
        }
        for i in start..len {
            cur.push(i);
            rec(len, i + 1, left - 1, cur, f);
            cur.pop();
        }
    }
    rec(len, 0, max_w, &mut Vec::new(), f);
}

fn ecc_contract(seed: &Seed) -> Result<Check, String> {
    let mut c = Check::new();
    let small = ConcatenatedCode::with_shape(3, 4, 2, 6, 24, InnerCode::search(3)).map_err(err)?;
    let (len, t) = (small.block_len(), small.t_err());
    c.require(len <= 24 && t >= 1, "small-shape");
    let mut rng = seed.derive("small").rng();
    let mut msgs = vec![BitVec::zeros(small.dim())];
    msgs.extend((0..7).map(|_| BitVec::random(small.dim(), &mut rng)));
    let words: Vec<BitVec> = msgs.iter().map(|x| small.encode(x)).collect::<Result<_, _>>().map_err(err)?;
    let (mut patterns, mut wrong) = (0u64, 0u64);
    for_each_pattern(len, t, &mut |err_pos| {
        patterns += 1;
        let e = BitVec::from_indices(len, err_pos.iter().copied());
        for (x, y) in msgs.iter().zip(&words) {
            if small.decode(&(y ^ &e)).ok().as_ref() != Some(x) {
                wrong += 1;
            }
        }
    });
    c.note("block24_t_err", t);
    c.note("block24_patterns", patterns);
    c.require(wrong == 0, "exhaustive");

    let code = CodeRegistry::new().concatenated(LtdfParams::desk().l as usize).map_err(err)?;
    let (len, t) = (code.block_len(), code.t_err());
    let bad = par_trials(&seed.derive("production"), "patterns", 10_000, |_, rng| {
        let x = BitVec::random(code.dim(), rng);
        let e = BitVec::from_indices(len, k_subset(len, t, rng).into_iter().map(|i| i as usize));
        match code.encode(&x) {
            Ok(y) => code.decode(&(&y ^ &e)).ok() != Some(x),
            Err(_) => true,
        }
    });
    let wrong = bad.iter().filter(|&&b| b).count();
    c.note("production_block_len", len);
    c.note("production_t_err", t);
    c.note("production_wrong", wrong);
    c.require(wrong == 0, "production");
    Ok(c)
}
