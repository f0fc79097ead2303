use std::fs;

use dslpn::crhf::{collision_census, crhf_gen, crhf_hash, CrhfKey, HSampling};
use dslpn::cryptanalysis::{
    bias_of, distinguish, distinguish_dense_sparse, dual_distance_sparse, unmask_square_t,
    ColumnSampler, DistinguisherSetup, Strategy, UnmaskOutcome,
};
use dslpn::ecc::CodeRegistry;
use dslpn::gf2::io::Object;
use dslpn::gf2::{BitMatrix, BitVec};
use dslpn::ltdf::{abo_eval, abo_gen, abo_invert, lossiness_measure, FunctionKey, Trapdoor};
use dslpn::params::{
    check_compression, derive_crhf, derive_ltdf, fmt_ratio, parse_ratio, ratio_to_f64, CodeSpec, CompressionRegime,
    CrhfParams, LtdfInputs, LtdfParams, LtdfSizing,
};
use dslpn::sampling::{dense_sparse_matrix, distinct_sparse, good_sparse, par_trials, uniform_sparse, GoodDistSpec, Seed};
use num_rational::Rational64;

use crate::config::Config;
use crate::report::{Report, Table};
use crate::{cells, input, selftest, AttackOp, BiasOp, CliError, Command, CrhfOp, LtdfOp, ParamsOp, SampleOp};

type Verdict = Result<(), CliError>;

pub(crate) fn dispatch(cmd: &Command, cfg: &mut Config) -> Result<(Report, Verdict), CliError> {
    let seed = seed(cfg)?;
    match cmd {
        Command::Params { op } => params(*op, cfg),
        Command::Sample { op } => sample(*op, cfg, &seed).map(ok),
        Command::Crhf { op } => crhf(*op, cfg, &seed).map(ok),
        Command::Ltdf { op } => ltdf(*op, cfg, &seed).map(ok),
        Command::Attack { op } => attack(*op, cfg, &seed).map(ok),
        Command::Bias { op: BiasOp::Estimate } => bias(cfg, &seed).map(ok),
        Command::Dualdist => dualdist(cfg, &seed).map(ok),
        Command::Selftest => Ok(run_selftest(&seed)),
    }
}

fn ok(r: Report) -> (Report, Verdict) {
    (r, Ok(()))
}

fn seed(cfg: &mut Config) -> Result<Seed, CliError> {
    let raw = cfg.get("seed").trim().trim_start_matches("0x").to_ascii_lowercase();
    let seed = Seed::from_hex(&raw).map_err(CliError::Input)?;
    cfg.set("seed", &raw)?;
    Ok(seed)
}

fn ratio(cfg: &mut Config, key: &str, default: &str) -> Result<Rational64, CliError> {
    let raw = cfg.resolve(key, default);
    parse_ratio(&raw).map_err(|e| CliError::Input(format!("`{key}`: {e}")))
}

fn float(cfg: &mut Config, key: &str, default: &str) -> Result<f64, CliError> {
    Ok(ratio_to_f64(ratio(cfg, key, default)?))
}

fn list(cfg: &mut Config, key: &str, default: &str) -> Result<Vec<u64>, CliError> {
    let raw = cfg.resolve(key, default);
    raw.split(',')
        .map(|v| {
            v.trim()
                .parse()
                .map_err(|_| CliError::Input(format!("`{key}` must be a comma-separated list of integers, got `{raw}`")))
        })
        .collect()
}

/// A bit string of length `len`, or a random one for `random`/`auto`.
fn bits(cfg: &mut Config, key: &str, len: usize, seed: &Seed) -> Result<BitVec, CliError> {
    let raw = cfg.resolve(key, "random");
    if raw == "random" {
        return Ok(BitVec::random(len, &mut seed.derive(key).rng()));
    }
    if raw.len() != len || !raw.chars().all(|c| c == '0' || c == '1') {
        return Err(CliError::Input(format!("`{key}` must be `random` or {len} binary digits")));
    }
    Ok(BitVec::from_bit_str(&raw))
}

fn required_bits(cfg: &Config, key: &str, len: usize) -> Result<BitVec, CliError> {
    let raw = cfg
        .path(key)
        .ok_or_else(|| CliError::Input(format!("`--{}` is required", key.replace('_', "-"))))?;
    if raw.len() != len || !raw.chars().all(|c| c == '0' || c == '1') {
        return Err(CliError::Input(format!("`{key}` must be {len} binary digits")));
    }
    Ok(BitVec::from_bit_str(raw))
}

fn read_hex(cfg: &Config, key: &str) -> Result<Vec<u8>, CliError> {
    let path = cfg
        .path(key)
        .ok_or_else(|| CliError::Input(format!("`--{}` is required", key.replace('_', "-"))))?;
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {path}: {e}")))?;
    hex::decode(text.trim()).map_err(|e| CliError::Input(format!("{path} is not hex: {e}")))
}

/// Writes `bytes` as hex to the file under `key`, or into the report.
fn write_hex(cfg: &Config, key: &str, name: &str, bytes: &[u8], report: &mut Report) -> Result<(), CliError> {
    report.put(&format!("{name}_bytes"), bytes.len());
    match cfg.path(key) {
        Some(path) => {
            fs::write(path, hex::encode(bytes) + "\n").map_err(|e| CliError::Input(format!("cannot write {path}: {e}")))
        }
        None => {
            report.put(&format!("{name}_hex"), hex::encode(bytes));
            Ok(())
        }
    }
}

fn object_hex(obj: Object) -> Result<String, CliError> {
    Ok(hex::encode(obj.to_bytes().map_err(input)?))
}

fn params(op: ParamsOp, cfg: &mut Config) -> Result<(Report, Verdict), CliError> {
    match op {
        ParamsOp::Derive => match cfg.resolve("scheme", "ltdf").as_str() {
            "ltdf" => derive_ltdf_table(cfg),
            "crhf" => derive_crhf_table(cfg),
            other => Err(CliError::Input(format!("unknown scheme `{other}` (expected ltdf or crhf)"))),
        },
        ParamsOp::Show => {
            let mut r = Report::new("params show");
            let (kv, verified) = match cfg.resolve("scheme", "ltdf").as_str() {
                "ltdf" => {
                    let p = ltdf_preset(cfg, "desk")?;
                    (p.to_kv(), p.verify())
                }
                "crhf" => {
                    let p = crhf_params(cfg)?;
                    (p.to_kv(), p.verify())
                }
                other => return Err(CliError::Input(format!("unknown scheme `{other}`"))),
            };
            for (k, v) in kv {
                r.put(&k, v);
            }
            r.put("verified", verified.is_ok());
            let verdict = verified.map_err(|e| CliError::Failed(e.to_string()));
            Ok((r, verdict))
        }
        ParamsOp::Compression => {
            let k = cfg.parse("k", 6u64)?;
            let d = ratio(cfg, "d", "2")?;
            let n = cfg.parse("n", 4096u64)?;
            let m = cfg.parse("m", n * n)?;
            let t = cfg.parse("t", n / 2)?;
            let c = check_compression(&CompressionRegime::new(k, d, n, m, t));
            let mut r = Report::new("params compression");
            r.put("pass", c.pass);
            let failures: Vec<String> = c.failures.iter().map(|f| f.to_string()).collect();
            r.put("failures", if failures.is_empty() { "none".into() } else { failures.join(";") });
            r.put("lhs_log2", format!("{:.6}", c.lhs_log2));
            r.put("rhs_log2", format!("{:.6}", c.rhs_log2));
            r.put("margin_log2", format!("{:.6}", c.margin_log2));
            r.put("delta_above_min", c.delta_above_min);
            r.put("m_above_min", c.m_above_min);
            r.put("exact", c.exact.map_or("unknown".to_string(), |e| e.to_string()));
            Ok(ok(r))
        }
    }
}

fn derive_ltdf_table(cfg: &mut Config) -> Result<(Report, Verdict), CliError> {
    let k = cfg.parse("k", 6u64)?;
    let gamma = ratio(cfg, "gamma", "3/2")?;
    let d = ratio(cfg, "d", &fmt_ratio(gamma + 1))?;
    let good_d = cfg.parse("good_d", 3usize)?;
    let explicit = !cfg.is_auto("t") || !cfg.is_auto("s");
    let sizings: Vec<LtdfSizing> = if explicit {
        let n = cfg.parse("n", 64u64)?;
        let t = cfg.parse("t", 32u64)?;
        let s = cfg.parse("s", 7u64)?;
        vec![LtdfSizing::Explicit { n, t, s }]
    } else {
        list(cfg, "n", "1024,4096,16384")?
            .into_iter()
            .map(|n| LtdfSizing::Asymptotic { n })
            .collect()
    };
    let mut r = Report::new("params derive");
    let mut table = Table::new(
        "ltdf",
        &["n", "m", "t", "s", "L", "ell", "delta", "D", "D_prime", "gamma", "alpha", "eps", "regime", "verified"],
    );
    let mut verdict = Ok(());
    let mut infeasible = Vec::new();
    for sizing in sizings {
        let inp = LtdfInputs {
            k,
            big_gamma: gamma,
            d: Some(d),
            code: CodeSpec::concatenated(),
            sizing,
            good_d,
        };
        let p = match derive_ltdf(&inp) {
            Ok(p) => p,
            Err(e) => {
                infeasible.push(format!("{sizing:?}: {e}"));
                continue;
            }
        };
        let verified = p.verify();
        if let Err(e) = &verified {
            verdict = Err(CliError::Failed(e.to_string()));
        }
        table.row(cells![
            p.n,
            p.m,
            p.t,
            p.s,
            p.l,
            p.ell,
            fmt_ratio(p.delta),
            fmt_ratio(p.d),
            fmt_ratio(p.d_prime),
            p.gamma,
            fmt_ratio(p.alpha),
            p.eps,
            p.regime.pass,
            verified.is_ok()
        ]);
    }
    if table.is_empty() {
        return Err(CliError::Input(format!("no feasible parameters: {}", infeasible.join("; "))));
    }
    r.put("infeasible", infeasible.len());
    r.table(table);
    Ok((r, verdict))
}

fn derive_crhf_table(cfg: &mut Config) -> Result<(Report, Verdict), CliError> {
    let k = cfg.parse("k", 3u64)?;
    let d = ratio(cfg, "d", "3")?;
    let mut r = Report::new("params derive");
    let mut table = Table::new(
        "crhf",
        &["lambda", "n", "m", "t", "s", "input", "output", "delta", "rho", "eps", "verified"],
    );
    let mut verdict = Ok(());
    for lambda in list(cfg, "lambda", "16,32,64,128")? {
        let p = derive_crhf(k, d, lambda).map_err(input)?;
        let verified = p.verify();
        if let Err(e) = &verified {
            verdict = Err(CliError::Failed(e.to_string()));
        }
        table.row(cells![
            lambda,
            p.n,
            p.m,
            p.t,
            p.s,
            p.ttilde,
            p.out_len,
            fmt_ratio(p.delta),
            fmt_ratio(p.rho),
            p.eps,
            verified.is_ok()
        ]);
    }
    r.table(table);
    Ok((r, verdict))
}

fn ltdf_preset(cfg: &mut Config, default: &str) -> Result<LtdfParams, CliError> {
    let name = cfg.resolve("preset", default);
    let p = LtdfParams::preset(&name).ok_or_else(|| {
        CliError::Input(format!("unknown preset `{name}` (expected desk, tiny-lossy or tiny-exhaustive)"))
    })?;
    if cfg.is_auto("eps") {
        cfg.resolve("eps", &p.eps.to_string());
        return Ok(p);
    }
    let eps = float(cfg, "eps", "0")?;
    if eps != 0.0 && eps != p.eps {
        return Err(CliError::Input("`eps` may only be overridden with 0 (noiseless)".into()));
    }
    Ok(p.with_eps(eps))
}

fn crhf_params(cfg: &mut Config) -> Result<CrhfParams, CliError> {
    match cfg.resolve("preset", "tiny").as_str() {
        "tiny" => Ok(CrhfParams::tiny()),
        "derived" => {
            let k = cfg.parse("k", 3u64)?;
            let d = ratio(cfg, "d", "3")?;
            let lambda = cfg.parse("lambda", 16u64)?;
            derive_crhf(k, d, lambda).map_err(input)
        }
        other => Err(CliError::Input(format!("unknown hash preset `{other}` (expected tiny or derived)"))),
    }
}

fn sample(op: SampleOp, cfg: &mut Config, seed: &Seed) -> Result<Report, CliError> {
    let n = cfg.parse("n", 64usize)?;
    let m = cfg.parse("m", 256usize)?;
    let k = cfg.parse("k", 3usize)?;
    let good_d = cfg.parse("good_d", 3usize)?;
    let mut rng = seed.derive("sample").rng();
    match op {
        SampleOp::Sparse => {
            let mat = match cfg.resolve("sampler", "uniform").as_str() {
                "uniform" => uniform_sparse(n, m, k, &mut rng),
                "distinct" => distinct_sparse(n, m, k, &mut rng),
                "good" => good_sparse(&GoodDistSpec::new(n, m, k, good_d), &mut rng),
                other => {
                    return Err(CliError::Input(format!(
                        "unknown sampler `{other}` (expected uniform, distinct or good)"
                    )))
                }
            }
            .map_err(input)?;
            let wmax = cfg.parse("wmax", 4usize)?;
            let mut r = Report::new("sample sparse");
            r.put("duplicate_pairs", mat.duplicate_pairs().len());
            r.put(
                "dual_distance",
                dual_distance_sparse(&mat, wmax)
                    .distance()
                    .map_or(format!(">{wmax}"), |d| d.to_string()),
            );
            r.put("matrix_hex", object_hex(Object::SparseMatrix(mat))?);
            Ok(r)
        }
        SampleOp::DenseSparse => {
            let alpha = float(cfg, "alpha", "1/2")?;
            let (a, t, mat) = dense_sparse_matrix(alpha, &GoodDistSpec::new(n, m, k, good_d), &mut rng).map_err(input)?;
            let mut r = Report::new("sample dense-sparse");
            r.put("rows", a.rows());
            r.put("rank", a.rank());
            r.put("matrix_hex", object_hex(Object::BitMatrix(a))?);
            if cfg.flag("debug")? {
                r.put("t_hex", object_hex(Object::BitMatrix(t))?);
                r.put("m_hex", object_hex(Object::SparseMatrix(mat))?);
            }
            Ok(r)
        }
    }
}

fn h_sampling(cfg: &mut Config, default: &str) -> Result<HSampling, CliError> {
    match cfg.resolve("sampler", default).as_str() {
        "uniform" => Ok(HSampling::Uniform),
        "factored" => Ok(HSampling::Factored),
        "checked" => Ok(HSampling::DistanceChecked {
            max_attempts: cfg.parse("max_tries", 20_000usize)?,
        }),
        other => Err(CliError::Input(format!(
            "unknown sampler `{other}` (expected uniform, factored or checked)"
        ))),
    }
}

fn load_crhf_key(cfg: &Config) -> Result<CrhfKey, CliError> {
    CrhfKey::from_bytes(&read_hex(cfg, "key")?).map_err(input)
}

fn crhf(op: CrhfOp, cfg: &mut Config, seed: &Seed) -> Result<Report, CliError> {
    match op {
        CrhfOp::Keygen => {
            let p = crhf_params(cfg)?;
            let how = h_sampling(cfg, "uniform")?;
            let key = crhf_gen(&p, how, &mut seed.derive("keygen").rng(), false).map_err(input)?;
            let mut r = Report::new("crhf keygen");
            r.put("input_len", p.ttilde);
            r.put("output_len", p.out_len);
            write_hex(cfg, "key_out", "key", &key.to_bytes().map_err(input)?, &mut r)?;
            Ok(r)
        }
        CrhfOp::Hash => {
            let key = load_crhf_key(cfg)?;
            let x = bits(cfg, "input", key.params().ttilde as usize, seed)?;
            let h = crhf_hash(&key, &x).map_err(input)?;
            let mut r = Report::new("crhf hash");
            r.put("input", &x);
            r.put("hash", h);
            Ok(r)
        }
        CrhfOp::Collide => {
            let p = crhf_params(cfg)?;
            let how = h_sampling(cfg, "checked")?;
            let key = crhf_gen(&p, how, &mut seed.derive("keygen").rng(), true).map_err(input)?;
            let census = collision_census(&key).map_err(input)?;
            let mut r = Report::new("crhf collide");
            r.put("inputs", census.inputs);
            r.put("image", census.image);
            r.put("pairs", census.pairs);
            r.put("kernel_of_m", census.kernel_of_m);
            r.put("mask_only", census.mask_only);
            Ok(r)
        }
    }
}

fn load_function_key(cfg: &Config) -> Result<FunctionKey, CliError> {
    FunctionKey::from_bytes(&read_hex(cfg, "key")?, &mut CodeRegistry::new()).map_err(input)
}

fn ltdf(op: LtdfOp, cfg: &mut Config, seed: &Seed) -> Result<Report, CliError> {
    match op {
        LtdfOp::Keygen => {
            let p = ltdf_preset(cfg, "desk")?;
            let l = p.l as usize;
            let tau_star = bits(cfg, "branch", l, seed)?;
            let code = CodeRegistry::new().concatenated(l).map_err(input)?;
            let kp = abo_gen(&p, &tau_star, code, &mut seed.derive("keygen").rng(), false).map_err(input)?;
            let mut r = Report::new("ltdf keygen");
            r.put("input_len", kp.fk.input_len());
            r.put("output_len", kp.fk.output_len());
            r.put("lossy_branch", &tau_star);
            write_hex(cfg, "key_out", "key", &kp.fk.to_bytes().map_err(input)?, &mut r)?;
            write_hex(cfg, "trapdoor_out", "trapdoor", &kp.td.to_bytes().map_err(input)?, &mut r)?;
            Ok(r)
        }
        LtdfOp::Eval => {
            let fk = load_function_key(cfg)?;
            let l = fk.input_len();
            let tau = bits(cfg, "branch", l, seed)?;
            let x = bits(cfg, "input", l, seed)?;
            let y = abo_eval(&fk, &tau, &x).map_err(input)?;
            let mut r = Report::new("ltdf eval");
            r.put("branch", &tau);
            r.put("input", &x);
            r.put("output", y);
            Ok(r)
        }
        LtdfOp::Invert => {
            let fk = load_function_key(cfg)?;
            let td = Trapdoor::from_bytes(&read_hex(cfg, "trapdoor")?).map_err(input)?;
            let tau = required_bits(cfg, "branch", fk.input_len())?;
            let y = required_bits(cfg, "output", fk.output_len())?;
            let x = abo_invert(&td, &fk, &tau, &y).map_err(input)?;
            let mut r = Report::new("ltdf invert");
            r.put("input", x);
            Ok(r)
        }
        LtdfOp::Lossiness => {
            let p = ltdf_preset(cfg, "tiny-lossy")?;
            let l = p.l as usize;
            let tau_star = bits(cfg, "branch", l, seed)?;
            let code = CodeRegistry::new().concatenated(l).map_err(input)?;
            let kp = abo_gen(&p, &tau_star, code, &mut seed.derive("keygen").rng(), false).map_err(input)?;
            let lo = lossiness_measure(&kp.fk, &kp.td).map_err(input)?;
            let mut r = Report::new("ltdf lossiness");
            r.put("regime_pass", p.regime.pass);
            r.put("domain", lo.domain);
            r.put("injective_branch", &lo.injective_branch);
            r.put("injective_image", lo.injective_image);
            r.put("lossy_image", lo.lossy_image);
            r.put("distinct_y1", lo.distinct_y1);
            r.put("max_noise", lo.max_noise);
            r.put("bound", lo.bound);
            r.put("lossy_ratio", format!("{:.6}", lo.ratio()));
            Ok(r)
        }
    }
}

fn attack(op: AttackOp, cfg: &mut Config, seed: &Seed) -> Result<Report, CliError> {
    match op {
        AttackOp::SparseLpn => {
            let t_size = cfg.parse("t_size", 16usize)?;
            let setup = DistinguisherSetup {
                n: cfg.parse("n", 64usize)?,
                m: cfg.parse("m", 2048usize)?,
                k: cfg.parse("k", 3usize)?,
                alpha: None,
                eps: float(cfg, "eps", &format!("1/{}", 8 * t_size))?,
                t_size,
                max_subsets: cfg.parse("max_subsets", 50usize)?,
                columns: match cfg.resolve("sampler", "uniform").as_str() {
                    "uniform" => ColumnSampler::Uniform,
                    "distinct" => ColumnSampler::Distinct,
                    other => return Err(CliError::Input(format!("unknown sampler `{other}` (expected uniform or distinct)"))),
                },
                draws: cfg.parse("draws", 50usize)?,
            };
            let strategy = match cfg.resolve("strategy", "pipeline").as_str() {
                "pipeline" => Strategy::SparseAttackPipeline,
                "kernel" => Strategy::BestKernelVector,
                other => return Err(CliError::Input(format!("unknown strategy `{other}` (expected pipeline or kernel)"))),
            };
            let matrices = cfg.parse("trials", 200usize)?;
            let est = if cfg.is_auto("alpha") {
                cfg.resolve("alpha", "none");
                distinguish(&setup, strategy, matrices, seed)
            } else {
                let alpha = float(cfg, "alpha", "1/2")?;
                distinguish_dense_sparse(&setup, alpha, strategy, matrices, seed)
            }
            .map_err(input)?;
            let mut r = Report::new("attack sparse-lpn");
            r.put("matrices", est.matrices);
            r.put("draws", est.draws);
            r.put("found", est.found);
            r.put("advantage", format!("{:.6}", est.advantage));
            r.put("stderr", format!("{:.6}", est.stderr));
            r.put("predicted", format!("{:.6}", est.predicted));
            r.put("sigmas_from_predicted", format!("{:.3}", est.sigmas_from(est.predicted)));
            r.put("sigmas_from_zero", format!("{:.3}", est.sigmas_from(0.0)));
            r.put("expected_t_size", format!("{:.3}", setup.m as f64 * binom_ratio(t_size, setup.n, setup.k)));
            Ok(r)
        }
        AttackOp::UnmaskSquare => {
            let n = cfg.parse("n", 32usize)?;
            let m = cfg.parse("m", 512usize)?;
            let k = cfg.parse("k", 3usize)?;
            let alpha = float(cfg, "alpha", "1")?;
            let trials = cfg.parse("trials", 50usize)?;
            let max_tries = cfg.parse("max_tries", 500usize)?;
            let rows = alpha * n as f64;
            if !(rows >= 1.0 && rows <= n as f64 && rows.fract() == 0.0) {
                return Err(CliError::Input(format!("alpha*n must be an integer in 1..=n, got {rows}")));
            }
            let rows = rows as usize;
            let outcomes = par_trials(seed, "unmask", trials, |_, rng| {
                let sparse = uniform_sparse(n, m, k, rng).map_err(input)?;
                let t = loop {
                    let t = BitMatrix::random(rows, n, rng);
                    if rows < n || t.rank() == n {
                        break t;
                    }
                };
                let a = sparse.left_mul(&t).map_err(input)?;
                let out = unmask_square_t(&a, n, k, max_tries, rng).map_err(input)?;
                let matches = match &out {
                    UnmaskOutcome::Recovered { za, .. } => sorted_rows(za) == sorted_rows(&sparse.densify()),
                    UnmaskOutcome::Failure { .. } => false,
                };
                Ok::<_, CliError>((out, matches))
            })
            .into_iter()
            .collect::<Result<Vec<_>, _>>()?;
            let mut table = Table::new("trials", &["trial", "outcome", "tries", "matches_m"]);
            for (i, (out, matches)) in outcomes.iter().enumerate() {
                let (name, tries) = match out {
                    UnmaskOutcome::Recovered { tries, .. } => ("recovered", tries),
                    UnmaskOutcome::Failure { tries, .. } => ("failure", tries),
                };
                table.row(cells![i, name, tries, matches]);
            }
            let mut r = Report::new("attack unmask-square");
            r.put("rows", rows);
            r.put("recovered", outcomes.iter().filter(|(_, m)| *m).count());
            r.put("trials", trials);
            r.table(table);
            Ok(r)
        }
    }
}

/// `C(a, k) / C(b, k)`.
fn binom_ratio(a: usize, b: usize, k: usize) -> f64 {
    (0..k).map(|i| a.saturating_sub(i) as f64 / (b - i) as f64).product()
}

fn sorted_rows(a: &BitMatrix) -> Vec<BitVec> {
    let mut rows = a.row_vecs().to_vec();
    rows.sort();
    rows
}

fn bias(cfg: &mut Config, seed: &Seed) -> Result<Report, CliError> {
    let w = cfg.parse("w", 4usize)?;
    let eps = float(cfg, "eps", "0.05")?;
    let trials = cfg.parse("trials", 100_000usize)?;
    let in_kernel = cfg.flag("kernel")?;
    if w == 0 {
        return Err(CliError::Input("`w` must be at least 1".into()));
    }
    let (a, v) = selftest::planted_test(w, in_kernel, &mut seed.derive("matrix").rng());
    let res = bias_of(&a, &v, eps, trials, seed).map_err(input)?;
    let mut r = Report::new("bias estimate");
    r.put("in_kernel", res.in_kernel);
    r.put("analytic_bias", res.analytic_bias);
    r.put("empirical_bias", format!("{:.6}", res.empirical_bias));
    r.put("stderr", format!("{:.6}", res.stderr));
    r.put("sigmas", format!("{:.3}", res.sigmas()));
    Ok(r)
}

fn dualdist(cfg: &mut Config, seed: &Seed) -> Result<Report, CliError> {
    let n = cfg.parse("n", 32usize)?;
    let m = cfg.parse("m", 64usize)?;
    let k = cfg.parse("k", 3usize)?;
    let wmax = cfg.parse("wmax", 6usize)?;
    let trials = cfg.parse("trials", 100usize)?;
    let found = par_trials(seed, "dualdist", trials, |_, rng| {
        uniform_sparse(n, m, k, rng)
            .map(|mat| dual_distance_sparse(&mat, wmax).distance())
            .map_err(input)
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new("histogram", &["distance", "count"]);
    for d in 1..=wmax {
        table.row(cells![d, found.iter().filter(|&&f| f == Some(d)).count()]);
    }
    table.row(cells![format!(">{wmax}"), found.iter().filter(|f| f.is_none()).count()]);
    let pairs = (m * m.saturating_sub(1) / 2) as f64;
    let mut r = Report::new("dualdist");
    r.put("trials", trials);
    r.put("birthday_floor", format!("{:.6}", 1.0 - (-pairs * binom_ratio(k, n, k)).exp()));
    r.table(table);
    Ok(r)
}

fn run_selftest(seed: &Seed) -> (Report, Verdict) {
    let outcomes = selftest::run_all(seed, |o| {
        eprintln!(
            "[{}] #{} {} ({:.2} s) {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.id,
            o.name,
            o.elapsed.as_secs_f64(),
            o.detail
        );
    });
    let passed = outcomes.iter().filter(|o| o.pass).count();
    let mut table = Table::new("criteria", &["id", "name", "pass", "detail"]);
    for o in &outcomes {
        table.row(cells![o.id, o.name, o.pass, format!("\"{}\"", o.detail)]);
    }
    let mut r = Report::new("selftest");
    r.put("passed", format!("{passed}/{}", outcomes.len()));
    r.table(table);
    let verdict = if passed == outcomes.len() {
        Ok(())
    } else {
        Err(CliError::Failed(format!("{} of {} criteria failed", outcomes.len() - passed, outcomes.len())))
    };
    (r, verdict)
}
