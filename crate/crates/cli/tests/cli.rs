use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use dslpn::crhf::{crhf_hash, CrhfKey};
use dslpn::gf2::BitVec;
use dslpn::params::{derive_ltdf, parse_ratio, CodeSpec, LtdfInputs, LtdfSizing};

fn dslpn(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dslpn"))
        .args(args)
        .current_dir(dir)
        .env_remove("DSLPN_SEED")
        .output()
        .expect("run dslpn")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// A result value, or a config value when no result has that key.
fn scalar<'a>(report: &'a str, key: &str) -> &'a str {
    let find = |text: &'a str| {
        text.lines()
            .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
    };
    find(results(report))
        .or_else(|| find(report))
        .unwrap_or_else(|| panic!("no `{key}` in report:\n{report}"))
}

fn table<'a>(report: &'a str, name: &str) -> Vec<Vec<&'a str>> {
    report
        .split(&format!("[table {name}]\n"))
        .nth(1)
        .unwrap_or_else(|| panic!("no table {name}"))
        .lines()
        .take_while(|l| !l.is_empty())
        .map(|l| l.split(',').collect())
        .collect()
}

fn results(report: &str) -> &str {
    report.split("[results]").nth(1).unwrap()
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = dslpn(&["frobnicate"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage:"));
    assert_eq!(dslpn(&[], dir.path()).status.code(), Some(1));
    assert_eq!(dslpn(&["--help"], dir.path()).status.code(), Some(0));
    let o = dslpn(&["params", "derive", "--set", "bogus=1"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown config key `bogus`"));
    assert_eq!(dslpn(&["params", "derive", "--seed", "xyz"], dir.path()).status.code(), Some(1));
    assert_eq!(dslpn(&["params", "derive", "--scheme", "rsa"], dir.path()).status.code(), Some(1));
}

#[test]
fn derived_ltdf_rows_satisfy_invariants() {
    let dir = tempfile::tempdir().unwrap();
    let o = dslpn(&["params", "derive", "--scheme", "ltdf", "--k", "6", "--gamma", "1.5"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let report = stdout(&o);
    assert_eq!(scalar(&report, "registry_version"), "1");
    assert_eq!(scalar(&report, "gamma"), "1.5");
    let rows = table(&report, "ltdf");
    assert_eq!(rows[0][0], "n");
    assert!(rows.len() > 1);
    for row in &rows[1..] {
        let num = |i: usize| row[i].parse::<u64>().unwrap();
        let (n, m, t, s, l, ell) = (num(0), num(1), num(2), num(3), num(4), num(5));
        assert_eq!(m, t << s);
        assert_eq!(l, t * s);
        assert_eq!(ell, 8 * l);
        let d = parse_ratio(row[7]).unwrap();
        let d_prime = parse_ratio(row[8]).unwrap();
        let gamma_big = parse_ratio("3/2").unwrap();
        assert_eq!(d.recip() + d_prime.recip(), gamma_big.recip());
        let p = derive_ltdf(&LtdfInputs {
            k: 6,
            big_gamma: gamma_big,
            d: Some(d),
            code: CodeSpec::concatenated(),
            sizing: LtdfSizing::Explicit { n, t, s },
            good_d: 3,
        })
        .unwrap();
        p.verify().unwrap();
        assert_eq!(row[9].parse::<f64>().unwrap(), p.gamma);
        assert_eq!(row[11].parse::<f64>().unwrap(), p.eps);
        assert_eq!(row[13], "true");
    }
}

#[test]
fn derived_crhf_rows_compress() {
    let dir = tempfile::tempdir().unwrap();
    let o = dslpn(&["params", "derive", "--scheme", "crhf", "--lambda", "8,32"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let report = stdout(&o);
    let rows = table(&report, "crhf");
    assert_eq!(rows.len(), 3);
    for row in &rows[1..] {
        let lambda: u64 = row[0].parse().unwrap();
        let (input, output): (u64, u64) = (row[5].parse().unwrap(), row[6].parse().unwrap());
        assert!(output + 2 * lambda < input);
    }
}

#[test]
fn config_file_env_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    fs::write(&cfg, "# bias run\nw = 3\ntrials=2000\nseed=abc\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let o = dslpn(&["bias", "estimate", "--config", cfg, "--trials", "1000"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let r = stdout(&o);
    assert_eq!(scalar(&r, "w"), "3");
    assert_eq!(scalar(&r, "trials"), "1000");
    assert_eq!(scalar(&r, "seed"), "abc");
    assert_eq!(scalar(&r, "in_kernel"), "true");
    fs::write(dir.path().join("bad.cfg"), "colour=blue\n").unwrap();
    assert_eq!(dslpn(&["bias", "estimate", "--config", "bad.cfg"], dir.path()).status.code(), Some(1));

    let env = Command::new(env!("CARGO_BIN_EXE_dslpn"))
        .args(["bias", "estimate", "--trials", "10"])
        .env("DSLPN_SEED", "0xBEEF")
        .output()
        .unwrap();
    assert_eq!(scalar(&stdout(&env), "seed"), "beef");
    let flag = Command::new(env!("CARGO_BIN_EXE_dslpn"))
        .args(["bias", "estimate", "--trials", "10", "--seed", "12"])
        .env("DSLPN_SEED", "BEEF")
        .output()
        .unwrap();
    assert_eq!(scalar(&stdout(&flag), "seed"), "12");
}

#[test]
fn reports_are_reproducible_and_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["attack", "sparse-lpn", "--trials", "20", "--draws", "10", "--seed", "7"];
    let run = |workers: &str, out: &str| {
        let mut a = args.to_vec();
        a.extend(["--workers", workers, "--out", out]);
        assert_eq!(dslpn(&a, dir.path()).status.code(), Some(0));
        fs::read_to_string(dir.path().join(out)).unwrap()
    };
    let one = run("1", "a.txt");
    let again = run("1", "a.txt");
    assert_eq!(one, again);
    let four = run("4", "a.txt");
    assert_eq!(results(&one), results(&four));
    assert_eq!(scalar(&one, "found"), "20");
}

#[test]
fn hash_key_round_trips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = dslpn(&["crhf", "keygen", "--seed", "5", "--key-out", "h.key"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let input = "1011001110001111";
    let o = dslpn(&["crhf", "hash", "--key", "h.key", "--input", input], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let hash = scalar(&stdout(&o), "hash").to_string();
    let key_hex = fs::read_to_string(dir.path().join("h.key")).unwrap();
    let key = CrhfKey::from_bytes(&hex::decode(key_hex.trim()).unwrap()).unwrap();
    assert_eq!(crhf_hash(&key, &BitVec::from_bit_str(input)).unwrap().to_string(), hash);
    let short = dslpn(&["crhf", "hash", "--key", "h.key", "--input", "101"], dir.path());
    assert_eq!(short.status.code(), Some(1));
}

#[test]
fn ltdf_eval_and_invert() {
    let dir = tempfile::tempdir().unwrap();
    let lossy = "000000000001";
    let o = dslpn(
        &[
            "ltdf", "keygen", "--preset", "tiny-exhaustive", "--branch", lossy, "--key-out", "f.key",
            "--trapdoor-out", "f.td",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let branch = "110100101100";
    let x = "011011100010";
    let o = dslpn(&["ltdf", "eval", "--key", "f.key", "--branch", branch, "--input", x], dir.path());
    let y = scalar(&stdout(&o), "output").to_string();
    let o = dslpn(
        &["ltdf", "invert", "--key", "f.key", "--trapdoor", "f.td", "--branch", branch, "--output", &y],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(scalar(&stdout(&o), "input"), x);
    let o = dslpn(
        &["ltdf", "invert", "--key", "f.key", "--trapdoor", "f.td", "--branch", lossy, "--output", &y],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("lossy"));
}

#[test]
fn small_subcommands_run() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["params", "show", "--preset", "tiny-lossy"][..],
        &["params", "show", "--scheme", "crhf"],
        &["params", "compression"],
        &["sample", "sparse", "--sampler", "good", "--n", "32", "--m", "40"],
        &["sample", "dense-sparse", "--debug"],
        &["crhf", "collide"],
        &["attack", "unmask-square", "--trials", "4"],
        &["dualdist", "--trials", "20"],
    ] {
        let o = dslpn(args, dir.path());
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let r = stdout(&dslpn(&["crhf", "collide"], dir.path()));
    assert_eq!(scalar(&r, "mask_only"), "0");
    let r = stdout(&dslpn(&["params", "compression"], dir.path()));
    assert_eq!(scalar(&r, "pass"), "true");
    let r = stdout(&dslpn(&["attack", "unmask-square", "--alpha", "1/2", "--trials", "3"], dir.path()));
    assert_eq!(scalar(&r, "recovered"), "0");
    let r = stdout(&dslpn(&["dualdist", "--trials", "20"], dir.path()));
    let hist = table(&r, "histogram");
    let total: usize = hist[1..].iter().map(|row| row[1].parse::<usize>().unwrap()).sum();
    assert_eq!(total, 20);
}
