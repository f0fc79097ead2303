//! Command-line driver for the workbench.
//!
//! Every subcommand reads a flat [`config::Config`], runs, and writes a
//! [`report::Report`] that embeds the resolved configuration.

pub mod config;
pub mod report;
pub mod selftest;

mod commands;

use std::ffi::OsString;
use std::fmt::Display;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use config::Config;

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, configuration or inputs. Exit code 1.
    Input(String),
    /// A check or acceptance criterion did not hold. Exit code 2.
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Failed(_) => 2,
        }
    }
}

impl Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "invalid input: {m}"),
            CliError::Failed(m) => write!(f, "check failed: {m}"),
        }
    }
}

pub(crate) fn input(e: impl Display) -> CliError {
    CliError::Input(e.to_string())
}

macro_rules! knobs {
    ($($field:ident => $help:literal),* $(,)?) => {
        /// Config keys settable from the command line.
        #[derive(Args, Debug, Default)]
        struct Knobs {
            $(
                #[arg(long, global = true, value_name = "VALUE", help = $help)]
                $field: Option<String>,
            )*
        }

        impl Knobs {
            fn overrides(&self) -> Vec<(&'static str, &str)> {
                let mut v = Vec::new();
                $(
                    if let Some(x) = &self.$field {
                        v.push((stringify!($field), x.as_str()));
                    }
                )*
                v
            }
        }
    };
}

knobs! {
    seed => "Master seed, 1 to 64 hex digits (falls back to DSLPN_SEED)",
    out => "Report file (default: stdout)",
    trials => "Number of Monte-Carlo trials",
    workers => "Worker threads (default: available parallelism)",
    scheme => "ltdf or crhf",
    preset => "Named parameter preset",
    k => "Column sparsity",
    gamma => "Lossiness factor",
    d => "Compression factor",
    n => "Rows of the sparse matrix (comma-separated list for sweeps)",
    m => "Columns of the sparse matrix",
    t => "Input block count",
    s => "log2 of the block size",
    lambda => "Statistical security margin (comma-separated list for sweeps)",
    eps => "Noise rate",
    alpha => "Compression ratio of the dense mask",
    w => "Test-vector weight",
    wmax => "Largest dual distance searched",
    t_size => "Row subset size of the sparse attack",
    max_subsets => "Row subsets tried per matrix",
    draws => "Samples per matrix",
    max_tries => "Column subsets tried by the unmasking attack",
    good_d => "Dual distance required of sparse matrices",
    kernel => "Plant the test vector in the kernel (true/false)",
    sampler => "Column or mask sampler",
    strategy => "pipeline or kernel",
    key => "Key file (hex)",
    trapdoor => "Trapdoor file (hex)",
    key_out => "Where to write a generated key",
    trapdoor_out => "Where to write a generated trapdoor",
    branch => "Branch as a bit string, or `random`",
    input => "Input as a bit string, or `random`",
    output => "Function output as a bit string",
}

#[derive(Parser, Debug)]
#[command(name = "dslpn", version, about = "Dense-Sparse LPN workbench")]
struct Cli {
    #[command(flatten)]
    knobs: Knobs,
    /// Config file of key=value lines; command-line flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Any config key, e.g. `--set max_tries=100`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Keep secret intermediate values and include them in reports.
    #[arg(long, global = true)]
    debug: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Derive and check parameter sets.
    Params {
        #[command(subcommand)]
        op: ParamsOp,
    },
    /// Draw sparse and dense-sparse matrices.
    Sample {
        #[command(subcommand)]
        op: SampleOp,
    },
    /// The sparse-matrix hash.
    Crhf {
        #[command(subcommand)]
        op: CrhfOp,
    },
    /// The all-but-one lossy trapdoor function.
    Ltdf {
        #[command(subcommand)]
        op: LtdfOp,
    },
    /// Attacks on sparse and dense-sparse LPN.
    Attack {
        #[command(subcommand)]
        op: AttackOp,
    },
    /// Linear-test bias measurements.
    Bias {
        #[command(subcommand)]
        op: BiasOp,
    },
    /// Dual-distance histogram of random sparse matrices.
    Dualdist,
    /// Run the acceptance suite.
    Selftest,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum ParamsOp {
    /// Derive a table of parameter sets.
    Derive,
    /// Print a preset.
    Show,
    /// Evaluate the compression inequality for given (k, D, n, m, t).
    Compression,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum SampleOp {
    /// A k-sparse matrix (sampler: uniform, distinct or good).
    Sparse,
    /// A = T·M with T of alpha·n rows.
    DenseSparse,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum CrhfOp {
    Keygen,
    Hash,
    /// Exhaustive collision census on a fresh key.
    Collide,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum LtdfOp {
    Keygen,
    Eval,
    Invert,
    /// Exhaustive image counting on a fresh key.
    Lossiness,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum AttackOp {
    /// Distinguisher advantage of the sparse attack.
    SparseLpn,
    /// Unmasking of A = T·M.
    UnmaskSquare,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum BiasOp {
    Estimate,
}

fn build_config(cli: &Cli) -> Result<Config, CliError> {
    let mut cfg = Config::default();
    if let Ok(seed) = std::env::var("DSLPN_SEED") {
        cfg.set("seed", &seed)?;
    }
    if let Some(path) = &cli.config {
        cfg.apply_file(path)?;
    }
    for kv in &cli.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Input(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        cfg.set(k, v)?;
    }
    for (k, v) in cli.knobs.overrides() {
        cfg.set(k, v)?;
    }
    if cli.debug {
        cfg.set("debug", "true")?;
    }
    Ok(cfg)
}

fn workers(cfg: &Config) -> Result<usize, CliError> {
    match cfg.get("workers") {
        "auto" => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
        w => match w.parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::Input(format!("`workers` must be a positive integer, got `{w}`"))),
        },
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("dslpn: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let mut cfg = build_config(cli)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers(&cfg)?)
        .build()
        .map_err(input)?;
    let (report, verdict) = pool.install(|| commands::dispatch(&cli.command, &mut cfg))?;
    report.emit(&cfg)?;
    verdict
}
