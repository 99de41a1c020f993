//! `divfilt`: JSON and CSV reports over the divfilt library.
//!
//! Exit status: 0 on success, 1 when `--strict` is set and the report carries
//! audit flags, 2 for configuration errors, 3 when an input cannot be read
//! or parsed.

mod commands;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "divfilt", version, about = "Exact reports on divisorial filtration invariants")]
struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Exit with status 1 if the report carries audit flags.
    #[arg(long, global = true)]
    strict: bool,

    #[command(subcommand)]
    command: Command,
}

/// Chooses `alpha`. Without any of these the example value is used.
#[derive(Args, Debug, Clone, Default)]
struct AlphaArgs {
    /// `alpha = 9/26 + (1/26) sqrt 3`.
    #[arg(long, conflicts_with_all = ["alpha", "alpha_file"])]
    alpha_example: bool,

    /// `a,b,d` for `a + b sqrt d`, with `a`, `b` rationals like `-3/7`.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "alpha_file")]
    alpha: Option<String>,

    /// JSON document `{"a": "9/26", "b": "1/26", "d": 3}`.
    #[arg(long)]
    alpha_file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact arithmetic summary of one quadratic irrational.
    QuadEval {
        #[command(flatten)]
        alpha: AlphaArgs,
        #[arg(long, default_value_t = 30)]
        digits: usize,
        /// Also list `alpha^1 .. alpha^K`.
        #[arg(long, default_value_t = 3)]
        powers: u32,
    },
    /// Partition and equidistribution of `sigma(n) = floor(alpha (n+1)) - floor(alpha n)`.
    BeattyScan {
        #[command(flatten)]
        alpha: AlphaArgs,
        #[arg(long, default_value_t = 100_000)]
        n_max: u64,
        #[arg(long, default_value_t = 10)]
        bins: u64,
        /// Upper end of the sequential window, two-value and telescoping checks.
        #[arg(long, default_value_t = 100_000)]
        window_max: u64,
    },
    /// Closed-form multiplicity and subsequence limits with Cesaro audit.
    ExampleLimits {
        #[command(flatten)]
        alpha: AlphaArgs,
        /// Intersection table; the built-in example table otherwise.
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long)]
        remainder_slope: Option<String>,
    },
    /// Exact scan of `Delta(n)` with sampled CSV rows.
    ExampleScan {
        #[command(flatten)]
        alpha: AlphaArgs,
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        n_max: u64,
        #[arg(long, default_value_t = 1000)]
        stride: u64,
        #[arg(long)]
        remainder_slope: Option<String>,
        /// Write the JSON summary here.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Generator counts and product containment for a monomial filtration.
    MonomialCheck {
        /// JSON array `[sigma(1), sigma(2), ...]`.
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long, default_value_t = 100)]
        n_max: u64,
        /// Check `I_m I_n` inside `I_{m+n}` for `m + n <= grid_max`.
        #[arg(long, default_value_t = 24)]
        grid_max: u64,
    },
    /// The sequence `q_n = p + [n](q - p)` on an elliptic curve.
    EllipticQn {
        /// Curve document; `y^2 = x^3 - 2` over `Q` with `p = O`, `q = (3, 5)` otherwise.
        #[arg(long)]
        curve: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        n_max: u64,
        /// Torsion search bound for the order witness.
        #[arg(long, default_value_t = 12)]
        bound: u64,
        #[arg(long, default_value_t = 50)]
        restriction_max: u64,
    },
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Ingest(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Ingest(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Ingest(m) => m,
        }
    }
}

type Outcome<T> = Result<T, Failure>;

fn config<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Config(e.to_string())
}

fn ingest<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Ingest(e.to_string())
}

/// Reads an input file. A missing path is a configuration error, anything
/// else that goes wrong while reading is an ingestion error.
fn read_input(path: &Path) -> Outcome<String> {
    if !path.exists() {
        return Err(Failure::Config(format!("{}: no such file", path.display())));
    }
    fs::read_to_string(path).map_err(|e| Failure::Ingest(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(report: &T) -> serde_json::Value {
    serde_json::to_value(report).expect("reports serialize")
}

/// Pretty JSON with sorted keys and a trailing newline.
fn render(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("values serialize");
    s.push('\n');
    s
}

fn emit(out: Option<&Path>, text: &str) -> Outcome<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| config(format!("{}: {e}", path.display()))),
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| config(format!("stdout: {e}"))),
    }
}

fn flag_count(value: &serde_json::Value) -> usize {
    value.get("audit_flags").and_then(|f| f.as_array()).map_or(0, Vec::len)
}

fn configure_threads() -> Outcome<()> {
    let Ok(raw) = std::env::var("DIVFILT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Config(format!("DIVFILT_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(config)
}

fn run(cli: Cli) -> Outcome<usize> {
    configure_threads()?;
    let out = cli.out.as_deref();
    let report = match cli.command {
        Command::QuadEval { alpha, digits, powers } => commands::quad_eval(&alpha, digits, powers)?,
        Command::BeattyScan { alpha, n_max, bins, window_max } => {
            commands::beatty_scan(&alpha, n_max, bins, window_max)?
        }
        Command::ExampleLimits { alpha, table, remainder_slope } => {
            commands::example_limits(&alpha, table.as_deref(), remainder_slope.as_deref())?
        }
        Command::ExampleScan { alpha, table, n_max, stride, remainder_slope, summary } => {
            let scan = commands::example_scan(
                &alpha,
                table.as_deref(),
                n_max,
                stride,
                remainder_slope.as_deref(),
            )?;
            emit(out, &scan.csv)?;
            if let Some(path) = summary {
                emit(Some(&path), &render(&scan.summary))?;
            }
            return Ok(flag_count(&scan.summary));
        }
        Command::MonomialCheck { sigma, n_max, grid_max } => {
            commands::monomial_check(&sigma, n_max, grid_max)?
        }
        Command::EllipticQn { curve, n_max, bound, restriction_max } => {
            commands::elliptic_qn(curve.as_deref(), n_max, bound, restriction_max)?
        }
    };
    emit(out, &render(&report))?;
    Ok(flag_count(&report))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let strict = cli.strict;
    match run(cli) {
        Ok(flags) if strict && flags > 0 => {
            eprintln!("divfilt: {flags} audit flag(s) raised");
            ExitCode::from(1)
        }
        Ok(_) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("divfilt: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
