use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rctab::cli::{run, suite, ExperimentConfig};
use rctab::Error;

/// Contingency-table experiments: exact counting, entropy bounds, uniform
/// samplers, and limit-law verification. Every command is deterministic
/// given --seed; reports echo the full config.
#[derive(Parser, Debug)]
#[command(name = "rctab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON config file; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Root seed for all randomness.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory (default: $RCTAB_OUT or ./rctab-out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Sampler for experiments that draw tables: chain | rejection.
    #[arg(long, global = true)]
    sampler: Option<String>,

    /// Square instance size n (uniform margins Cn).
    #[arg(long, global = true)]
    n: Option<u64>,

    /// Entry density C.
    #[arg(long = "C", global = true)]
    c: Option<u64>,

    /// Threshold exponent for max-entry experiments.
    #[arg(long, global = true)]
    eps: Option<f64>,

    /// Block size for joint-law experiments.
    #[arg(long, global = true)]
    k: Option<u64>,

    /// Row-class depth / composition target.
    #[arg(long, global = true)]
    r: Option<u64>,

    /// Retained sample count.
    #[arg(long, global = true)]
    samples: Option<u64>,

    /// Chain burn-in steps (default 50·mn).
    #[arg(long, global = true)]
    burn_in: Option<u64>,

    /// Chain steps between retained samples (default mn).
    #[arg(long, global = true)]
    thin: Option<u64>,

    /// Sample-stream format: csv | json | bin.
    #[arg(long, global = true)]
    format: Option<String>,

    /// Explicit row margins, comma-separated (with --cols).
    #[arg(long, global = true, value_delimiter = ',')]
    rows: Option<Vec<u64>>,

    /// Explicit column margins, comma-separated.
    #[arg(long, global = true, value_delimiter = ',')]
    cols: Option<Vec<u64>>,

    /// Caps vector for compositions, comma-separated.
    #[arg(long, global = true, value_delimiter = ',')]
    caps: Option<Vec<u64>>,

    /// Row count m for margin-max sweeps.
    #[arg(long, global = true)]
    m: Option<u64>,

    /// Margin total N for margin-max sweeps.
    #[arg(long, global = true)]
    total: Option<u64>,

    /// Sizes for trend experiments, comma-separated.
    #[arg(long, global = true, value_delimiter = ',')]
    sizes: Option<Vec<u64>>,

    /// Pooled entries per size (verify-marginal).
    #[arg(long, global = true)]
    entries: Option<u64>,

    /// Per-entry truncation of the joint comparison support.
    #[arg(long, global = true)]
    trunc: Option<u64>,

    /// Tolerance overrides as name=value (repeatable).
    #[arg(long = "tol", global = true, value_parser = parse_tol)]
    tolerances: Vec<(String, f64)>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact table count for the margins.
    Count,
    /// List every table (guarded by a cap) and cross-check the count.
    Enumerate,
    /// Generating-function coefficients for bounded compositions.
    Compositions,
    /// Exhaustive check that balanced margins maximize the count.
    MarginMax,
    /// Solve the maximum-entropy typical table.
    Typical,
    /// Entropy upper bound on the count (lower bound is symbolic).
    Bounds,
    /// Closed-form asymptotic log-count for equal margins.
    CmEstimate,
    /// Projected-law density ratio against its limit e^{r/2}.
    RnRatio,
    /// Draw uniform tables and write the stream to disk.
    Sample,
    /// Marginal law vs Geom(C): TV trend and log-log slope.
    VerifyMarginal,
    /// Top-left block law vs the iid product on a truncated support.
    VerifyJoint,
    /// Entry moments vs independent-geometric references.
    VerifyMoments,
    /// Maximum entry vs the iid extreme-value thresholds.
    VerifyMax,
    /// Empirical singular spectrum vs the limit law.
    VerifyEsd,
    /// Run a JSON list of configs and aggregate pass/fail.
    Suite {
        /// Path to a JSON array of experiment configs.
        path: PathBuf,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Count => "count",
            Command::Enumerate => "enumerate",
            Command::Compositions => "compositions",
            Command::MarginMax => "margin-max",
            Command::Typical => "typical",
            Command::Bounds => "bounds",
            Command::CmEstimate => "cm-estimate",
            Command::RnRatio => "rn-ratio",
            Command::Sample => "sample",
            Command::VerifyMarginal => "verify-marginal",
            Command::VerifyJoint => "verify-joint",
            Command::VerifyMoments => "verify-moments",
            Command::VerifyMax => "verify-max",
            Command::VerifyEsd => "verify-esd",
            Command::Suite { .. } => "suite",
        }
    }
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got {s:?}"))?;
    let v: f64 = value
        .parse()
        .map_err(|e| format!("bad tolerance value {value:?}: {e}"))?;
    Ok((name.to_string(), v))
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.command = cli.command.name().to_string();
    // flags override file values
    macro_rules! overlay {
        ($($field:ident),*) => {
            $(if cli.$field.is_some() { cfg.$field = cli.$field.clone(); })*
        };
    }
    overlay!(
        seed, out, sampler, n, c, eps, k, r, samples, burn_in, thin, format, rows, cols, caps,
        m, total, sizes, entries, trunc
    );
    for (name, value) in &cli.tolerances {
        cfg.tolerances.insert(name.clone(), *value);
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if let Command::Suite { path } = &cli.command {
        return match suite(path, cli.seed) {
            Ok(rep) => {
                for member in &rep.members {
                    println!("== {} (seed {}) ==", member.command, member.seed);
                    for line in member.lines() {
                        println!("{line}");
                    }
                }
                if rep.pass {
                    println!("suite: all {} member(s) passed", rep.members.len());
                    ExitCode::SUCCESS
                } else {
                    eprintln!("suite: failures in {:?}", rep.failed);
                    ExitCode::from(1)
                }
            }
            Err(e) => exit_for(e),
        };
    }

    let cfg = match build_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&cfg) {
        Ok(report) => {
            for line in report.lines() {
                println!("{line}");
            }
            if let Some(w) = &report.density_warning {
                eprintln!("note: {w}");
            }
            println!(
                "{}: {} ({} checks, {:.0} ms)",
                report.command,
                if report.pass { "PASS" } else { "FAIL" },
                report.checks.len(),
                report.wall_clock_ms
            );
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => exit_for(e),
    }
}

fn exit_for(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        Error::Config(_) | Error::Parse(_) => ExitCode::from(2),
        Error::ResourceCap(_) => ExitCode::from(3),
        _ => ExitCode::from(1),
    }
}
