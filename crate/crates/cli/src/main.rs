//! `molcurate` command line.
//!
//! Exit codes: 0 success, 1 input or usage error, 2 finished with records
//! quarantined for parse or standardization failures.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::Config;

#[derive(Parser, Debug)]
#[command(name = "molcurate", about = "Curate, merge and analyze small-molecule record files", disable_version_flag = true)]
struct Cli {
    /// Print the version and embedded table checksums.
    #[arg(long)]
    version: bool,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// key=value defaults; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args, Debug)]
struct FpArgs {
    /// ECFP radius.
    #[arg(long)]
    radius: Option<u32>,
    /// ECFP width in bits (power of two, at least 64).
    #[arg(long)]
    width: Option<usize>,
}

#[derive(Args, Debug)]
struct StageArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Kept records.
    #[arg(long)]
    out: PathBuf,
    /// Per-source stage counts (JSON).
    #[arg(long)]
    ledger: Option<PathBuf>,
    /// Removed records (TSV); defaults to `<out>.quarantine.tsv`.
    #[arg(long)]
    quarantine: Option<PathBuf>,
    #[arg(long)]
    chunk_rows: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and deduplicate a record file.
    Ingest(StageArgs),
    /// Parse, standardize, filter and deduplicate a record file.
    Run(StageArgs),
    /// Merge kept files; earlier inputs win.
    Merge {
        /// Inputs in priority order (repeatable).
        #[arg(long = "in", required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Per-source gain table (JSON).
        #[arg(long)]
        gain: Option<PathBuf>,
        /// Merge in order of decreasing record count instead of as given.
        #[arg(long)]
        by_size: bool,
    },
    /// Pick a diverse subset of exactly M records.
    Subset {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        m: Option<usize>,
        /// MaxMin center threshold.
        #[arg(long)]
        t: Option<f64>,
        #[arg(long, required = true)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        fp: FpArgs,
    },
    /// Estimate #Circles at radius t.
    Ncircles {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        fp: FpArgs,
    },
    /// Compare within-set distance distributions of two record files.
    Stats {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Sampled pairs per set.
        #[arg(long)]
        pairs: Option<usize>,
        #[arg(long, required = true)]
        seed: u64,
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        fp: FpArgs,
    },
    /// Drug-likeness filter pass rates.
    Filters {
        #[arg(long = "in")]
        input: PathBuf,
        /// Filters to apply (repeatable); default all descriptor filters.
        #[arg(long = "filter")]
        filters: Vec<String>,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Per-record verdicts (TSV).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scaffolds, salts, element groups and descriptor distributions.
    Summary {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<u8> {
    if cli.version {
        print!("{}", commands::version_text());
        return Ok(0);
    }
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let threads: usize = cfg.resolve(cli.threads, "threads", 0)?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    let Some(command) = cli.command else {
        eprintln!("error: a subcommand is required (try --help)");
        return Ok(1);
    };
    commands::run(command, &cfg)
}
