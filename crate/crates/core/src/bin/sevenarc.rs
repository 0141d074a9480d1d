use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sevenarc::arcs::default_jobs;
use sevenarc::harness::{
    formulas_json, glynn_reports, parse_types, render_reports, render_table, Cache, Format, Harness, HarnessError,
    Options, Run, DEFAULT_BUDGET_CANDIDATES, DELTA_TYPES, TABLE_TYPES,
};
use sevenarc::orbits::CycleType;

const DEFAULT_CACHE: &str = "sevenarc-cache.jsonl";

#[derive(Parser)]
#[command(name = "sevenarc", version, about = "Counts Frobenius-invariant 7-arcs and Fano planes over GF(2^k)")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Wall-clock budget for the whole command, in seconds.
    #[arg(long, global = true)]
    budget_seconds: Option<f64>,

    /// Work budget per job in candidate units; 0 disables it.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET_CANDIDATES)]
    budget_candidates: u64,

    /// JSON-lines cache file.
    #[arg(long, global = true, env = "SEVENARC_CACHE", default_value = DEFAULT_CACHE)]
    cache: PathBuf,

    /// Keep results in memory only.
    #[arg(long, global = true)]
    no_cache: bool,

    /// Continue partial jobs found in the cache.
    #[arg(long, global = true)]
    resume: bool,

    /// Output format: human, json or csv.
    #[arg(long, global = true, default_value = "human")]
    format: Format,

    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Count 7-arcs of the given cycle types.
    Census {
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<u64>,
        #[arg(long, value_delimiter = ',', required = true)]
        lambda: Vec<CycleType>,
    },
    /// Count and compare with the formulas; exit 3 on any mismatch.
    Verify {
        #[arg(long, value_delimiter = ',', default_value = "2")]
        q: Vec<u64>,
        /// Default: the five table rows.
        #[arg(long, value_delimiter = ',')]
        lambda: Vec<CycleType>,
    },
    /// Count Fano planes per cycle type (default: all fifteen).
    FanoCensus {
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<u64>,
        #[arg(long, value_delimiter = ',')]
        lambda: Vec<CycleType>,
    },
    /// Inclusion-exclusion census of invariant sets that fail to be arcs.
    DeltaCensus {
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<u64>,
        /// Default: 2+2+1+1+1, 3+3+1, 4+2+1 and 7.
        #[arg(long, value_delimiter = ',')]
        lambda: Vec<CycleType>,
    },
    /// The five-row table, formulas beside enumerations.
    Table {
        #[arg(long, value_delimiter = ',', default_value = "2,4")]
        q: Vec<u64>,
    },
    /// Dump the formula registry as JSON.
    Formulas,
    /// Closed-form ordered count of 7-arcs with trivial action, both a(q).
    Glynn {
        #[arg(long, value_delimiter = ',', default_value = "8")]
        q: Vec<u64>,
    },
}

fn emit(text: &str, out: &Option<PathBuf>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn report_incomplete(run: &Run) {
    for i in &run.incomplete {
        eprintln!("budget exhausted: {i}");
    }
    if !run.incomplete.is_empty() {
        eprintln!("partial progress is cached; rerun with --resume and a larger budget to continue");
    }
}

fn or_default(v: Vec<CycleType>, names: &[&str]) -> Vec<CycleType> {
    if v.is_empty() {
        parse_types(names)
    } else {
        v
    }
}

fn run(cli: Cli) -> Result<i32, HarnessError> {
    let opts = Options {
        jobs: cli.jobs.unwrap_or_else(default_jobs).max(1),
        max_work: (cli.budget_candidates > 0).then_some(cli.budget_candidates),
        max_seconds: cli.budget_seconds,
        resume: cli.resume,
    };
    let cache = if cli.no_cache { Cache::in_memory() } else { Cache::open(&cli.cache)? };
    let mut h = Harness::new(cache, opts);
    let (run, strict) = match cli.command {
        Command::Formulas => {
            emit(&formulas_json(), &cli.out)?;
            return Ok(0);
        }
        Command::Table { q } => {
            let t = h.table(q)?;
            emit(&render_table(&t.rows, cli.format), &cli.out)?;
            return Ok(t.exit_code());
        }
        Command::Glynn { q } => (glynn_reports(q)?, false),
        Command::Census { q, lambda } => (h.census(q, lambda)?, false),
        Command::Verify { q, lambda } => (h.verify(q, or_default(lambda, &TABLE_TYPES))?, true),
        Command::FanoCensus { q, lambda } => {
            let lambda = if lambda.is_empty() { CycleType::all(7) } else { lambda };
            (h.fano_census(q, lambda)?, false)
        }
        Command::DeltaCensus { q, lambda } => (h.delta_census(q, or_default(lambda, &DELTA_TYPES))?, false),
    };
    emit(&render_reports(&run.reports, cli.format), &cli.out)?;
    report_incomplete(&run);
    if strict && run.mismatches() > 0 {
        eprintln!("{} report(s) disagree with their formula", run.mismatches());
    }
    Ok(run.exit_code(strict))
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
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
