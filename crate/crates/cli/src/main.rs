use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand};
use stableprobe::cache::run_lru_trace;
use stableprobe::oracle::{run_random_check, CheckConfig};
use stableprobe::workload::{emit_csv, run_workload};
use stableprobe::{DeletionPolicy, Variant, WorkloadConfig};

#[derive(Debug, Parser)]
#[command(
    name = "stableprobe",
    version,
    about = "Linear probing with stable slots: churn benchmarks and checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fill a table, churn it, and write probe-cost measurements as CSV.
    Bench {
        /// Table capacity in slots.
        #[arg(long, default_value_t = 100_000)]
        m: usize,
        /// Load factor n/m, strictly between 0 and 1.
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value = "fifo")]
        policy: DeletionPolicy,
        /// Delete+insert rounds after the fill [default: 10 n].
        #[arg(long)]
        rounds: Option<u64>,
        /// Rounds between measurements [default: n / 10].
        #[arg(long)]
        measure_every: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "minimal")]
        variant: Variant,
        /// Output file; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run random operations against a reference map and check invariants after each.
    Check {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        ops: usize,
        #[arg(long, default_value_t = 256)]
        m: usize,
        #[arg(long, default_value = "minimal")]
        variant: Variant,
    },
    /// Replay a random trace on the slot-linked LRU cache and a reference LRU.
    DemoLru {
        #[arg(long, default_value_t = 64)]
        capacity: usize,
        #[arg(long, default_value_t = 10_000)]
        ops: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn usage_error(message: &str) -> ExitCode {
    let mut cmd = Cli::command();
    eprintln!("error: {message}\n");
    let _ = cmd.write_help(&mut io::stderr());
    ExitCode::from(2)
}

fn bench(config: WorkloadConfig, out: Option<PathBuf>) -> ExitCode {
    if let Err(e) = config.validate() {
        return usage_error(&e.to_string());
    }
    let records = match run_workload(&config) {
        Ok(r) => r,
        Err(e) => return usage_error(&e.to_string()),
    };
    let written = match out {
        Some(path) => File::create(&path).and_then(|f| emit_csv(&records, BufWriter::new(f))),
        None => emit_csv(&records, io::stdout().lock()),
    };
    if let Err(e) = written {
        eprintln!("error: writing CSV: {e}");
        return ExitCode::FAILURE;
    }
    if let Some(last) = records.last().filter(|r| r.saturated) {
        eprintln!(
            "table saturated after {} deletions: no empty slot left for an insertion",
            last.deletions
        );
    }
    ExitCode::SUCCESS
}

fn check(config: CheckConfig) -> ExitCode {
    let report = match run_random_check(&config) {
        Ok(r) => r,
        Err(e) => return usage_error(&e.to_string()),
    };
    let stable = config.variant.keeps_slots_stable();
    if let Some((op, violation)) = &report.first_violation {
        println!("op {op}: {violation}");
        return ExitCode::FAILURE;
    }
    if let Some((op, detail)) = &report.first_mismatch {
        println!("op {op}: model mismatch: {detail}");
        return ExitCode::FAILURE;
    }
    if stable && report.moved_handles > 0 {
        println!("{} slot handles moved", report.moved_handles);
        return ExitCode::FAILURE;
    }
    println!(
        "ok: {} ops ({} inserts, {} removes, {} finds), {} rejected as full, max {} tombstones, {} moved handles",
        report.ops,
        report.inserts,
        report.removes,
        report.finds,
        report.table_full,
        report.max_tombstones,
        report.moved_handles
    );
    ExitCode::SUCCESS
}

fn demo_lru(capacity: usize, ops: usize, seed: u64) -> ExitCode {
    if capacity == 0 {
        return usage_error("capacity must be at least 1");
    }
    match run_lru_trace(seed, ops, capacity, Variant::Minimal) {
        Ok(report) => {
            println!(
                "ok: {} ops, {} hits, {} evictions, links consistent after every operation",
                report.ops, report.hits, report.evictions
            );
            ExitCode::SUCCESS
        }
        Err(failure) => {
            println!("{failure}");
            ExitCode::FAILURE
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Bench {
            m,
            alpha,
            policy,
            rounds,
            measure_every,
            seed,
            variant,
            out,
        } => {
            let mut config = WorkloadConfig::new(m, alpha);
            config.policy = policy;
            config.seed = seed;
            config.variant = variant;
            if let Some(r) = rounds {
                config.rounds = r;
            }
            if let Some(e) = measure_every {
                config.measure_every = e;
            }
            bench(config, out)
        }
        Command::Check {
            seed,
            ops,
            m,
            variant,
        } => check(CheckConfig::new(seed, ops, m).with_variant(variant)),
        Command::DemoLru {
            capacity,
            ops,
            seed,
        } => demo_lru(capacity, ops, seed),
    };
    let _ = io::stdout().flush();
    code
}
