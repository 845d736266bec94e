//! Benchmark and inspection CLI for the batch LSM dictionary.
//!
//! Every subcommand is reproducible from its seed; CSV goes to `--csv
//! <path>` or stdout.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use lsm_batch::bench::{
    run_cleanup_bench, run_diff_test, run_effective_rate, run_insert_sweep, run_query_bench,
    write_csv, ExperimentRow, QueryKind, StructureKind, WorkloadSpec,
};
use lsm_batch::dump::{dump_lsm, dump_sorted_array};
use lsm_batch::{Lsm, SortedArray, UpdateEntry};

#[derive(Parser)]
#[command(name = "lsm-bench", about = "Batch LSM dictionary benchmarks", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Structure {
    Lsm,
    Sa,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Batch size b (power of two >= 2). Repeatable for insert-sweep.
    #[arg(long = "batch-size", default_values_t = vec![1024usize])]
    batch_size: Vec<usize>,

    /// Total elements n; must be a multiple of every batch size.
    #[arg(long, default_value_t = 1 << 20)]
    total: usize,

    /// Pseudorandom seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,

    /// Write CSV here instead of stdout.
    #[arg(long)]
    csv: Option<PathBuf>,

    /// Restrict to one structure (default: both).
    #[arg(long, value_enum)]
    structure: Option<Structure>,
}

#[derive(Subcommand)]
enum Command {
    /// Per-batch insertion rates with min/max/harmonic-mean summaries.
    InsertSweep {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Effective insertion rate (resident elements / cumulative time).
    EffectiveRate {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Lookup rates at sampled resident-batch checkpoints.
    LookupBench {
        #[command(flatten)]
        common: CommonArgs,
        /// Fraction of query keys drawn from the inserted set.
        #[arg(long, default_value_t = 1.0)]
        exist_fraction: f64,
    },
    /// Count-query rates for a target expected range L.
    CountBench {
        #[command(flatten)]
        common: CommonArgs,
        /// Expected resident elements per query interval.
        #[arg(long, default_value_t = 8)]
        range_l: u64,
    },
    /// Range-query rates for a target expected range L.
    RangeBench {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 8)]
        range_l: u64,
    },
    /// Cleanup vs rebuild timing with a query workload before and after.
    CleanupBench {
        #[command(flatten)]
        common: CommonArgs,
        /// Fraction of records made stale before the cleanup.
        #[arg(long, default_value_t = 0.3)]
        stale_fraction: f64,
    },
    /// Differential check of LSM and sorted array against the oracle.
    DiffTest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 32)]
        schedules: usize,
        #[arg(long, default_value_t = 64)]
        batch_size: usize,
    },
    /// Build a structure from a seeded workload and print its text dump.
    Dump {
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn structures(choice: Option<Structure>) -> Vec<StructureKind> {
    match choice {
        Some(Structure::Lsm) => vec![StructureKind::Lsm],
        Some(Structure::Sa) => vec![StructureKind::Sa],
        None => vec![StructureKind::Lsm, StructureKind::Sa],
    }
}

fn single_batch_size(common: &CommonArgs) -> usize {
    common.batch_size[0]
}

fn spec(common: &CommonArgs) -> WorkloadSpec {
    WorkloadSpec::new(common.total, single_batch_size(common), common.seed)
}

fn emit(rows: &[ExperimentRow], csv: Option<&PathBuf>) -> io::Result<()> {
    match csv {
        Some(path) => write_csv(rows, File::create(path)?),
        None => write_csv(rows, io::stdout().lock()),
    }
}

fn run() -> Result<(), String> {
    let cli = Cli::parse();
    match cli.command {
        Command::InsertSweep { common } => {
            let rows = run_insert_sweep(&spec(&common), &common.batch_size)
                .map_err(|e| e.to_string())?;
            emit(&rows, common.csv.as_ref()).map_err(|e| e.to_string())
        }
        Command::EffectiveRate { common } => {
            let rows = run_effective_rate(&spec(&common)).map_err(|e| e.to_string())?;
            emit(&rows, common.csv.as_ref()).map_err(|e| e.to_string())
        }
        Command::LookupBench { common, exist_fraction } => {
            let mut s = spec(&common);
            s.exist_fraction = exist_fraction;
            let rows = run_query_bench(&s, QueryKind::Lookup, &structures(common.structure))
                .map_err(|e| e.to_string())?;
            emit(&rows, common.csv.as_ref()).map_err(|e| e.to_string())
        }
        Command::CountBench { common, range_l } => {
            let mut s = spec(&common);
            s.range_l = range_l;
            let rows = run_query_bench(&s, QueryKind::Count, &structures(common.structure))
                .map_err(|e| e.to_string())?;
            emit(&rows, common.csv.as_ref()).map_err(|e| e.to_string())
        }
        Command::RangeBench { common, range_l } => {
            let mut s = spec(&common);
            s.range_l = range_l;
            let rows = run_query_bench(&s, QueryKind::Range, &structures(common.structure))
                .map_err(|e| e.to_string())?;
            emit(&rows, common.csv.as_ref()).map_err(|e| e.to_string())
        }
        Command::CleanupBench { common, stale_fraction } => {
            let rows = run_cleanup_bench(&spec(&common), stale_fraction)
                .map_err(|e| e.to_string())?;
            emit(&rows, common.csv.as_ref()).map_err(|e| e.to_string())
        }
        Command::DiffTest { seed, schedules, batch_size } => {
            let checks = run_diff_test(seed, schedules, batch_size).map_err(|e| e.to_string())?;
            println!("diff-test: {checks} comparisons passed across {schedules} schedules");
            Ok(())
        }
        Command::Dump { common } => {
            let s = spec(&common);
            s.validate().map_err(|e| e.to_string())?;
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(s.seed);
            let batches: Vec<Vec<UpdateEntry>> = (0..s.total / s.batch_size)
                .map(|_| {
                    (0..s.batch_size)
                        .map(|_| {
                            let key = rng.gen_range(0..=lsm_batch::MAX_ORIGINAL_KEY);
                            if rng.gen_bool(0.2) {
                                UpdateEntry::Delete { key }
                            } else {
                                UpdateEntry::Insert { key, value: rng.gen() }
                            }
                        })
                        .collect()
                })
                .collect();
            let text = match common.structure {
                Some(Structure::Sa) => {
                    let mut sa =
                        SortedArray::with_batch_size(s.batch_size).map_err(|e| e.to_string())?;
                    for batch in &batches {
                        sa.update_batch(batch).map_err(|e| e.to_string())?;
                    }
                    dump_sorted_array(&sa)
                }
                _ => {
                    let mut lsm = Lsm::with_batch_size(s.batch_size).map_err(|e| e.to_string())?;
                    for batch in &batches {
                        lsm.update_batch(batch).map_err(|e| e.to_string())?;
                    }
                    dump_lsm(&lsm)
                }
            };
            match common.csv {
                Some(path) => std::fs::write(path, text).map_err(|e| e.to_string()),
                None => io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
            }
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
