use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ergolab_cli::{config, record, runner};

/// Experiment runner for orbit equidistribution statistics: exact ball
/// averages over free-group words and integer lattice elements on
/// concrete spaces, with deterministic, versioned result records.
#[derive(Parser)]
#[command(name = "ergolab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Schema-check and semantically validate a config; prints
    /// diagnostics and budget estimates without running anything.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Execute an experiment and write record.json, payload.json and
    /// CSV outputs.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the element budget.
        #[arg(long)]
        budget: Option<u64>,
        /// Worker threads (defaults to all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Run brute-force oracles only: entry-scan comparison for a norm
    /// ball, odometer word counts, and optional CSV dumps.
    Oracle {
        /// Compare the norm-ball enumeration against the entry scan at
        /// this bound (scan runs for bounds up to 24).
        #[arg(long)]
        sl2_ball: Option<f64>,
        /// Check odometer word counts against the closed form:
        /// rank,radius.
        #[arg(long, value_delimiter = ',')]
        words: Option<Vec<usize>>,
        /// Dump the enumerated ball to a CSV (a,b,c,d,norm).
        #[arg(long)]
        dump: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000_000)]
        budget: u64,
    },
    /// Summarize the records in a directory.
    Report {
        #[arg(long)]
        dir: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: Cli) -> ergolab::Result<()> {
    match cli.command {
        Command::Validate { config } => {
            let cfg = load_config(&config)?;
            let diags = config::validate(&cfg);
            let mut had_error = false;
            for d in &diags {
                println!("{:?}: {}", d.severity, d.message);
                had_error |= d.severity == config::Severity::Error;
            }
            if diags.is_empty() {
                println!("ok: no findings");
            }
            if had_error {
                return Err(ergolab::Error::Config("validation failed".into()));
            }
            Ok(())
        }
        Command::Run { config, out, seed, budget, threads } => {
            let mut cfg = load_config(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(b) = budget {
                cfg.budget = b;
            }
            let record = if let Some(n) = threads {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| ergolab::Error::Config(e.to_string()))?;
                pool.install(|| runner::run_to_dir(&cfg, &out))?
            } else {
                runner::run_to_dir(&cfg, &out)?
            };
            println!(
                "wrote {} (payload hash {}, {} ms)",
                out.display(),
                record.payload_hash,
                record.wall_ms
            );
            Ok(())
        }
        Command::Oracle { sl2_ball, words, dump, budget } => {
            if let Some(t) = sl2_ball {
                let (count, equal) = runner::oracle_sl2_ball(t, budget)?;
                println!("norm ball at {t}: {count} elements, entry-scan equality: {equal}");
                if !equal {
                    return Err(ergolab::Error::CertificateViolation(
                        "enumeration disagrees with the entry scan".into(),
                    ));
                }
            }
            if let Some(w) = words {
                if w.len() != 2 {
                    return Err(ergolab::Error::Config(
                        "--words takes rank,radius".into(),
                    ));
                }
                let counts = runner::oracle_word_counts(w[0], w[1])?;
                println!("word sphere counts for rank {}: {:?}", w[0], counts);
            }
            if let (Some(path), Some(t)) = (dump, sl2_ball) {
                record::write_ball_csv(t, budget, &path)?;
                println!("dumped ball CSV to {}", path.display());
            }
            Ok(())
        }
        Command::Report { dir } => {
            let mut entries: Vec<_> = std::fs::read_dir(&dir)
                .map_err(|e| ergolab::Error::Config(format!("io: {e}")))?
                .filter_map(|e| e.ok())
                .map(|e| e.path())
                .collect();
            entries.sort();
            let mut seen = 0;
            for path in entries {
                let record_path = if path.is_dir() { path.join("record.json") } else { path.clone() };
                if record_path.file_name().and_then(|s| s.to_str()) != Some("record.json") {
                    continue;
                }
                let Ok(bytes) = std::fs::read(&record_path) else { continue };
                let Ok(rec) = serde_json::from_slice::<record::ResultRecord>(&bytes) else {
                    continue;
                };
                seen += 1;
                println!(
                    "{}: version {}, hash {}, {} series, {} fits, {} ms",
                    record_path.display(),
                    rec.code_version,
                    rec.payload_hash,
                    rec.payload.series.len(),
                    rec.payload.fits.len(),
                    rec.wall_ms
                );
                for (name, fit) in &rec.payload.fits {
                    println!("  fit {name}: theta {:.4} (rms {:.2e})", fit.theta, fit.goodness);
                }
                for (name, v) in &rec.payload.scalars {
                    println!("  {name}: {v:.6}");
                }
            }
            if seen == 0 {
                println!("no records found under {}", dir.display());
            }
            Ok(())
        }
    }
}

fn load_config(path: &PathBuf) -> ergolab::Result<config::ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ergolab::Error::Config(format!("read {}: {e}", path.display())))?;
    config::parse(&text)
}
