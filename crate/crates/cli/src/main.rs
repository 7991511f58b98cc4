//! Command-line front end: scan a corpus, generate synthetic corpora, and
//! replay reports.
//!
//! Exit codes: 0 scan/generation/replay completed, 1 usage or schema error,
//! 2 replay mismatch.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;

use cpmmscan_cli::corpus::{filter_targets, load_corpus, parse_corpus};
use cpmmscan_cli::corpusgen::{generate_corpus, ArchetypeCounts};
use cpmmscan_cli::report::{build_report, replay, ReportFile};
use cpmmscan_cli::scan::scan_all;
use cpmmscan_core::synth::ScanVerdict;
use cpmmscan_core::SearchConfig;

#[derive(Parser)]
#[command(name = "cpmmscan", version, about = "Constant-product pool exploit scanner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan every pool in a corpus and write a report.
    Scan {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        report: PathBuf,
        #[arg(long, default_value_t = 4)]
        workers: usize,
        /// Per-target wall-clock budget.
        #[arg(long, default_value_t = 1200)]
        timeout_secs: u64,
        /// Minimum USD value of the pool's stable reserve (strict).
        #[arg(long, default_value_t = 1000)]
        min_usd: u64,
        /// Minimum USD profit for a finding (strict).
        #[arg(long, default_value_t = 1)]
        profit_threshold_usd: u64,
        #[arg(long, default_value_t = 256)]
        rep_cap: u32,
        /// Single-pass mode: skip the deep repetition search.
        #[arg(long)]
        no_repeat: bool,
        /// Skip the invariant gate; sample random repetition counts instead.
        #[arg(long)]
        no_invariant_gate: bool,
        /// Scan against a fee-less copy of each pool.
        #[arg(long)]
        no_dex_fee: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Generate a deterministic synthetic corpus.
    GenCorpus {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        anch: usize,
        #[arg(long, default_value_t = 0)]
        shadowfi: usize,
        #[arg(long, default_value_t = 0)]
        deflate: usize,
        #[arg(long, default_value_t = 0)]
        rebase: usize,
        #[arg(long, default_value_t = 0)]
        benign: usize,
        #[arg(long, default_value_t = 0)]
        benign_fot: usize,
    },
    /// Re-execute a report's traces against a corpus and verify the profits.
    Replay {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Scan {
            corpus,
            report,
            workers,
            timeout_secs,
            min_usd,
            profit_threshold_usd,
            rep_cap,
            no_repeat,
            no_invariant_gate,
            no_dex_fee,
            seed,
        } => {
            let targets = load_corpus(&corpus).map_err(|e| e.to_string())?;
            let min_usd = BigRational::from_integer(BigInt::from(min_usd));
            let targets = filter_targets(targets, &min_usd);
            let config = SearchConfig {
                rep_cap,
                profit_threshold_usd: (profit_threshold_usd, 1),
                no_repeat,
                no_invariant_gate,
                no_dex_fee,
                seed,
                ..SearchConfig::default()
            };
            let outcomes = scan_all(targets, &config, workers, Duration::from_secs(timeout_secs));
            for outcome in &outcomes {
                let line = match &outcome.verdict {
                    ScanVerdict::Profitable(r) => format!(
                        "profitable template={} reps={} profit={} {} (~${})",
                        r.template_id, r.reps, r.profit_amount, r.profit_token, r.profit_usd
                    ),
                    ScanVerdict::NotVulnerable { early_terminated } => format!(
                        "not_vulnerable early_terminated={early_terminated}"
                    ),
                    ScanVerdict::Timeout => "timeout".into(),
                };
                println!("{}: {}", outcome.target_id, line);
            }
            let file = build_report(&outcomes, &config);
            let text = serde_json::to_string_pretty(&file).map_err(|e| e.to_string())?;
            std::fs::write(&report, text).map_err(|e| e.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::GenCorpus {
            seed,
            out,
            anch,
            shadowfi,
            deflate,
            rebase,
            benign,
            benign_fot,
        } => {
            let counts = ArchetypeCounts {
                anch,
                shadowfi,
                deflate,
                rebase,
                benign,
                benign_fot,
            };
            let corpus = generate_corpus(seed, &counts).map_err(|e| e.to_string())?;
            let text = serde_json::to_string_pretty(&corpus).map_err(|e| e.to_string())?;
            std::fs::write(&out, text).map_err(|e| e.to_string())?;
            println!("wrote {} targets to {}", counts.total(), out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Replay { report, corpus } => {
            let report_text = std::fs::read_to_string(&report).map_err(|e| e.to_string())?;
            let report_file: ReportFile =
                serde_json::from_str(&report_text).map_err(|e| format!("malformed report: {e}"))?;
            let corpus_text = std::fs::read_to_string(&corpus).map_err(|e| e.to_string())?;
            let corpus_file = parse_corpus(&corpus_text).map_err(|e| e.to_string())?;
            match replay(&report_file, &corpus_file) {
                Ok(confirmed) => {
                    println!("confirmed {confirmed} exploit trace(s)");
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    eprintln!("replay mismatch: {e}");
                    Ok(ExitCode::from(2))
                }
            }
        }
    }
}
