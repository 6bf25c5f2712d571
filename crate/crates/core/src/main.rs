use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use smale_duality::runner::{self, compare_reports, parse_report, ExperimentConfig, Status};

/// Runs verification suites and compares their reports.
#[derive(Parser)]
#[command(name = "smale-verify", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one suite and write its JSON report.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// One of: axioms, homoclinic, partition, projection, operators, wg, ktheory, duality, pv.
        #[arg(long)]
        suite: String,
        #[arg(long)]
        out: PathBuf,
        /// Suppress the per-check summary on stderr.
        #[arg(long, short)]
        quiet: bool,
    },
    /// Field-level diff of two reports, ignoring timings.
    Diff { r1: PathBuf, r2: PathBuf },
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match cli.command {
        Command::Run { config, suite, out, quiet } => {
            let cfg = match ExperimentConfig::load(&config) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            let report = match runner::run(&cfg, &suite) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            if let Err(e) = report.write(&out) {
                return fail(format!("cannot write {}: {e}", out.display()));
            }
            if !quiet {
                for c in &report.checks {
                    let reason = c.reason.as_deref().map(|r| format!(" ({r})")).unwrap_or_default();
                    eprintln!("{} {}{reason} [{} ms]", c.status, c.name, c.timing_ms);
                }
                eprintln!("suite {}: {} in {} ms", report.suite, report.status, report.timing_ms);
            }
            ExitCode::from(u8::from(report.status == Status::Fail))
        }
        Command::Diff { r1, r2 } => {
            let read = |p: &PathBuf| {
                std::fs::read_to_string(p)
                    .map_err(|e| format!("cannot read {}: {e}", p.display()))
                    .and_then(|t| parse_report(&t, &p.display().to_string()).map_err(|e| e.to_string()))
            };
            let (a, b) = match (read(&r1), read(&r2)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => return fail(e),
            };
            match compare_reports(&a, &b) {
                Ok(d) if d.is_empty() => {
                    println!("no differences");
                    ExitCode::SUCCESS
                }
                Ok(d) => {
                    for f in &d {
                        let show = |v: &Option<serde_json::Value>| v.as_ref().map_or("<absent>".to_string(), |v| v.to_string());
                        println!("{}: {} -> {}", f.path, show(&f.left), show(&f.right));
                    }
                    println!("{} differing fields", d.len());
                    ExitCode::from(1)
                }
                Err(e) => fail(e),
            }
        }
    }
}
