use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ffstark::corpus::run_corpus;
use ffstark::sweep::{run_sweep, SweepParams};
use ffstark::{parse_scenario, run_verify, CliError, RunOptions};

#[derive(Parser)]
#[command(name = "ffstark", version, about = "Verify Stickelberger elements of constant field extensions of F_q(t)")]
struct Cli {
    /// Euler truncation order (overrides the scenario value)
    #[arg(long, global = true)]
    euler_order: Option<usize>,
    /// Degree bound for class group generators (overrides the scenario value)
    #[arg(long, global = true)]
    gen_bound: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "info")]
    log_level: LogLevel,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum LogLevel {
    Quiet,
    Info,
    Debug,
}

#[derive(Subcommand)]
enum Command {
    /// Run all requested checks on one scenario document
    Verify {
        scenario: PathBuf,
        /// Write the report here instead of standard output
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run a directory of scenarios against their golden reports
    Corpus {
        dir: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Run every scenario satisfying the hypotheses in a parameter range
    Sweep {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        a: usize,
        #[arg(long)]
        nu_max: usize,
        #[arg(long)]
        deg_max: usize,
        #[arg(long)]
        r_max: usize,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(x: &T) -> String {
    let mut s = serde_json::to_string_pretty(x).expect("serializable");
    s.push('\n');
    s
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let opts = RunOptions { euler_order: cli.euler_order, gen_bound: cli.gen_bound };
    match cli.command {
        Command::Verify { scenario, report } => {
            let text = fs::read_to_string(&scenario).map_err(|e| CliError::Io(format!("{}: {e}", scenario.display())))?;
            let ps = parse_scenario(&text)?;
            let rep = run_verify(&ps, &opts)?;
            let out = if report.is_some() { rep.canonical() } else { rep.with_timings() };
            write_out(report.as_deref(), &out)?;
            log::info!("status: {}", if rep.passed() { "pass" } else { "fail" });
            Ok(rep.passed())
        }
        Command::Corpus { dir, jobs } => {
            let summary = run_corpus(&dir, jobs, &opts)?;
            print!("{}", to_json(&summary));
            log::info!("{}/{} passed, {} mismatches", summary.passed, summary.total, summary.mismatches);
            Ok(summary.passed == summary.total)
        }
        Command::Sweep { p, a, nu_max, deg_max, r_max, report } => {
            let summary = run_sweep(&SweepParams::new(p, a, nu_max, deg_max, r_max), &opts)?;
            write_out(report.as_deref(), &to_json(&summary))?;
            log::info!("{}/{} passed in {:.1} s", summary.passed, summary.total, summary.elapsed_secs);
            Ok(summary.all_passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let filter = match cli.log_level {
        LogLevel::Quiet => log::LevelFilter::Error,
        LogLevel::Info => log::LevelFilter::Info,
        LogLevel::Debug => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(filter).format_timestamp(None).init();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
