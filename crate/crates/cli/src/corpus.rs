//! Golden-file corpus runner.
//!
//! A corpus is a directory of scenario documents `<name>.json`. A scenario with a
//! sibling `<name>.report.json` passes when its canonical report matches that file
//! byte for byte; one without passes when all its checks pass.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::pipeline::{run_verify, RunOptions};
use crate::scenario::parse_scenario;
use crate::CliError;

const GOLDEN_SUFFIX: &str = ".report.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "outcome")]
pub enum Outcome {
    Match,
    Mismatch,
    /// No golden file; `passed` is the report status.
    Unpinned { passed: bool },
    Error { code: String, message: String },
}

impl Outcome {
    pub fn passed(&self) -> bool {
        matches!(self, Outcome::Match | Outcome::Unpinned { passed: true })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CorpusEntry {
    pub name: String,
    #[serde(flatten)]
    pub outcome: Outcome,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorpusSummary {
    pub total: usize,
    pub passed: usize,
    pub mismatches: usize,
    pub errors: usize,
    pub entries: Vec<CorpusEntry>,
}

/// Scenario files of a corpus directory in name order.
pub fn scenario_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let rd = fs::read_dir(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut out: Vec<PathBuf> = rd
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("");
            p.is_file() && name.ends_with(".json") && !name.ends_with(GOLDEN_SUFFIX)
        })
        .collect();
    out.sort();
    Ok(out)
}

/// Path of the golden report belonging to a scenario file.
pub fn golden_path(scenario: &Path) -> PathBuf {
    let stem = scenario.file_stem().and_then(|s| s.to_str()).unwrap_or("");
    scenario.with_file_name(format!("{stem}{GOLDEN_SUFFIX}"))
}

fn run_one(path: &Path, opts: &RunOptions) -> CorpusEntry {
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("").to_string();
    let outcome = match fs::read_to_string(path)
        .map_err(|e| CliError::Io(e.to_string()))
        .and_then(|text| parse_scenario(&text))
        .and_then(|ps| run_verify(&ps, opts))
    {
        Err(e) => Outcome::Error { code: e.code().into(), message: e.to_string() },
        Ok(report) => match fs::read_to_string(golden_path(path)) {
            Ok(golden) if golden == report.canonical() => Outcome::Match,
            Ok(_) => Outcome::Mismatch,
            Err(_) => Outcome::Unpinned { passed: report.passed() },
        },
    };
    CorpusEntry { name, outcome }
}

/// Runs every scenario of `dir` on `jobs` worker threads (all cores when `None`).
/// Entries come back in file-name order regardless of scheduling.
pub fn run_corpus(dir: &Path, jobs: Option<usize>, opts: &RunOptions) -> Result<CorpusSummary, CliError> {
    let files = scenario_files(dir)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder.build().map_err(|e| CliError::Internal(e.to_string()))?;
    let entries: Vec<CorpusEntry> = pool.install(|| files.par_iter().map(|p| run_one(p, opts)).collect());
    Ok(CorpusSummary {
        total: entries.len(),
        passed: entries.iter().filter(|e| e.outcome.passed()).count(),
        mismatches: entries.iter().filter(|e| e.outcome == Outcome::Mismatch).count(),
        errors: entries.iter().filter(|e| matches!(e.outcome, Outcome::Error { .. })).count(),
        entries,
    })
}
