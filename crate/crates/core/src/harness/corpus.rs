//! On-disk violation corpus.
//!
//! A corpus directory holds one `violation-NNNNNN.json` per failing trial
//! (named by trial index) and a `summary.json`. Files are written with
//! stable key order and no timestamps, so equal campaigns produce
//! byte-identical directories.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::fuzz::{run_schedule, Algorithm, FuzzReport, Violation};
use super::generator::GeneratorConfig;
use crate::error::Result;

pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuzzSummary {
    pub algorithm: Algorithm,
    pub config: GeneratorConfig,
    pub guard: u64,
    pub trials: u64,
    pub checks: u64,
    pub violations: u64,
    pub unknown_trials: u64,
    pub files: Vec<String>,
}

impl FuzzSummary {
    pub fn new(report: &FuzzReport, config: &GeneratorConfig, guard: u64) -> FuzzSummary {
        FuzzSummary {
            algorithm: report.algorithm,
            config: config.clone(),
            guard,
            trials: report.trials,
            checks: report.checks,
            violations: report.violations.len() as u64,
            unknown_trials: report.unknown_trials.len() as u64,
            files: report
                .violations
                .iter()
                .map(|(i, _)| violation_file_name(*i))
                .collect(),
        }
    }
}

pub fn violation_file_name(trial: u64) -> String {
    format!("violation-{trial:06}.json")
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("corpus records serialize");
    text.push('\n');
    text
}

pub fn write_violation(path: &Path, v: &Violation) -> Result<()> {
    fs::write(path, to_json(v))?;
    Ok(())
}

pub fn read_violation(path: &Path) -> Result<Violation> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Writes every violation and the summary into `dir`, creating it.
pub fn write_corpus(
    dir: &Path,
    report: &FuzzReport,
    config: &GeneratorConfig,
    guard: u64,
) -> Result<FuzzSummary> {
    fs::create_dir_all(dir)?;
    for (trial, v) in &report.violations {
        write_violation(&dir.join(violation_file_name(*trial)), v)?;
    }
    let summary = FuzzSummary::new(report, config, guard);
    fs::write(dir.join(SUMMARY_FILE), to_json(&summary))?;
    Ok(summary)
}

/// Violation files in `dir`, sorted by name. A missing directory is empty.
pub fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>> {
    if !dir.is_dir() {
        return Ok(Vec::new());
    }
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("violation-") && n.ends_with(".json"))
        })
        .collect();
    files.sort();
    Ok(files)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusReplay {
    pub path: PathBuf,
    pub algorithm: Algorithm,
    /// The stored schedule still yields exactly the stored violation.
    pub reproduced: bool,
}

/// Replays every stored violation.
pub fn replay_corpus(dir: &Path, guard: u64) -> Result<Vec<CorpusReplay>> {
    corpus_files(dir)?
        .into_iter()
        .map(|path| {
            let v = read_violation(&path)?;
            let replay = run_schedule(&v.tree, &v.schedule, v.algorithm, guard)?;
            Ok(CorpusReplay {
                reproduced: replay.violation.as_ref() == Some(&v),
                algorithm: v.algorithm,
                path,
            })
        })
        .collect()
}
