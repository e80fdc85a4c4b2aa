use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use symtree_core::eval::{MetricReport, REPORT_FORMAT_VERSION};

use super::{run_experiment, ExperimentConfig, HarnessError, RunContext, RunOutput};
use crate::gateway::sha256_hex;
use crate::io::{read_json, write_bytes, write_json, IoError};

pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    /// Relative to the run directory.
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

/// `manifest.json`: what a run directory holds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub name: String,
    pub questions: usize,
    pub artifacts: Vec<Artifact>,
}

/// Runs `config` and writes `config.json`, `answers.jsonl`, `report.json`,
/// `report.csv`, `report.md` and `manifest.json` under `out`.
pub fn run_to_dir(config: &ExperimentConfig, run: &RunContext, out: &Path) -> Result<RunOutput, HarnessError> {
    let output = run_experiment(config, run)?;
    fs::create_dir_all(out).map_err(|source| IoError::Fs { path: out.to_path_buf(), source })?;
    let mut answers = Vec::new();
    for a in &output.answers {
        answers.extend(serde_json::to_vec(a).expect("answer serializes"));
        answers.push(b'\n');
    }
    let mut report_json = serde_json::to_vec_pretty(&output.report).expect("report serializes");
    report_json.push(b'\n');
    let mut config_json = serde_json::to_vec_pretty(config).expect("config serializes");
    config_json.push(b'\n');
    let files: [(&str, Vec<u8>); 5] = [
        ("config.json", config_json),
        ("answers.jsonl", answers),
        ("report.json", report_json),
        ("report.csv", output.report.to_csv().into_bytes()),
        ("report.md", output.report.to_markdown().into_bytes()),
    ];
    let mut artifacts = Vec::new();
    for (name, bytes) in &files {
        write_bytes(&out.join(name), bytes)?;
        artifacts.push(Artifact { path: name.to_string(), sha256: sha256_hex(bytes), bytes: bytes.len() });
    }
    let manifest = Manifest {
        version: MANIFEST_VERSION,
        name: config.name.clone(),
        questions: output.answers.len(),
        artifacts,
    };
    write_json(&out.join("manifest.json"), &manifest)?;
    Ok(output)
}

/// Reads `report.json` from a run directory (or a report file directly).
pub fn load_report(path: &Path) -> Result<MetricReport, HarnessError> {
    let file: PathBuf = if path.is_dir() { path.join("report.json") } else { path.to_path_buf() };
    let report: MetricReport = read_json(&file)?;
    if report.version != REPORT_FORMAT_VERSION {
        return Err(IoError::Version {
            path: file,
            what: "report",
            found: report.version,
            expected: REPORT_FORMAT_VERSION,
        }
        .into());
    }
    Ok(report)
}
