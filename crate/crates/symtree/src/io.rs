//! Reading and writing the versioned JSON documents and ProofWriter JSONL.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use symtree_core::dataset::{Dataset, DATASET_FORMAT_VERSION};
use symtree_core::kb::{Theory, THEORY_FORMAT_VERSION};
use symtree_core::proofwriter::{PwError, PwRecord, RawRecord};
use symtree_core::transforms::{SymbolMap, SYMBOL_MAP_VERSION};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Fs { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{path}: {what} format version {found} is not supported (expected {expected})")]
    Version { path: PathBuf, what: &'static str, found: u32, expected: u32 },
    #[error("{path}:{line}: {source}")]
    JsonLine { path: PathBuf, line: usize, source: serde_json::Error },
    #[error("{path}:{line}: {source}")]
    ProofWriter { path: PathBuf, line: usize, source: PwError },
}

fn fs_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Fs { path: path.to_path_buf(), source }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let bytes = fs::read(path).map_err(fs_err(path))?;
    serde_json::from_slice(&bytes).map_err(|source| IoError::Json { path: path.to_path_buf(), source })
}

/// Pretty JSON with a trailing newline, written atomically.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|source| IoError::Json { path: path.to_path_buf(), source })?;
    bytes.push(b'\n');
    write_bytes(path, &bytes)
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), IoError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(fs_err(dir))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fs_err(dir))?;
    tmp.write_all(bytes).map_err(fs_err(path))?;
    tmp.persist(path).map_err(|e| IoError::Fs { path: path.to_path_buf(), source: e.error })?;
    Ok(())
}

fn check_version(path: &Path, what: &'static str, found: u32, expected: u32) -> Result<(), IoError> {
    if found == expected {
        Ok(())
    } else {
        Err(IoError::Version { path: path.to_path_buf(), what, found, expected })
    }
}

pub fn read_theory(path: &Path) -> Result<Theory, IoError> {
    let t: Theory = read_json(path)?;
    check_version(path, "theory", t.version, THEORY_FORMAT_VERSION)?;
    Ok(t)
}

pub fn read_dataset(path: &Path) -> Result<Dataset, IoError> {
    let d: Dataset = read_json(path)?;
    check_version(path, "dataset", d.version, DATASET_FORMAT_VERSION)?;
    Ok(d)
}

pub fn read_symbol_map(path: &Path) -> Result<SymbolMap, IoError> {
    let m: SymbolMap = read_json(path)?;
    check_version(path, "symbol map", m.version, SYMBOL_MAP_VERSION)?;
    Ok(m)
}

/// Parses a ProofWriter JSONL shard; blank lines are skipped and errors
/// carry 1-based line numbers.
pub fn read_proofwriter(path: &Path) -> Result<Vec<PwRecord>, IoError> {
    let file = fs::File::open(path).map_err(fs_err(path))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(fs_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord = serde_json::from_str(&line)
            .map_err(|source| IoError::JsonLine { path: path.to_path_buf(), line: i + 1, source })?;
        let rec = PwRecord::from_raw(&raw)
            .map_err(|source| IoError::ProofWriter { path: path.to_path_buf(), line: i + 1, source })?;
        out.push(rec);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_version_check() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub/theory.json");
        let theory = symtree_core::kb::kinship::reference_theory();
        write_json(&path, &theory).unwrap();
        assert_eq!(read_theory(&path).unwrap(), theory);
        let mut bumped = theory.clone();
        bumped.version = 99;
        write_json(&path, &bumped).unwrap();
        assert!(matches!(read_theory(&path), Err(IoError::Version { found: 99, .. })));
    }

    #[test]
    fn jsonl_errors_name_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("shard.jsonl");
        fs::write(&path, "\n{not json}\n").unwrap();
        let err = read_proofwriter(&path).unwrap_err();
        assert!(matches!(err, IoError::JsonLine { line: 2, .. }), "{err}");
        assert!(err.to_string().contains("shard.jsonl:2:"));
    }
}
