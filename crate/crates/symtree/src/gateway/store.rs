use std::fs;
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{ChatRequest, GatewayError};

pub const TRANSCRIPT_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub version: u32,
    pub fingerprint: String,
    pub model: String,
    /// Seconds since the Unix epoch when the response was received.
    pub created: u64,
    pub request: ChatRequest,
    pub response: String,
}

impl Transcript {
    pub fn new(request: &ChatRequest, response: String, created: u64) -> Self {
        Transcript {
            version: TRANSCRIPT_FORMAT_VERSION,
            fingerprint: request.fingerprint(),
            model: request.model.clone(),
            created,
            request: request.clone(),
            response,
        }
    }
}

/// A directory of `<aa>/<fingerprint>.json` files. Writes go through a temp
/// file and a no-clobber rename, so concurrent writers never corrupt or
/// duplicate an entry.
#[derive(Debug, Clone)]
pub struct TranscriptStore {
    root: PathBuf,
}

fn store_err(e: impl std::fmt::Display) -> GatewayError {
    GatewayError::Store(e.to_string())
}

impl TranscriptStore {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, GatewayError> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|e| store_err(format!("{}: {e}", root.display())))?;
        Ok(TranscriptStore { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn path(&self, fingerprint: &str) -> Result<PathBuf, GatewayError> {
        if fingerprint.len() < 3 || !fingerprint.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(store_err(format!("bad fingerprint {fingerprint:?}")));
        }
        Ok(self.root.join(&fingerprint[..2]).join(format!("{fingerprint}.json")))
    }

    pub fn get(&self, fingerprint: &str) -> Result<Option<Transcript>, GatewayError> {
        let path = self.path(fingerprint)?;
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(store_err(format!("{}: {e}", path.display()))),
        };
        let t: Transcript = serde_json::from_slice(&bytes).map_err(|e| store_err(format!("{}: {e}", path.display())))?;
        if t.fingerprint != fingerprint {
            return Err(store_err(format!("{} holds fingerprint {}", path.display(), t.fingerprint)));
        }
        Ok(Some(t))
    }

    /// Stores `t` unless an entry already exists; returns whether it was written.
    pub fn put(&self, t: &Transcript) -> Result<bool, GatewayError> {
        let path = self.path(&t.fingerprint)?;
        if path.exists() {
            return Ok(false);
        }
        let dir = path.parent().expect("sharded path has a parent");
        fs::create_dir_all(dir).map_err(store_err)?;
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(store_err)?;
        let json = serde_json::to_vec_pretty(t).map_err(store_err)?;
        tmp.write_all(&json).map_err(store_err)?;
        tmp.as_file().sync_all().map_err(store_err)?;
        match tmp.persist_noclobber(&path) {
            Ok(_) => Ok(true),
            Err(e) if e.error.kind() == ErrorKind::AlreadyExists => Ok(false),
            Err(e) => Err(store_err(e.error)),
        }
    }

    /// All stored fingerprints, sorted.
    pub fn fingerprints(&self) -> Result<Vec<String>, GatewayError> {
        let mut out = Vec::new();
        for shard in fs::read_dir(&self.root).map_err(store_err)? {
            let shard = shard.map_err(store_err)?;
            if !shard.file_type().map_err(store_err)?.is_dir() {
                continue;
            }
            for entry in fs::read_dir(shard.path()).map_err(store_err)? {
                let name = entry.map_err(store_err)?.file_name();
                if let Some(fp) = name.to_str().and_then(|n| n.strip_suffix(".json")) {
                    out.push(fp.to_string());
                }
            }
        }
        out.sort();
        Ok(out)
    }
}
