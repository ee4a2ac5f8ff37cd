//! On-disk study store: ingested snapshots, a manifest of input hashes,
//! analysis artifacts and the similarity cache.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use catchscope::analysis::SimilarityMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::InputError;

pub const SNAPSHOTS: &str = "snapshots.csv";
pub const MANIFEST: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    /// Input settings the store was built with.
    pub settings: String,
    /// Input path -> sha256.
    pub inputs: BTreeMap<String, String>,
    pub snapshots_sha256: String,
    pub snapshot_count: usize,
}

pub struct Store {
    root: PathBuf,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Writes through a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp"));
    {
        let mut f =
            std::fs::File::create(&tmp).with_context(|| format!("writing {}", tmp.display()))?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct CachedMatrix {
    times: Vec<i64>,
    values: Vec<f64>,
}

impl Store {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Store { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path(&self, rel: &str) -> PathBuf {
        self.root.join(rel)
    }

    pub fn manifest(&self) -> anyhow::Result<Option<Manifest>> {
        let path = self.path(MANIFEST);
        if !path.exists() {
            return Ok(None);
        }
        let text = std::fs::read_to_string(&path)?;
        Ok(Some(
            serde_json::from_str(&text).with_context(|| format!("corrupt {}", path.display()))?,
        ))
    }

    /// Manifest of a populated store, or an input error telling the user to
    /// ingest first.
    pub fn require_manifest(&self) -> anyhow::Result<Manifest> {
        match self.manifest()? {
            Some(m) if self.path(SNAPSHOTS).exists() => Ok(m),
            _ => Err(InputError(format!(
                "store {} is empty; run `catchscope ingest` first",
                self.root.display()
            ))
            .into()),
        }
    }

    pub fn write_manifest(&self, manifest: &Manifest) -> anyhow::Result<()> {
        let mut text = serde_json::to_string_pretty(manifest)?;
        text.push('\n');
        write_atomic(&self.path(MANIFEST), text.as_bytes())
    }

    fn cache_path(&self, key: &str) -> PathBuf {
        self.root
            .join("cache")
            .join(format!("similarity-{key}.json"))
    }

    pub fn cached_matrix(&self, key: &str) -> anyhow::Result<Option<SimilarityMatrix>> {
        let path = self.cache_path(key);
        if !path.exists() {
            return Ok(None);
        }
        let cached: CachedMatrix = serde_json::from_str(&std::fs::read_to_string(&path)?)
            .with_context(|| format!("corrupt cache {}", path.display()))?;
        Ok(Some(SimilarityMatrix::new(cached.times, cached.values)?))
    }

    pub fn put_matrix(&self, key: &str, matrix: &SimilarityMatrix) -> anyhow::Result<()> {
        let cached = CachedMatrix {
            times: matrix.times().to_vec(),
            values: matrix.values().to_vec(),
        };
        write_atomic(
            &self.cache_path(key),
            serde_json::to_string(&cached)?.as_bytes(),
        )
    }
}
