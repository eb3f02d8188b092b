//! Versioned store snapshots with a checksum manifest beside them.
//!
//! `store.json` holds `{"format_version": 1, "store": {...}}`; the sidecar
//! `store.json.manifest.json` records the version, the SHA-256 of the
//! snapshot bytes and their length.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::store::{sha256_hex, Store};

pub const SNAPSHOT_FORMAT_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("snapshot format version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u64, expected: u64 },
    #[error("snapshot checksum {actual} does not match manifest {expected}")]
    ChecksumMismatch { expected: String, actual: String },
    #[error("malformed snapshot: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u64,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Serialize)]
struct SnapshotOut<'a> {
    format_version: u64,
    store: &'a Store,
}

#[derive(Deserialize)]
struct SnapshotIn {
    format_version: u64,
    store: Store,
}

#[derive(Deserialize)]
struct VersionProbe {
    format_version: u64,
}

pub fn manifest_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> SnapshotError + '_ {
    move |source| SnapshotError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Deterministic snapshot bytes: identical stores give identical bytes.
pub fn to_bytes(store: &Store) -> Vec<u8> {
    let mut bytes = serde_json::to_vec(&SnapshotOut {
        format_version: SNAPSHOT_FORMAT_VERSION,
        store,
    })
    .expect("store serializes");
    bytes.push(b'\n');
    bytes
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), SnapshotError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

/// Writes the snapshot and its manifest, returning the checksum.
pub fn save_snapshot(store: &Store, path: &Path) -> Result<String, SnapshotError> {
    let bytes = to_bytes(store);
    let manifest = Manifest {
        format_version: SNAPSHOT_FORMAT_VERSION,
        sha256: sha256_hex(&bytes),
        bytes: bytes.len() as u64,
    };
    write_atomic(path, &bytes)?;
    let mut manifest_bytes = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    manifest_bytes.push(b'\n');
    write_atomic(&manifest_path(path), &manifest_bytes)?;
    Ok(manifest.sha256)
}

pub fn read_manifest(path: &Path) -> Result<Manifest, SnapshotError> {
    let mpath = manifest_path(path);
    let raw = fs::read(&mpath).map_err(io_err(&mpath))?;
    serde_json::from_slice(&raw).map_err(|e| SnapshotError::Malformed(format!("manifest: {e}")))
}

/// Loads a snapshot. The version is checked before the checksum so that a
/// file from another format version reports as such.
pub fn load_snapshot(path: &Path) -> Result<Store, SnapshotError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    let manifest = read_manifest(path)?;
    let probe: VersionProbe = serde_json::from_slice(&bytes).map_err(|e| SnapshotError::Malformed(e.to_string()))?;
    for found in [probe.format_version, manifest.format_version] {
        if found != SNAPSHOT_FORMAT_VERSION {
            return Err(SnapshotError::VersionMismatch {
                found,
                expected: SNAPSHOT_FORMAT_VERSION,
            });
        }
    }
    let actual = sha256_hex(&bytes);
    if actual != manifest.sha256 {
        return Err(SnapshotError::ChecksumMismatch {
            expected: manifest.sha256,
            actual,
        });
    }
    let snapshot: SnapshotIn = serde_json::from_slice(&bytes).map_err(|e| SnapshotError::Malformed(e.to_string()))?;
    debug_assert_eq!(snapshot.format_version, SNAPSHOT_FORMAT_VERSION);
    Ok(snapshot.store)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{AnnotatedAssay, AnnotatedStatement, ParsedCorpus};
    use crate::ntriples::DEFAULT_BASE_URI;

    fn store() -> Store {
        let mut s = Store::new();
        s.ingest(ParsedCorpus {
            assays: vec![AnnotatedAssay {
                id: "AID1".into(),
                title: Some("t".into()),
                text: "luciferase".into(),
                statements: vec![AnnotatedStatement::new("has assay format", "cell-based format")],
                assay_type: None,
                assay_format: None,
            }],
            warnings: vec![],
        })
        .unwrap();
        s.submit_assay(None, "some text").unwrap();
        s
    }

    #[test]
    fn round_trip_is_bit_stable() {
        let dir = tempfile::tempdir().unwrap();
        let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
        let s = store();
        let sum = save_snapshot(&s, &a).unwrap();
        let loaded = load_snapshot(&a).unwrap();
        assert_eq!(loaded, s);
        assert_eq!(save_snapshot(&loaded, &b).unwrap(), sum);
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
        assert_eq!(
            loaded.export_ntriples(DEFAULT_BASE_URI).unwrap(),
            s.export_ntriples(DEFAULT_BASE_URI).unwrap()
        );
    }

    #[test]
    fn bumped_version_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.json");
        save_snapshot(&store(), &p).unwrap();
        let text = fs::read_to_string(&p).unwrap().replacen("\"format_version\":1", "\"format_version\":2", 1);
        fs::write(&p, text).unwrap();
        assert!(matches!(
            load_snapshot(&p),
            Err(SnapshotError::VersionMismatch { found: 2, expected: 1 })
        ));
    }

    #[test]
    fn tampering_detected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.json");
        save_snapshot(&store(), &p).unwrap();
        let text = fs::read_to_string(&p).unwrap().replace("some text", "other text");
        fs::write(&p, text).unwrap();
        assert!(matches!(load_snapshot(&p), Err(SnapshotError::ChecksumMismatch { .. })));
    }

    #[test]
    fn missing_files_are_io_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("none.json");
        assert!(matches!(load_snapshot(&p), Err(SnapshotError::Io { .. })));
        fs::write(&p, "{}").unwrap();
        assert!(matches!(load_snapshot(&p), Err(SnapshotError::Io { .. })));
    }
}
