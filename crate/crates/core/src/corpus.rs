//! The corpus manifest: which `.pv` files should check, and where the
//! others are expected to fail.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::driver::{Options, Session};
use crate::report::FileReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExpectedStatus {
    AllOk,
    FailsAt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailsAt {
    /// Name of the failing command.
    pub command: String,
    /// Error kind reported for it.
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusEntry {
    /// Relative to the manifest's directory.
    pub path: String,
    pub expected_status: ExpectedStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fails_at: Option<FailsAt>,
    #[serde(default)]
    pub description: String,
}

/// What a report says about a file, in manifest terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Observed {
    AllOk,
    FailsAt(FailsAt),
}

impl Observed {
    pub fn of(report: &FileReport) -> Observed {
        match report.first_error() {
            None => Observed::AllOk,
            Some(c) => Observed::FailsAt(FailsAt {
                command: c.name.clone().unwrap_or_default(),
                error: c.error.as_ref().map(|e| e.kind.clone()).unwrap_or_default(),
            }),
        }
    }
}

impl CorpusEntry {
    pub fn expected(&self) -> Observed {
        match (self.expected_status, &self.fails_at) {
            (ExpectedStatus::FailsAt, Some(f)) => Observed::FailsAt(f.clone()),
            _ => Observed::AllOk,
        }
    }
}

pub struct Manifest {
    pub dir: PathBuf,
    pub entries: Vec<CorpusEntry>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Manifest, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let entries = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(Manifest { dir, entries })
    }

    /// Checks one entry in a fresh session.
    pub fn run(&self, entry: &CorpusEntry, options: &Options) -> Result<FileReport, String> {
        let mut session = Session::new(options.clone());
        session.check_file(&self.dir.join(&entry.path)).map_err(|e| e.to_string())
    }

    /// Checks every entry, returning one line per mismatch.
    pub fn mismatches(&self, options: &Options) -> Vec<String> {
        let mut out = Vec::new();
        for entry in &self.entries {
            match self.run(entry, options) {
                Ok(report) => {
                    let observed = Observed::of(&report);
                    if observed != entry.expected() {
                        out.push(format!("{}: expected {:?}, got {:?}", entry.path, entry.expected(), observed));
                    }
                }
                Err(e) => out.push(e),
            }
        }
        out
    }
}
