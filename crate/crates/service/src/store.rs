//! Saved scenarios in a single JSON-lines file.
//!
//! Every mutation rewrites the whole file to a sibling temporary and renames
//! it over the original, so a crash leaves either the old or the new file.
//! Writers are serialized by the index's write lock; readers share it.

use std::collections::HashMap;
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use chrono::{DateTime, Duration, SubsecRound, Utc};
use pensionlab_core::{EmployeeProfile, Overrides};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use uuid::Uuid;

pub const MAX_NAME_LEN: usize = 120;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SavedScenario {
    pub id: String,
    pub name: String,
    pub profile: EmployeeProfile,
    #[serde(default)]
    pub overrides: Overrides,
    pub created_at: DateTime<Utc>,
    pub updated_at: DateTime<Utc>,
}

/// Body of a create request.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewScenario {
    pub name: String,
    pub profile: EmployeeProfile,
    #[serde(default)]
    pub overrides: Overrides,
}

/// Body of an update request. `expected_updated_at` must equal the stored
/// `updated_at`, otherwise the update is stale.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioUpdate {
    pub name: String,
    pub profile: EmployeeProfile,
    #[serde(default)]
    pub overrides: Overrides,
    pub expected_updated_at: DateTime<Utc>,
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("scenario `{0}` not found")]
    NotFound(String),
    #[error("scenario `{id}` was updated at {current}, not {expected}")]
    Stale {
        id: String,
        expected: DateTime<Utc>,
        current: DateTime<Utc>,
    },
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },
    #[error("{path}: line {line}: {source}")]
    Corrupt {
        path: PathBuf,
        line: usize,
        source: serde_json::Error,
    },
    #[error("scenario store I/O: {0}")]
    Io(#[from] io::Error),
}

pub struct ScenarioStore {
    path: PathBuf,
    index: RwLock<HashMap<String, SavedScenario>>,
}

fn validate_name(name: &str) -> Result<(), StoreError> {
    if name.trim().is_empty() {
        return Err(StoreError::Invalid {
            field: "name",
            reason: "must not be empty".into(),
        });
    }
    if name.chars().count() > MAX_NAME_LEN {
        return Err(StoreError::Invalid {
            field: "name",
            reason: format!("longer than {MAX_NAME_LEN} characters"),
        });
    }
    Ok(())
}

fn validate_profile(profile: &EmployeeProfile, overrides: &Overrides) -> Result<(), StoreError> {
    profile
        .validate()
        .and_then(|_| overrides.validate())
        .map_err(|e| StoreError::Invalid {
            field: "profile",
            reason: e.to_string(),
        })
}

/// Microsecond clock, strictly after every stamp already in the index so
/// ordering and preconditions never see ties.
fn next_stamp(index: &HashMap<String, SavedScenario>) -> DateTime<Utc> {
    let ts = Utc::now().trunc_subsecs(6);
    match index.values().map(|s| s.updated_at).max() {
        Some(latest) => ts.max(latest + Duration::microseconds(1)),
        None => ts,
    }
}

impl ScenarioStore {
    /// Opens the store, loading `path` if it exists.
    pub fn open(path: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let path = path.into();
        let mut index = HashMap::new();
        match File::open(&path) {
            Ok(f) => {
                for (i, line) in BufReader::new(f).lines().enumerate() {
                    let line = line?;
                    if line.trim().is_empty() {
                        continue;
                    }
                    let s: SavedScenario =
                        serde_json::from_str(&line).map_err(|source| StoreError::Corrupt {
                            path: path.clone(),
                            line: i + 1,
                            source,
                        })?;
                    index.insert(s.id.clone(), s);
                }
            }
            Err(e) if e.kind() == io::ErrorKind::NotFound => {}
            Err(e) => return Err(e.into()),
        }
        Ok(ScenarioStore {
            path,
            index: RwLock::new(index),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Most recently updated first.
    pub fn list(&self) -> Vec<SavedScenario> {
        let mut all: Vec<_> = self.index.read().unwrap().values().cloned().collect();
        all.sort_by(|a, b| {
            b.updated_at
                .cmp(&a.updated_at)
                .then_with(|| a.id.cmp(&b.id))
        });
        all
    }

    pub fn get(&self, id: &str) -> Result<SavedScenario, StoreError> {
        self.index
            .read()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| StoreError::NotFound(id.to_string()))
    }

    pub fn create(&self, new: NewScenario) -> Result<SavedScenario, StoreError> {
        validate_name(&new.name)?;
        validate_profile(&new.profile, &new.overrides)?;
        let mut index = self.index.write().unwrap();
        let ts = next_stamp(&index);
        let scenario = SavedScenario {
            id: Uuid::new_v4().simple().to_string(),
            name: new.name,
            profile: new.profile,
            overrides: new.overrides,
            created_at: ts,
            updated_at: ts,
        };
        index.insert(scenario.id.clone(), scenario.clone());
        if let Err(e) = self.persist(&index) {
            index.remove(&scenario.id);
            return Err(e);
        }
        Ok(scenario)
    }

    pub fn update(&self, id: &str, update: ScenarioUpdate) -> Result<SavedScenario, StoreError> {
        validate_name(&update.name)?;
        validate_profile(&update.profile, &update.overrides)?;
        let mut index = self.index.write().unwrap();
        let previous = index
            .get(id)
            .cloned()
            .ok_or_else(|| StoreError::NotFound(id.to_string()))?;
        if previous.updated_at != update.expected_updated_at {
            return Err(StoreError::Stale {
                id: id.to_string(),
                expected: update.expected_updated_at,
                current: previous.updated_at,
            });
        }
        let ts = next_stamp(&index);
        let scenario = SavedScenario {
            name: update.name,
            profile: update.profile,
            overrides: update.overrides,
            updated_at: ts,
            ..previous.clone()
        };
        index.insert(id.to_string(), scenario.clone());
        if let Err(e) = self.persist(&index) {
            index.insert(id.to_string(), previous);
            return Err(e);
        }
        Ok(scenario)
    }

    pub fn delete(&self, id: &str) -> Result<(), StoreError> {
        let mut index = self.index.write().unwrap();
        let removed = index
            .remove(id)
            .ok_or_else(|| StoreError::NotFound(id.to_string()))?;
        if let Err(e) = self.persist(&index) {
            index.insert(id.to_string(), removed);
            return Err(e);
        }
        Ok(())
    }

    fn persist(&self, index: &HashMap<String, SavedScenario>) -> Result<(), StoreError> {
        let mut records: Vec<_> = index.values().collect();
        records.sort_by(|a, b| {
            a.created_at
                .cmp(&b.created_at)
                .then_with(|| a.id.cmp(&b.id))
        });
        let dir = match self.path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        fs::create_dir_all(&dir)?;
        let file_name = self
            .path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "scenarios.jsonl".into());
        let tmp = dir.join(format!(".{file_name}.{}.tmp", Uuid::new_v4().simple()));
        let mut f = File::create(&tmp)?;
        for r in records {
            serde_json::to_writer(&mut f, r).map_err(io::Error::other)?;
            f.write_all(b"\n")?;
        }
        f.sync_all()?;
        drop(f);
        if let Err(e) = fs::rename(&tmp, &self.path) {
            let _ = fs::remove_file(&tmp);
            return Err(e.into());
        }
        Ok(())
    }
}
