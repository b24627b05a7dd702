//! Dataset manifest: the versioned JSON index over synthesized samples.

use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::SynthConfig;
use crate::error::{CoreContext, Result, SynthError};

pub const MANIFEST_VERSION: &str = "1";
pub const MANIFEST_FILE: &str = "manifest.json";

/// File encodings used by every sample, recorded for downstream readers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Encodings {
    pub images: String,
    pub maps: String,
    pub masks: String,
    pub high: String,
    pub depth: String,
}

impl Default for Encodings {
    fn default() -> Self {
        Self {
            images: "8-bit RGB PNG, stored values are the working domain (v = byte / 255)".into(),
            maps: "8-bit grayscale PNG, byte = round_half_up(255 v)".into(),
            masks: "8-bit grayscale PNG, 0 or 255".into(),
            high: "8-bit RGB PNG, byte = round_half_up((h + 1) / 2 * 255)".into(),
            depth: "copy of the source depth file".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapPaths {
    pub m_s: String,
    pub m_d: String,
    pub a: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub low: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub high: Option<String>,
}

/// Input files a sample was built from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceInputs {
    pub clean: PathBuf,
    pub depth: PathBuf,
    #[serde(default)]
    pub cover: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSample {
    pub id: String,
    pub seed: u64,
    /// Paths below are relative to the manifest directory.
    pub rainy: String,
    pub clean: String,
    pub depth: String,
    pub maps: MapPaths,
    /// Full parameter snapshot; with `source` it regenerates the sample.
    pub params: SynthConfig,
    pub source: SourceInputs,
    /// SHA-256 of every emitted file, keyed by relative path.
    pub hashes: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitSets {
    pub group_size: usize,
    pub per_group_train: usize,
    pub per_group_test: usize,
    pub seed: u64,
    pub train: Vec<String>,
    pub test: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub version: String,
    pub base_seed: u64,
    /// Resolved configuration the build started from.
    pub config: SynthConfig,
    #[serde(default)]
    pub encodings: Encodings,
    pub samples: Vec<DatasetSample>,
    #[serde(default)]
    pub groups: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub split: Option<SplitSets>,
}

impl Manifest {
    pub fn new(base_seed: u64, config: SynthConfig, samples: Vec<DatasetSample>) -> Self {
        Self {
            version: MANIFEST_VERSION.into(),
            base_seed,
            config,
            encodings: Encodings::default(),
            samples,
            groups: BTreeMap::new(),
            split: None,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| SynthError::io(path, e))?;
        let manifest: Manifest =
            serde_json::from_str(&text).map_err(|source| SynthError::Json {
                path: path.to_path_buf(),
                source,
            })?;
        if manifest.version != MANIFEST_VERSION {
            return Err(SynthError::format(
                path,
                format!("manifest version {:?} is not supported", manifest.version),
            ));
        }
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self).map_err(|source| SynthError::Json {
            path: path.to_path_buf(),
            source,
        })?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| SynthError::io(path, e))
    }

    /// Checks id uniqueness, split disjointness and that every grouped or
    /// split id names a sample.
    pub fn validate(&self) -> Result<()> {
        let mut ids = HashSet::with_capacity(self.samples.len());
        for s in &self.samples {
            if !ids.insert(s.id.as_str()) {
                return Err(SynthError::Data(format!("duplicate sample id {:?}", s.id)));
            }
        }
        let unknown = |id: &String| -> Result<()> {
            if ids.contains(id.as_str()) {
                Ok(())
            } else {
                Err(SynthError::Data(format!("unknown sample id {id:?}")))
            }
        };
        for members in self.groups.values() {
            members.iter().try_for_each(unknown)?;
        }
        if let Some(split) = &self.split {
            split
                .train
                .iter()
                .chain(&split.test)
                .try_for_each(unknown)?;
            let train: HashSet<&String> = split.train.iter().collect();
            if let Some(id) = split.test.iter().find(|id| train.contains(id)) {
                return Err(SynthError::Data(format!(
                    "{id:?} is in both train and test"
                )));
            }
        }
        Ok(())
    }

    /// Groups samples in manifest order into consecutive blocks of
    /// `group_size` and draws the per-group train/test members.
    pub fn apply_split(
        &mut self,
        group_size: usize,
        per_group_train: usize,
        per_group_test: usize,
        seed: u64,
    ) -> Result<()> {
        let split = mor_core::split_groups(
            self.samples.len(),
            group_size,
            per_group_train,
            per_group_test,
            seed,
        )
        .context("split")?;
        let id = |i: &usize| self.samples[*i].id.clone();
        let width = split.groups.len().to_string().len().max(4);
        self.groups = split
            .groups
            .iter()
            .enumerate()
            .map(|(g, range)| {
                (
                    format!("g{g:0width$}"),
                    range.clone().map(|i| id(&i)).collect(),
                )
            })
            .collect();
        self.split = Some(SplitSets {
            group_size,
            per_group_train,
            per_group_test,
            seed,
            train: split.train.iter().map(id).collect(),
            test: split.test.iter().map(id).collect(),
        });
        Ok(())
    }
}
