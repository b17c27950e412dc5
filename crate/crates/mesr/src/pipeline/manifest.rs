//! Dataset manifests: a JSON array of clip records with paths resolved
//! relative to the manifest file.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One clip of a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClipRecord {
    pub id: String,
    /// Directory of `frame_%06d.pgm` files.
    pub dir: PathBuf,
    pub fps: f64,
    pub subject: String,
    /// Spotting anchor CSV.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchors: Option<PathBuf>,
    /// Frame-1 landmark CSV for registration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub landmarks: Option<PathBuf>,
    /// Emotion class, when the clip itself is a labeled example.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Ground-truth CSV holding this sequence's annotated intervals.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_truth: Option<PathBuf>,
}

/// A loaded manifest with its base directory.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    pub clips: Vec<ClipRecord>,
    root: PathBuf,
}

impl DatasetManifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let clips: Vec<ClipRecord> = serde_json::from_str(&text)?;
        let root = path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."));
        let manifest = DatasetManifest { clips, root };
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut text = serde_json::to_string_pretty(&self.clips)?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn from_clips(clips: Vec<ClipRecord>, root: impl Into<PathBuf>) -> Result<Self> {
        let manifest = DatasetManifest {
            clips,
            root: root.into(),
        };
        manifest.validate()?;
        Ok(manifest)
    }

    fn validate(&self) -> Result<()> {
        if self.clips.is_empty() {
            return Err(Error::Validation("no sequences in manifest".into()));
        }
        let mut seen = BTreeSet::new();
        for clip in &self.clips {
            if clip.id.is_empty() {
                return Err(Error::Validation("clip with empty id".into()));
            }
            if clip.subject.is_empty() {
                return Err(Error::Validation(format!(
                    "clip {}: empty subject",
                    clip.id
                )));
            }
            if !(clip.fps > 0.0) {
                return Err(Error::Validation(format!("clip {}: bad fps", clip.id)));
            }
            if !seen.insert(&clip.id) {
                return Err(Error::Validation(format!("duplicate clip id {}", clip.id)));
            }
        }
        Ok(())
    }

    /// Resolves a manifest-relative path.
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.root.join(p)
        }
    }

    /// Distinct ground-truth files referenced by the clips.
    pub fn ground_truth_files(&self) -> Vec<PathBuf> {
        let mut set = BTreeSet::new();
        for clip in &self.clips {
            if let Some(gt) = &clip.ground_truth {
                set.insert(self.resolve(gt));
            }
        }
        set.into_iter().collect()
    }
}
