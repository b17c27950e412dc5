//! Pipeline configuration: one JSON document with every knob of the
//! spotting and recognition paths, embedded defaults, and validation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classify::Protocol;
use crate::error::{Error, Result};
use crate::features::{CuboidPartition, DescriptorKind, GlobalNorm, LbpParams, PlaneCombination};
use crate::magnify::MagnifyParams;
use crate::spotting::SpotParams;
use crate::tim::DEFAULT_TIM_LEN;

/// Descriptor settings for the recognition path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DescriptorConfig {
    pub kind: DescriptorKind,
    pub partition: CuboidPartition,
    pub combo: PlaneCombination,
    /// Neighborhood parameters when `kind` is `lbp`.
    pub lbp: LbpParams,
    /// Orientation bins for gradient descriptors.
    pub bins: usize,
    pub global_norm: GlobalNorm,
}

impl Default for DescriptorConfig {
    fn default() -> Self {
        DescriptorConfig {
            kind: DescriptorKind::Higo,
            partition: CuboidPartition::new(6, 6, 2),
            combo: PlaneCombination::XyOt,
            lbp: LbpParams {
                p: 8,
                r: 2.0,
                uniform: true,
            },
            bins: 8,
            global_norm: GlobalNorm::L2,
        }
    }
}

/// Classifier settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    pub standardize: bool,
    pub protocol: Protocol,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            standardize: true,
            protocol: Protocol::LeaveOneSubjectOut,
        }
    }
}

/// The full pipeline configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct PipelineConfig {
    pub spot: SpotParams,
    pub magnify: MagnifyParams,
    /// Interpolated clip length; `null` disables interpolation.
    pub tim_len: Option<usize>,
    pub descriptor: DescriptorConfig,
    pub classifier: ClassifierConfig,
    /// Model-face landmark file; `null` selects the built-in model.
    pub model_landmarks: Option<PathBuf>,
    pub seed: u64,
}

impl PipelineConfig {
    /// The fixed configuration of the combined system: magnification 4,
    /// interpolation to 10 frames, unweighted temporal-plane gradients,
    /// spotting threshold fraction 0.15.
    pub fn standard() -> Self {
        PipelineConfig {
            spot: SpotParams::default(),
            magnify: MagnifyParams::default(),
            tim_len: Some(DEFAULT_TIM_LEN),
            descriptor: DescriptorConfig::default(),
            classifier: ClassifierConfig::default(),
            model_landmarks: None,
            seed: 7,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.spot.validate()?;
        self.magnify.validate()?;
        self.descriptor.partition.validate()?;
        self.descriptor.lbp.validate()?;
        if self.descriptor.bins == 0 {
            return Err(Error::Validation("descriptor bins must be positive".into()));
        }
        if self.descriptor.kind == DescriptorKind::Hoof {
            return Err(Error::Validation(format!(
                "flow histograms are a spotting feature; plane combination {} cannot apply to them",
                self.descriptor.combo
            )));
        }
        if let Some(len) = self.tim_len {
            if len < 2 {
                return Err(Error::Validation(format!(
                    "interpolation length must be at least 2, got {len}"
                )));
            }
        }
        if let Some(path) = &self.model_landmarks {
            if !path.exists() {
                return Err(Error::Validation(format!(
                    "model landmark file {} does not exist",
                    path.display()
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}
