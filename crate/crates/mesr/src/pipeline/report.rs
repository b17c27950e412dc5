//! Machine-first run reports (JSON plus ROC/sweep CSV files). All
//! serialization is deterministic: struct field order is fixed and
//! collections are sorted by clip id.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spotting::{RocPoint, SpotScore};

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Per-sequence spotting entry; peaks are 1-based frame numbers to match
/// the ground-truth CSV convention.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceEntry {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frames: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    #[serde(default)]
    pub peaks: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Report of a spotting run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpotRunReport {
    pub feature: String,
    pub window_seconds: f64,
    pub m_top: usize,
    pub tau: f64,
    /// Sequences that produced a signal.
    pub n: usize,
    pub auc: f64,
    pub score_at_tau: SpotScore,
    pub roc: Vec<RocPoint>,
    pub sequences: Vec<SequenceEntry>,
}

impl SpotRunReport {
    /// Writes `spot.json`, `roc.csv` and the summary `roc.json`.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_json(dir.join("spot.json"), self)?;

        let mut csv = String::from("tau,tpr,fpr\n");
        for p in &self.roc {
            csv.push_str(&format!("{},{},{}\n", p.tau, p.tpr, p.fpr));
        }
        let csv_path = dir.join("roc.csv");
        std::fs::write(&csv_path, csv).map_err(|e| Error::io(csv_path, e))?;

        #[derive(Serialize)]
        struct Summary<'a> {
            auc: f64,
            n: usize,
            feature: &'a str,
            params: SummaryParams,
        }
        #[derive(Serialize)]
        struct SummaryParams {
            window_seconds: f64,
            m_top: usize,
        }
        write_json(
            dir.join("roc.json"),
            &Summary {
                auc: self.auc,
                n: self.n,
                feature: &self.feature,
                params: SummaryParams {
                    window_seconds: self.window_seconds,
                    m_top: self.m_top,
                },
            },
        )
    }
}

/// Report of a recognition run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecognitionReport {
    pub accuracy: f64,
    pub correct: usize,
    pub total: usize,
    pub classes: Vec<String>,
    pub confusion: Vec<Vec<usize>>,
    pub per_subject: Vec<(String, usize, usize)>,
    pub rounds: usize,
    pub alpha: f64,
    pub tim_len: Option<usize>,
    pub descriptor: String,
    pub warnings: Vec<String>,
    pub errors: Vec<SequenceEntry>,
}

impl RecognitionReport {
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_json(dir.join("recognition.json"), self)
    }
}

/// One spotted-and-classified peak of the combined run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MesrPeak {
    /// 1-based frame number.
    pub peak: usize,
    pub matched: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truth: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MesrSequenceEntry {
    pub id: String,
    pub subject: String,
    pub peaks: Vec<MesrPeak>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Report of the combined spot-then-recognize run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MesrReport {
    pub tau: f64,
    pub spotting: SpotScore,
    /// Classification accuracy over correctly spotted intervals.
    pub recognition_accuracy: f64,
    pub recognized: usize,
    pub true_spots: usize,
    /// `spotting.tpr * recognition_accuracy`.
    pub overall: f64,
    pub sequences: Vec<MesrSequenceEntry>,
    pub warnings: Vec<String>,
}

impl MesrReport {
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_json(dir.join("mesr.json"), self)
    }
}

/// One point of a parameter sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub setting: String,
    pub accuracy: f64,
}

/// Report of an `eval` sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSweepReport {
    pub sweep: String,
    pub points: Vec<SweepPoint>,
}

impl EvalSweepReport {
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_json(dir.join(format!("eval_{}.json", self.sweep)), self)?;
        let mut csv = String::from("setting,accuracy\n");
        for p in &self.points {
            csv.push_str(&format!("{},{}\n", p.setting, p.accuracy));
        }
        let path = dir.join(format!("eval_{}.csv", self.sweep));
        std::fs::write(&path, csv).map_err(|e| Error::io(path, e))
    }
}
