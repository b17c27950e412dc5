//! Frame-based spotting evaluation: TPR/FPR against ground-truth
//! intervals, ROC curves over a threshold sweep, and AUC.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spotting::{detect_peaks, SpotResult, WindowSpec};

/// One annotated motion interval, frame indices 0-based inclusive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GtInterval {
    pub onset: usize,
    pub offset: usize,
    pub label: String,
}

impl GtInterval {
    /// Number of annotated frames, onset and offset inclusive.
    pub fn frame_count(&self) -> usize {
        self.offset - self.onset + 1
    }

    /// Whether a peak falls inside the match window
    /// `[onset - (N-1)/4, offset + (N-1)/4]` (exact rational comparison).
    pub fn matches(&self, peak: usize, window: WindowSpec) -> bool {
        let p = peak as i64 * 4;
        let slack = (window.n - 1) as i64;
        p >= self.onset as i64 * 4 - slack && p <= self.offset as i64 * 4 + slack
    }
}

/// Ground-truth intervals per sequence id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GroundTruth(BTreeMap<String, Vec<GtInterval>>);

impl GroundTruth {
    pub fn new() -> Self {
        GroundTruth(BTreeMap::new())
    }

    /// Inserts an interval, keeping each sequence's list sorted by onset.
    pub fn insert(&mut self, id: impl Into<String>, interval: GtInterval) {
        let list = self.0.entry(id.into()).or_default();
        let pos = list.partition_point(|iv| iv.onset <= interval.onset);
        list.insert(pos, interval);
    }

    /// Checks that no sequence's intervals overlap each other.
    pub fn validate_disjoint(&self) -> Result<()> {
        for (id, intervals) in &self.0 {
            for w in intervals.windows(2) {
                if w[1].onset <= w[0].offset {
                    return Err(Error::Validation(format!(
                        "sequence {id}: intervals {}..{} and {}..{} overlap",
                        w[0].onset + 1,
                        w[0].offset + 1,
                        w[1].onset + 1,
                        w[1].offset + 1
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&[GtInterval]> {
        self.0.get(id).map(|v| v.as_slice())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sequences(&self) -> impl Iterator<Item = (&String, &Vec<GtInterval>)> {
        self.0.iter()
    }
}

/// Reads `sequence_id,onset,offset,label` rows; onset/offset are 1-based
/// in the file. A header line is skipped.
pub fn read_ground_truth(path: impl AsRef<Path>) -> Result<GroundTruth> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut gt = GroundTruth::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                reason: format!("line {}: expected 4 fields", i + 1),
            });
        }
        let onset: usize = match fields[1].parse() {
            Ok(v) => v,
            Err(_) if i == 0 => continue, // header
            Err(_) => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    reason: format!("line {}: bad onset {:?}", i + 1, fields[1]),
                })
            }
        };
        let offset: usize = fields[2].parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            reason: format!("line {}: bad offset {:?}", i + 1, fields[2]),
        })?;
        if onset < 1 || offset < onset {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                reason: format!("line {}: need 1 <= onset <= offset", i + 1),
            });
        }
        gt.insert(
            fields[0],
            GtInterval {
                onset: onset - 1,
                offset: offset - 1,
                label: fields[3].to_string(),
            },
        );
    }
    gt.validate_disjoint().map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    Ok(gt)
}

/// Writes the ground-truth CSV with a header, converting to 1-based.
pub fn write_ground_truth(path: impl AsRef<Path>, gt: &GroundTruth) -> Result<()> {
    let path = path.as_ref();
    let mut body = String::from("sequence_id,onset,offset,label\n");
    for (id, intervals) in gt.sequences() {
        for iv in intervals {
            body.push_str(&format!(
                "{id},{},{},{}\n",
                iv.onset + 1,
                iv.offset + 1,
                iv.label
            ));
        }
    }
    std::fs::write(path, body).map_err(|e| Error::io(path, e))
}

/// Spotting output of one sequence, ready for evaluation.
#[derive(Debug, Clone)]
pub struct SequenceSpots {
    pub id: String,
    pub n_frames: usize,
    pub window: WindowSpec,
    pub peaks: Vec<usize>,
}

/// Aggregated frame-based score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpotScore {
    pub tpr: f64,
    pub fpr: f64,
    pub true_frames: usize,
    pub total_me_frames: usize,
    pub false_frames: usize,
    pub total_non_me_frames: usize,
    pub matched_intervals: usize,
    pub total_intervals: usize,
    pub false_peaks: usize,
}

/// Scores spotted peaks against ground truth.
///
/// A peak matching some interval's window marks that interval as spotted;
/// a spotted interval contributes its own length to the true frame count
/// exactly once. Every unmatched peak bills N false frames.
pub fn evaluate(results: &[SequenceSpots], truth: &GroundTruth) -> Result<SpotScore> {
    if truth.is_empty() {
        return Err(Error::Validation("empty ground truth".into()));
    }
    let mut true_frames = 0usize;
    let mut total_me = 0usize;
    let mut false_frames = 0usize;
    let mut total_non_me = 0usize;
    let mut matched_intervals = 0usize;
    let mut total_intervals = 0usize;
    let mut false_peaks = 0usize;

    for seq in results {
        let intervals = truth
            .get(&seq.id)
            .ok_or_else(|| Error::Validation(format!("no ground truth for sequence {}", seq.id)))?;
        let me: usize = intervals.iter().map(GtInterval::frame_count).sum();
        total_me += me;
        total_non_me += seq.n_frames.saturating_sub(me);
        total_intervals += intervals.len();

        let mut matched = vec![false; intervals.len()];
        for &peak in &seq.peaks {
            // credit the earliest-onset interval whose window contains it
            match intervals.iter().position(|iv| iv.matches(peak, seq.window)) {
                Some(j) => matched[j] = true,
                None => {
                    false_peaks += 1;
                    false_frames += seq.window.n;
                }
            }
        }
        for (j, hit) in matched.iter().enumerate() {
            if *hit {
                true_frames += intervals[j].frame_count();
                matched_intervals += 1;
            }
        }
    }

    if total_me == 0 {
        return Err(Error::Validation(
            "ground truth has no positive frames".into(),
        ));
    }
    let tpr = true_frames as f64 / total_me as f64;
    let fpr = if total_non_me == 0 {
        if false_frames > 0 {
            1.0
        } else {
            0.0
        }
    } else {
        (false_frames as f64 / total_non_me as f64).min(1.0)
    };
    Ok(SpotScore {
        tpr,
        fpr,
        true_frames,
        total_me_frames: total_me,
        false_frames,
        total_non_me_frames: total_non_me,
        matched_intervals,
        total_intervals,
        false_peaks,
    })
}

/// One ROC point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub tau: f64,
    pub tpr: f64,
    pub fpr: f64,
}

/// ROC curve over the threshold sweep plus its AUC.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub auc: f64,
}

/// The threshold sweep: 0 to 1 in steps of 0.05 (21 points).
pub fn tau_sweep() -> Vec<f64> {
    (0..=20).map(|i| i as f64 / 20.0).collect()
}

/// Contrasted difference signal of one sequence, for threshold sweeps.
#[derive(Debug, Clone)]
pub struct SequenceSeries {
    pub id: String,
    pub n_frames: usize,
    pub window: WindowSpec,
    pub c: Vec<f64>,
}

/// Sweeps tau over precomputed contrast signals and scores each setting.
pub fn roc_from_series(series: &[SequenceSeries], truth: &GroundTruth) -> Result<RocCurve> {
    let mut points = Vec::with_capacity(21);
    for tau in tau_sweep() {
        let mut results = Vec::with_capacity(series.len());
        for s in series {
            let spots: SpotResult = detect_peaks(&s.c, tau, s.window.k)?;
            results.push(SequenceSpots {
                id: s.id.clone(),
                n_frames: s.n_frames,
                window: s.window,
                peaks: spots.peaks,
            });
        }
        let score = evaluate(&results, truth)?;
        points.push(RocPoint {
            tau,
            tpr: score.tpr,
            fpr: score.fpr,
        });
    }
    let auc = auc_from_points(&points);
    Ok(RocCurve { points, auc })
}

/// Trapezoidal area under the curve, closed at (0,0) and (1,1).
pub fn auc_from_points(points: &[RocPoint]) -> f64 {
    let mut xy: Vec<(f64, f64)> = points.iter().map(|p| (p.fpr, p.tpr)).collect();
    xy.push((0.0, 0.0));
    xy.push((1.0, 1.0));
    xy.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut auc = 0.0;
    for w in xy.windows(2) {
        auc += (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0;
    }
    auc
}
