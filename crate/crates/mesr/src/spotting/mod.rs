//! Feature-difference contrast analysis over a sliding micro-interval.
//!
//! For each frame the per-block features of the current frame (CF) are
//! compared against the average feature frame (AFF) of the tail and head
//! frames k frames away. Averaging the M greatest block distances gives
//! the initial difference signal F; contrasting F against its own values
//! k frames away isolates rapid motions, and peaks of the contrasted
//! signal above an adaptive threshold are the spotted frames.

pub mod eval;

pub use eval::{
    auc_from_points, evaluate, read_ground_truth, roc_from_series, tau_sweep, write_ground_truth,
    GroundTruth, GtInterval, RocCurve, RocPoint, SequenceSeries, SequenceSpots, SpotScore,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{dense_flow, hoof_from_flow, lbp_frame_histogram, FlowParams, LbpParams};
use crate::geometry::{BlockGrid, GRID_COLS, GRID_ROWS};
use crate::media::FrameSequence;
use crate::raster::Rect;

/// Number of grid blocks.
pub const BLOCK_COUNT: usize = GRID_ROWS * GRID_COLS;

/// Appearance feature used for the per-block histograms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SpotFeature {
    Lbp { params: LbpParams },
    Hoof { bins: usize },
}

impl Default for SpotFeature {
    fn default() -> Self {
        SpotFeature::Lbp {
            params: LbpParams::default(),
        }
    }
}

/// Spotting parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpotParams {
    /// Micro-interval length in seconds; the frame window N is derived
    /// from this and the sequence frame rate.
    pub window_seconds: f64,
    pub feature: SpotFeature,
    /// How many of the greatest block distances are averaged per frame.
    pub m_top: usize,
    /// Threshold fraction between the signal mean and maximum.
    pub tau: f64,
}

impl Default for SpotParams {
    fn default() -> Self {
        SpotParams {
            window_seconds: 0.32,
            feature: SpotFeature::default(),
            m_top: 12,
            tau: 0.15,
        }
    }
}

impl SpotParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.window_seconds > 0.0) {
            return Err(Error::InvalidParameter(
                "window_seconds must be positive".into(),
            ));
        }
        if self.m_top < 1 || self.m_top > BLOCK_COUNT {
            return Err(Error::InvalidParameter(format!(
                "m_top must be in [1, {BLOCK_COUNT}], got {}",
                self.m_top
            )));
        }
        if !(0.0..=1.0).contains(&self.tau) {
            return Err(Error::InvalidParameter(format!(
                "tau must be in [0, 1], got {}",
                self.tau
            )));
        }
        if let SpotFeature::Lbp { params } = &self.feature {
            params.validate()?;
        }
        Ok(())
    }

    /// Derives the frame window from the frame rate; an even count is
    /// bumped to the next odd value so the half-window k is integral.
    pub fn window(&self, fps: f64) -> WindowSpec {
        let mut n = (self.window_seconds * fps).round() as usize;
        if n % 2 == 0 {
            n += 1;
        }
        let n = n.max(3);
        WindowSpec { n, k: (n - 1) / 2 }
    }
}

/// The derived micro-interval: N frames with half-window k = (N-1)/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub n: usize,
    pub k: usize,
}

/// The difference signals of one sequence. Entries outside each signal's
/// valid range are stored as zero and masked out of all statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceSeries {
    /// Initial difference, valid on `[k, n-1-k]`.
    pub f: Vec<f64>,
    /// Contrasted, zero-clamped difference, valid on `[2k, n-1-2k]`.
    pub c: Vec<f64>,
    pub window: WindowSpec,
}

/// Detected peaks of one sequence (frame indices are 0-based).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpotResult {
    pub peaks: Vec<usize>,
    /// Per-peak spotted interval `[peak-k, peak+k]`, clamped to the
    /// sequence bounds, inclusive.
    pub intervals: Vec<(usize, usize)>,
    pub tau: f64,
    pub threshold: f64,
}

/// Symmetric chi-squared distance between two histograms; bins where both
/// entries are zero contribute nothing.
pub fn chi_squared(h: &[f64], g: &[f64]) -> f64 {
    debug_assert_eq!(h.len(), g.len());
    h.iter()
        .zip(g)
        .map(|(&a, &b)| {
            let s = a + b;
            if s > 0.0 {
                (a - b) * (a - b) / s
            } else {
                0.0
            }
        })
        .sum()
}

/// Per-frame, per-block feature histograms for a corrected sequence.
pub fn block_features(
    seq: &FrameSequence,
    grid: &BlockGrid,
    feature: &SpotFeature,
) -> Result<Vec<Vec<Vec<f64>>>> {
    let cells = grid.cells();
    match feature {
        SpotFeature::Lbp { params } => {
            params.validate()?;
            seq.frames()
                .par_iter()
                .map(|frame| {
                    cells
                        .iter()
                        .map(|&cell| {
                            match lbp_frame_histogram(frame, clamp_cell(cell, seq), params) {
                                Ok(h) => Ok(h),
                                // all-zero histogram for cells without valid centers
                                Err(Error::OutOfBounds(_)) => Ok(vec![0.0; params.histogram_len()]),
                                Err(e) => Err(e),
                            }
                        })
                        .collect()
                })
                .collect()
        }
        SpotFeature::Hoof { bins } => {
            if *bins == 0 {
                return Err(Error::InvalidParameter("bins must be positive".into()));
            }
            let reference = seq.frame(0);
            let flow_params = FlowParams::default();
            seq.frames()
                .par_iter()
                .map(|frame| {
                    let flow = dense_flow(reference, frame, &flow_params)?;
                    cells
                        .iter()
                        .map(|&cell| hoof_from_flow(&flow, clamp_cell(cell, seq), *bins))
                        .collect()
                })
                .collect()
        }
    }
}

fn clamp_cell(cell: Rect, seq: &FrameSequence) -> Rect {
    Rect::new(
        cell.x0.min(seq.width()),
        cell.y0.min(seq.height()),
        cell.x1.min(seq.width()),
        cell.y1.min(seq.height()),
    )
}

/// Chi-squared distance of every block between the current frame `i` and
/// the average feature frame of frames `i-k` and `i+k`.
pub fn block_fd(
    seq: &FrameSequence,
    grid: &BlockGrid,
    params: &SpotParams,
    i: usize,
) -> Result<Vec<f64>> {
    params.validate()?;
    let w = params.window(seq.fps());
    if i < w.k || i + w.k >= seq.len() {
        return Err(Error::InvalidParameter(format!(
            "frame {i} outside the valid range [{}, {}]",
            w.k,
            seq.len().saturating_sub(w.k + 1)
        )));
    }
    let sub = seq.excerpt(i - w.k..i + w.k + 1, seq.id())?;
    // for flow features the reference must stay the sequence's first frame
    let features = match params.feature {
        SpotFeature::Hoof { .. } => {
            let mut frames = vec![seq.frame(0).clone()];
            frames.extend_from_slice(sub.frames());
            let with_ref = seq.with_frames(frames)?;
            let mut feats = block_features(&with_ref, grid, &params.feature)?;
            feats.remove(0);
            feats
        }
        SpotFeature::Lbp { .. } => block_features(&sub, grid, &params.feature)?,
    };
    Ok(block_fd_from(&features, w.k, w.k))
}

/// Distances from precomputed per-frame block features.
pub(crate) fn block_fd_from(features: &[Vec<Vec<f64>>], i: usize, k: usize) -> Vec<f64> {
    let cf = &features[i];
    let tf = &features[i - k];
    let hf = &features[i + k];
    (0..cf.len())
        .map(|b| {
            let aff: Vec<f64> = tf[b]
                .iter()
                .zip(&hf[b])
                .map(|(&t, &h)| (t + h) / 2.0)
                .collect();
            chi_squared(&cf[b], &aff)
        })
        .collect()
}

/// Averages the `m` greatest block distances.
pub fn top_block_mean(distances: &[f64], m: usize) -> f64 {
    let mut sorted = distances.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sorted.iter().take(m).sum::<f64>() / m as f64
}

/// Initial difference signal over the whole sequence; entries outside
/// `[k, n-1-k]` are zero.
pub fn initial_difference(
    seq: &FrameSequence,
    grid: &BlockGrid,
    params: &SpotParams,
) -> Result<Vec<f64>> {
    params.validate()?;
    let w = params.window(seq.fps());
    let n = seq.len();
    if n < w.n {
        return Err(Error::InvalidSequence(format!(
            "sequence of {n} frames shorter than window {}",
            w.n
        )));
    }
    let features = block_features(seq, grid, &params.feature)?;
    let mut f = vec![0.0; n];
    let distances: Vec<(usize, f64)> = (w.k..n - w.k)
        .into_par_iter()
        .map(|i| {
            (
                i,
                top_block_mean(&block_fd_from(&features, i, w.k), params.m_top),
            )
        })
        .collect();
    for (i, v) in distances {
        f[i] = v;
    }
    Ok(f)
}

/// Contrasts the initial difference against its own values k frames away;
/// negative values are clamped to zero. Valid on `[2k, n-1-2k]`.
pub fn contrast(f: &[f64], k: usize) -> Vec<f64> {
    let n = f.len();
    let mut c = vec![0.0; n];
    if n < 4 * k + 1 {
        return c;
    }
    for i in 2 * k..n - 2 * k {
        c[i] = (f[i] - 0.5 * (f[i + k] + f[i - k])).max(0.0);
    }
    c
}

/// Threshold and peak detection on the contrasted signal.
///
/// The threshold interpolates between the signal mean and maximum over the
/// valid range; local maxima strictly above it are kept greedily in
/// descending height, discarding any candidate closer than k/2 frames to
/// an already kept peak.
pub fn detect_peaks(c: &[f64], tau: f64, k: usize) -> Result<SpotResult> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::InvalidParameter(format!(
            "tau must be in [0, 1], got {tau}"
        )));
    }
    let n = c.len();
    if n < 4 * k + 1 {
        return Err(Error::InvalidSequence(format!(
            "{n} frames leave no valid contrast range for k = {k}"
        )));
    }
    let lo = 2 * k;
    let hi = n - 2 * k; // exclusive
    let valid = &c[lo..hi];
    let mean = valid.iter().sum::<f64>() / valid.len() as f64;
    let max = valid.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let threshold = mean + tau * (max - mean);

    // local maxima strictly above the threshold; a plateau yields its
    // first index
    let mut candidates: Vec<usize> = Vec::new();
    for i in lo..hi {
        if c[i] <= threshold {
            continue;
        }
        let rises = i == lo || c[i] > c[i - 1];
        let falls = i + 1 == hi || c[i] >= c[i + 1];
        if rises && falls {
            candidates.push(i);
        }
    }
    // greedy suppression: height descending, scan order breaking ties
    candidates.sort_by(|&a, &b| c[b].partial_cmp(&c[a]).unwrap().then(a.cmp(&b)));
    let mut kept: Vec<usize> = Vec::new();
    for cand in candidates {
        if kept.iter().all(|&p| 2 * p.abs_diff(cand) >= k) {
            kept.push(cand);
        }
    }
    kept.sort_unstable();
    let intervals = kept
        .iter()
        .map(|&p| (p.saturating_sub(k), (p + k).min(n - 1)))
        .collect();
    Ok(SpotResult {
        peaks: kept,
        intervals,
        tau,
        threshold,
    })
}

/// Runs the full difference analysis on a corrected sequence.
pub fn spot_sequence(
    seq: &FrameSequence,
    grid: &BlockGrid,
    params: &SpotParams,
) -> Result<(DifferenceSeries, SpotResult)> {
    let window = params.window(seq.fps());
    let f = initial_difference(seq, grid, params)?;
    let c = contrast(&f, window.k);
    let result = detect_peaks(&c, params.tau, window.k)?;
    Ok((DifferenceSeries { f, c, window }, result))
}
