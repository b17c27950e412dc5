//! Motion magnification: decompose each frame into a multi-scale pyramid,
//! bandpass-filter every coefficient across time, and add the amplified
//! band signal back before reconstructing.
//!
//! Gain is applied per level under a wavelength guard: a level with
//! representative wavelength lambda gets at most `lambda / (8 * delta) - 1`
//! of additive gain so that the amplified displacement stays within the
//! small-motion regime of the band.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::media::{Frame, FrameSequence};
use crate::raster::{expand, reduce};

/// Motion amplification levels explored by the evaluation sweep.
pub const ALPHA_SWEEP: [f64; 9] = [1.0, 2.0, 4.0, 8.0, 12.0, 16.0, 20.0, 24.0, 30.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MagnifyParams {
    /// Motion multiplier; 1 means no magnification. The additive gain is
    /// `alpha - 1`.
    pub alpha: f64,
    /// Spatial wavelength cutoff in pixels; levels with a smaller
    /// representative wavelength receive no amplification.
    pub gamma: f64,
    /// Temporal passband in Hz; `None` selects `[0.4, fps/4]`.
    pub band: Option<(f64, f64)>,
    /// Pyramid depth (number of detail levels above the residual).
    pub levels: usize,
    /// Assumed motion amplitude bound in pixels, used by the per-level
    /// gain guard.
    pub delta_assumed: f64,
}

impl Default for MagnifyParams {
    fn default() -> Self {
        MagnifyParams {
            alpha: 4.0,
            gamma: 16.0,
            band: None,
            levels: 4,
            delta_assumed: 1.0,
        }
    }
}

impl MagnifyParams {
    pub fn validate(&self) -> Result<()> {
        if self.alpha < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "alpha must be >= 1, got {}",
                self.alpha
            )));
        }
        if self.levels == 0 {
            return Err(Error::InvalidParameter("levels must be positive".into()));
        }
        if self.delta_assumed <= 0.0 {
            return Err(Error::InvalidParameter(
                "delta_assumed must be positive".into(),
            ));
        }
        if let Some((lo, hi)) = self.band {
            if !(lo > 0.0 && hi > lo) {
                return Err(Error::InvalidParameter(format!(
                    "band must satisfy 0 < lo < hi, got {lo}..{hi}"
                )));
            }
        }
        Ok(())
    }

    pub fn band_for(&self, fps: f64) -> (f64, f64) {
        self.band.unwrap_or((0.4, fps / 4.0))
    }

    /// Additive gain for the level with representative wavelength
    /// `lambda`, clamped by the wavelength guard and the cutoff.
    pub fn level_gain(&self, lambda: f64) -> f64 {
        if lambda < self.gamma {
            return 0.0;
        }
        let g = self.alpha - 1.0;
        g.min(lambda / (8.0 * self.delta_assumed) - 1.0).max(0.0)
    }
}

/// Second-order Butterworth bandpass coefficients via the bilinear
/// transform (normalized so a0 = 1).
fn butterworth_bandpass(lo_hz: f64, hi_hz: f64, fps: f64) -> ([f64; 3], [f64; 3]) {
    let w1 = (std::f64::consts::PI * lo_hz / fps).tan();
    let w2 = (std::f64::consts::PI * hi_hz / fps).tan();
    let bw = w2 - w1;
    let w0sq = w1 * w2;
    let a0 = 1.0 + bw + w0sq;
    (
        [bw / a0, 0.0, -bw / a0],
        [1.0, (2.0 * w0sq - 2.0) / a0, (1.0 - bw + w0sq) / a0],
    )
}

/// Steady-state filter state for a unit constant input (direct form II
/// transposed); scaling it by the first sample suppresses the startup
/// transient.
fn steady_state(b: &[f64; 3], a: &[f64; 3]) -> (f64, f64) {
    let g = (b[0] + b[1] + b[2]) / (1.0 + a[1] + a[2]);
    let z2 = b[2] - a[2] * g;
    let z1 = b[1] - a[1] * g + z2;
    (z1, z2)
}

fn filter_direct(signal: &[f64], b: &[f64; 3], a: &[f64; 3], out: &mut Vec<f64>) {
    out.clear();
    let (zi1, zi2) = steady_state(b, a);
    let x0 = signal.first().copied().unwrap_or(0.0);
    let mut z1 = zi1 * x0;
    let mut z2 = zi2 * x0;
    for &x in signal {
        let y = b[0] * x + z1;
        z1 = b[1] * x - a[1] * y + z2;
        z2 = b[2] * x - a[2] * y;
        out.push(y);
    }
}

/// One forward-backward pass with odd extension of half the signal length
/// on both sides.
fn filtfilt_once(signal: &[f64], b: &[f64; 3], a: &[f64; 3]) -> Vec<f64> {
    let n = signal.len();
    let pad = (n / 2).max(1).min(n - 1);
    let mut padded = Vec::with_capacity(n + 2 * pad);
    for i in 0..pad {
        padded.push(2.0 * signal[0] - signal[pad - i]);
    }
    padded.extend_from_slice(signal);
    for i in 0..pad {
        padded.push(2.0 * signal[n - 1] - signal[n - 2 - i]);
    }

    let mut forward = Vec::new();
    filter_direct(&padded, b, a, &mut forward);
    forward.reverse();
    let mut backward = Vec::new();
    filter_direct(&forward, b, a, &mut backward);
    backward.reverse();
    backward[pad..pad + n].to_vec()
}

/// Zero-phase bandpass, symmetrized over the two temporal directions so
/// that filtering commutes exactly with time reversal.
pub(crate) fn bandpass_zero_phase(signal: &[f64], lo_hz: f64, hi_hz: f64, fps: f64) -> Vec<f64> {
    let (b, a) = butterworth_bandpass(lo_hz, hi_hz, fps);
    let fwd = filtfilt_once(signal, &b, &a);
    let mut reversed: Vec<f64> = signal.to_vec();
    reversed.reverse();
    let mut bwd = filtfilt_once(&reversed, &b, &a);
    bwd.reverse();
    fwd.iter().zip(&bwd).map(|(x, y)| (x + y) / 2.0).collect()
}

/// Laplacian pyramid of one frame: `levels` detail bands plus the lowpass
/// residual, finest first.
fn build_pyramid(frame: &Frame, levels: usize) -> Vec<Frame> {
    let mut bands = Vec::with_capacity(levels + 1);
    let mut current = frame.clone();
    for _ in 0..levels {
        let coarse = reduce(&current);
        let up = expand(&coarse, current.width(), current.height());
        let detail = Frame::from_fn(current.width(), current.height(), |x, y| {
            // detail values live around zero; store shifted into [0,1]
            (current.get(x, y) - up.get(x, y)) / 2.0 + 0.5
        });
        bands.push(detail);
        current = coarse;
    }
    bands.push(current);
    bands
}

fn collapse_pyramid(bands: &[Frame]) -> Frame {
    let levels = bands.len() - 1;
    let mut current = bands[levels].clone();
    for l in (0..levels).rev() {
        let detail = &bands[l];
        let up = expand(&current, detail.width(), detail.height());
        current = Frame::from_fn(detail.width(), detail.height(), |x, y| {
            up.get(x, y) + (detail.get(x, y) - 0.5) * 2.0
        });
    }
    current
}

/// Magnifies sub-pixel motion in the passband of a clip.
pub fn magnify(clip: &FrameSequence, params: &MagnifyParams) -> Result<FrameSequence> {
    params.validate()?;
    if clip.len() < 4 {
        return Err(Error::InvalidSequence(format!(
            "magnification needs at least 4 frames, got {}",
            clip.len()
        )));
    }
    let min_dim = clip.width().min(clip.height());
    if min_dim < (1usize << params.levels) {
        return Err(Error::InvalidSequence(format!(
            "{}x{} frames too small for {} pyramid levels",
            clip.width(),
            clip.height(),
            params.levels
        )));
    }

    let (lo, hi) = params.band_for(clip.fps());
    if hi <= lo {
        return Err(Error::InvalidParameter(format!(
            "degenerate passband {lo}..{hi} Hz at {} fps",
            clip.fps()
        )));
    }

    // decompose every frame
    let pyramids: Vec<Vec<Frame>> = clip
        .frames()
        .iter()
        .map(|f| build_pyramid(f, params.levels))
        .collect();
    let n = clip.len();
    let band_count = params.levels + 1;

    // per-level amplified coefficients
    let mut amplified: Vec<Vec<Vec<f64>>> = (0..band_count)
        .map(|l| {
            let w = pyramids[0][l].width();
            let h = pyramids[0][l].height();
            vec![vec![0.0; w * h]; n]
        })
        .collect();

    use rayon::prelude::*;
    amplified
        .par_iter_mut()
        .enumerate()
        .for_each(|(l, frames_out)| {
            let lambda = (1u64 << (l + 1)) as f64;
            let gain = params.level_gain(lambda);
            let w = pyramids[0][l].width();
            let h = pyramids[0][l].height();
            let mut signal = vec![0.0; n];
            let mut filtered;
            for idx in 0..w * h {
                let (x, y) = (idx % w, idx / w);
                for (t, pyr) in pyramids.iter().enumerate() {
                    signal[t] = pyr[l].get(x, y);
                }
                if gain > 0.0 {
                    filtered = bandpass_zero_phase(&signal, lo, hi, clip.fps());
                } else {
                    filtered = vec![0.0; n];
                }
                for t in 0..n {
                    frames_out[t][idx] = signal[t] + gain * filtered[t];
                }
            }
        });

    // rebuild frames; pixel range is clamped by Frame::from_fn
    let frames: Vec<Frame> = (0..n)
        .into_par_iter()
        .map(|t| {
            let bands: Vec<Frame> = (0..band_count)
                .map(|l| {
                    let w = pyramids[0][l].width();
                    let h = pyramids[0][l].height();
                    let data = &amplified[l][t];
                    Frame::from_fn(w, h, |x, y| data[y * w + x])
                })
                .collect();
            collapse_pyramid(&bands)
        })
        .collect();
    clip.with_frames(frames)
}
