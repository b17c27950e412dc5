//! Temporal interpolation: embed a clip onto the continuous curve induced
//! by a path graph and resample it at arbitrary positions in `[0, 1]`.
//!
//! The embedding functions are the non-constant eigenvectors of the path
//! graph Laplacian evaluated continuously in t. Over the n original sample
//! positions they are mutually orthogonal and sum to zero, so the least
//! squares map from embedding coordinates to mean-centered frames reduces
//! to a projection and reproduces the source frames exactly.

use crate::error::{Error, Result};
use crate::media::{Frame, FrameSequence};

/// Clip lengths of the interpolation sweep: no interpolation, then
/// 10 through 80 in steps of 10.
pub fn tim_length_sweep() -> Vec<Option<usize>> {
    let mut v = vec![None];
    v.extend((1..=8).map(|i| Some(i * 10)));
    v
}

/// Default interpolation length.
pub const DEFAULT_TIM_LEN: usize = 10;

/// A fitted temporal interpolation model.
#[derive(Debug, Clone)]
pub struct TimModel {
    n: usize,
    width: usize,
    height: usize,
    fps: f64,
    id: String,
    mean: Vec<f64>,
    /// Per-basis-function pixel coefficient vectors, k = 1..n-1.
    coeffs: Vec<Vec<f64>>,
}

/// Basis function k (1-based) of an n-frame path graph at curve position
/// t in [0, 1]. At the sample positions t_j = (j-1)/(n-1) this evaluates
/// to the Laplacian eigenvector entry cos(pi*k*(2j-1)/(2n)).
fn basis(n: usize, k: usize, t: f64) -> f64 {
    let a = std::f64::consts::PI * k as f64 / n as f64;
    (a * ((n - 1) as f64 * t + 0.5)).cos()
}

/// Fits the sequence-specific mapping from curve coordinates to pixels.
pub fn tim_fit(clip: &FrameSequence) -> Result<TimModel> {
    let n = clip.len();
    if n < 2 {
        return Err(Error::InvalidSequence(
            "interpolation needs at least 2 frames".into(),
        ));
    }
    let d = clip.width() * clip.height();
    let mut mean = vec![0.0; d];
    for frame in clip.frames() {
        for (m, &p) in mean.iter_mut().zip(frame.pixels()) {
            *m += p;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }

    // orthogonal projection: coefficient_k = (2/n) * sum_j centered_j * B_kj
    let mut coeffs = Vec::with_capacity(n - 1);
    for k in 1..n {
        let mut c = vec![0.0; d];
        for (j, frame) in clip.frames().iter().enumerate() {
            let t = j as f64 / (n - 1) as f64;
            let b = basis(n, k, t) * 2.0 / n as f64;
            for (ci, (&p, &m)) in c.iter_mut().zip(frame.pixels().iter().zip(&mean)) {
                *ci += b * (p - m);
            }
        }
        coeffs.push(c);
    }
    Ok(TimModel {
        n,
        width: clip.width(),
        height: clip.height(),
        fps: clip.fps(),
        id: clip.id().to_string(),
        mean,
        coeffs,
    })
}

impl TimModel {
    pub fn source_len(&self) -> usize {
        self.n
    }

    /// Evaluates the curve at position t in [0, 1]; pixels are clamped to
    /// the valid luminance range.
    pub fn frame_at(&self, t: f64) -> Frame {
        let d = self.mean.len();
        let mut pixels = self.mean.clone();
        for (k, c) in self.coeffs.iter().enumerate() {
            let b = basis(self.n, k + 1, t);
            for (p, &ci) in pixels.iter_mut().zip(c) {
                *p += b * ci;
            }
        }
        debug_assert_eq!(pixels.len(), d);
        for p in &mut pixels {
            *p = p.clamp(0.0, 1.0);
        }
        Frame::from_pixels(self.width, self.height, pixels).expect("clamped pixels are valid")
    }
}

/// Resamples the fitted curve to `target_len` evenly spaced frames; the
/// first and last output frames coincide with the source endpoints.
pub fn tim_resample(model: &TimModel, target_len: usize) -> Result<FrameSequence> {
    if target_len < 2 {
        return Err(Error::InvalidParameter(
            "target length must be at least 2".into(),
        ));
    }
    let frames = (0..target_len)
        .map(|j| model.frame_at(j as f64 / (target_len - 1) as f64))
        .collect();
    FrameSequence::new(frames, model.fps, model.id.clone())
}

/// Fit-and-resample in one step.
pub fn tim_to_length(clip: &FrameSequence, target_len: usize) -> Result<FrameSequence> {
    tim_resample(&tim_fit(clip)?, target_len)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::media::synth::textured_frame;

    fn random_clip(seed: u64, n: usize, w: usize, h: usize) -> FrameSequence {
        let frames = (0..n as u64)
            .map(|i| textured_frame(w, h, seed * 1000 + i))
            .collect();
        FrameSequence::new(frames, 25.0, format!("clip{seed}")).unwrap()
    }

    #[test]
    fn basis_vectors_are_orthogonal_over_samples() {
        for n in [2usize, 3, 5, 10, 34] {
            for k in 1..n {
                // zero sum
                let sum: f64 = (0..n).map(|j| basis(n, k, j as f64 / (n - 1) as f64)).sum();
                assert!(sum.abs() < 1e-9, "n={n} k={k} sum={sum}");
                for l in 1..n {
                    let dot: f64 = (0..n)
                        .map(|j| {
                            let t = j as f64 / (n - 1) as f64;
                            basis(n, k, t) * basis(n, l, t)
                        })
                        .sum();
                    if k == l {
                        assert!(
                            (dot - n as f64 / 2.0).abs() < 1e-9,
                            "n={n} k={k} norm {dot}"
                        );
                    } else {
                        assert!(dot.abs() < 1e-9, "n={n} k={k} l={l} dot {dot}");
                    }
                }
            }
        }
    }

    #[test]
    fn reconstruction_at_original_positions_is_exact() {
        // full-rank projection reproduces the inputs
        let clip = random_clip(7, 6, 20, 18);
        let model = tim_fit(&clip).unwrap();
        let back = tim_resample(&model, 6).unwrap();
        let mut max_err = 0.0f64;
        for (a, b) in clip.frames().iter().zip(back.frames()) {
            for (x, y) in a.pixels().iter().zip(b.pixels()) {
                max_err = max_err.max((x - y).abs());
            }
        }
        assert!(max_err < 1e-6, "max reconstruction error {max_err}");
    }

    #[test]
    fn two_frame_model_interpolates_between_endpoints() {
        let a = Frame::constant(16, 16, 0.2);
        let b = Frame::constant(16, 16, 0.8);
        let clip = FrameSequence::new(vec![a, b], 25.0, "two").unwrap();
        let model = tim_fit(&clip).unwrap();
        assert_eq!(model.coeffs.len(), 1);
        let out = tim_resample(&model, 5).unwrap();
        assert!((out.frame(0).get(8, 8) - 0.2).abs() < 1e-9);
        assert!((out.frame(4).get(8, 8) - 0.8).abs() < 1e-9);
        // interior frames stay between the endpoints and increase
        let mut prev = 0.2;
        for j in 1..5 {
            let v = out.frame(j).get(8, 8);
            assert!(v >= prev - 1e-12 && v <= 0.8 + 1e-12);
            prev = v;
        }
    }

    #[test]
    fn constant_clip_resamples_to_the_constant_frame() {
        let f = Frame::constant(16, 16, 0.55);
        let clip = FrameSequence::new(vec![f.clone(); 4], 25.0, "const").unwrap();
        let out = tim_to_length(&clip, 9).unwrap();
        for frame in out.frames() {
            assert!(frame.mean_abs_diff(&f) < 1e-12);
        }
    }

    #[test]
    fn brightness_ramp_stays_monotone_when_upsampled() {
        let n = 5;
        let frames: Vec<Frame> = (0..n)
            .map(|j| Frame::constant(16, 16, 0.1 + 0.15 * j as f64))
            .collect();
        let clip = FrameSequence::new(frames, 25.0, "ramp").unwrap();
        let out = tim_to_length(&clip, 10).unwrap();
        assert_eq!(out.len(), 10);
        let means: Vec<f64> = out
            .frames()
            .iter()
            .map(|f| f.pixels().iter().sum::<f64>() / f.pixels().len() as f64)
            .collect();
        for w in means.windows(2) {
            assert!(w[1] >= w[0] - 1e-9, "not monotone: {means:?}");
        }
    }

    #[test]
    fn downsampling_34_to_10_keeps_endpoints() {
        let clip = random_clip(12, 34, 18, 16);
        let out = tim_to_length(&clip, 10).unwrap();
        assert_eq!(out.len(), 10);
        assert!(out.frame(0).mean_abs_diff(clip.frame(0)) < 1e-6);
        assert!(out.frame(9).mean_abs_diff(clip.frame(33)) < 1e-6);
    }

    #[test]
    fn resampling_is_linear_in_pixel_values() {
        // scale the clip by a constant; outputs scale identically as long
        // as nothing clamps
        let clip = random_clip(13, 6, 16, 16);
        let half = clip
            .with_frames(
                clip.frames()
                    .iter()
                    .map(|f| Frame::from_fn(16, 16, |x, y| f.get(x, y) / 2.0))
                    .collect(),
            )
            .unwrap();
        let a = tim_to_length(&clip, 13).unwrap();
        let b = tim_to_length(&half, 13).unwrap();
        for (fa, fb) in a.frames().iter().zip(b.frames()) {
            for (x, y) in fa.pixels().iter().zip(fb.pixels()) {
                assert!((x / 2.0 - y).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn temporal_reversal_symmetry() {
        let clip = random_clip(14, 7, 16, 16);
        let forward = tim_to_length(&clip, 11).unwrap();
        let backward = tim_to_length(&clip.reversed(), 11).unwrap();
        for (a, b) in forward.frames().iter().zip(backward.frames().iter().rev()) {
            assert!(a.mean_abs_diff(b) < 1e-9);
        }
    }

    #[test]
    fn output_length_is_exact_for_all_targets() {
        let clip = random_clip(15, 4, 16, 16);
        for target in [2usize, 3, 10, 41, 80] {
            assert_eq!(tim_to_length(&clip, target).unwrap().len(), target);
        }
    }

    #[test]
    fn single_frame_clip_is_rejected() {
        let clip = FrameSequence::new(vec![Frame::constant(16, 16, 0.5)], 25.0, "one").unwrap();
        assert!(tim_fit(&clip).is_err());
    }

    #[test]
    fn sweep_shape() {
        let sweep = tim_length_sweep();
        assert_eq!(sweep.len(), 9);
        assert_eq!(sweep[0], None);
        assert_eq!(sweep[1], Some(10));
        assert_eq!(sweep[8], Some(80));
    }
}
