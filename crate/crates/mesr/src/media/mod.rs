//! Frame sequences and the pixel formats behind them.
//!
//! Every other module consumes [`FrameSequence`] values; this is the only
//! module that touches pixel files.

mod pgm;
pub mod synth;

pub use pgm::{load_sequence, load_sequence_range, read_pgm, save_sequence, write_pgm};
pub use synth::{synthesize_transient, textured_frame, TransientSpec};

use crate::error::{Error, Result};

/// Minimum frame edge in pixels.
pub const MIN_FRAME_EDGE: usize = 16;

/// A single grayscale frame with row-major luminance values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl Frame {
    /// Builds a frame from row-major pixels, checking shape and range.
    pub fn from_pixels(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if pixels.len() != width * height {
            return Err(Error::InvalidFrame(format!(
                "pixel count {} does not match {}x{}",
                pixels.len(),
                width,
                height
            )));
        }
        if pixels.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidFrame(
                "luminance values must lie in [0, 1]".into(),
            ));
        }
        Ok(Frame {
            width,
            height,
            pixels,
        })
    }

    /// Builds a frame by evaluating `f(x, y)`; values are clamped to `[0, 1]`.
    pub fn from_fn<F: FnMut(usize, usize) -> f64>(width: usize, height: usize, mut f: F) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y).clamp(0.0, 1.0));
            }
        }
        Frame {
            width,
            height,
            pixels,
        }
    }

    pub fn constant(width: usize, height: usize, value: f64) -> Self {
        Frame::from_fn(width, height, |_, _| value)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        self.pixels[y * self.width + x] = value.clamp(0.0, 1.0);
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    /// Mean absolute difference against another frame of the same shape.
    pub fn mean_abs_diff(&self, other: &Frame) -> f64 {
        assert_eq!(self.width, other.width);
        assert_eq!(self.height, other.height);
        let sum: f64 = self
            .pixels
            .iter()
            .zip(&other.pixels)
            .map(|(a, b)| (a - b).abs())
            .sum();
        sum / self.pixels.len() as f64
    }

    /// Sum of absolute differences against another frame.
    pub fn l1_diff(&self, other: &Frame) -> f64 {
        self.mean_abs_diff(other) * self.pixels.len() as f64
    }

    /// Copies the pixels inside `rect` into a new frame.
    pub fn crop(&self, rect: crate::raster::Rect) -> Result<Frame> {
        if !rect.fits_in(self.width, self.height) {
            return Err(Error::OutOfBounds(format!(
                "crop {:?} exceeds {}x{}",
                rect, self.width, self.height
            )));
        }
        Ok(Frame::from_fn(rect.width(), rect.height(), |x, y| {
            self.get(rect.x0 + x, rect.y0 + y)
        }))
    }
}

/// An ordered run of equally sized grayscale frames with a frame rate and
/// an opaque identifier used for grouping by subject and clip.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSequence {
    frames: Vec<Frame>,
    fps: f64,
    id: String,
}

impl FrameSequence {
    pub fn new(frames: Vec<Frame>, fps: f64, id: impl Into<String>) -> Result<Self> {
        if frames.is_empty() {
            return Err(Error::InvalidSequence("sequence has no frames".into()));
        }
        if !(fps > 0.0) {
            return Err(Error::InvalidSequence(format!(
                "fps must be positive, got {fps}"
            )));
        }
        let w = frames[0].width();
        let h = frames[0].height();
        if w < MIN_FRAME_EDGE || h < MIN_FRAME_EDGE {
            return Err(Error::InvalidSequence(format!(
                "frames must be at least {MIN_FRAME_EDGE}px on each side, got {w}x{h}"
            )));
        }
        for (i, f) in frames.iter().enumerate() {
            if f.width() != w || f.height() != h {
                return Err(Error::InconsistentDimensions {
                    expected_width: w,
                    expected_height: h,
                    width: f.width(),
                    height: f.height(),
                    context: format!("frame {i}"),
                });
            }
        }
        Ok(FrameSequence {
            frames,
            fps,
            id: id.into(),
        })
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn frame(&self, index: usize) -> &Frame {
        &self.frames[index]
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn fps(&self) -> f64 {
        self.fps
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn width(&self) -> usize {
        self.frames[0].width()
    }

    pub fn height(&self) -> usize {
        self.frames[0].height()
    }

    /// Clones the frames in `range` into a new sequence with the same rate.
    pub fn excerpt(&self, range: std::ops::Range<usize>, id: impl Into<String>) -> Result<Self> {
        if range.start >= range.end || range.end > self.frames.len() {
            return Err(Error::InvalidSequence(format!(
                "excerpt {range:?} out of 0..{}",
                self.frames.len()
            )));
        }
        FrameSequence::new(self.frames[range].to_vec(), self.fps, id)
    }

    /// Same frames in reverse temporal order.
    pub fn reversed(&self) -> Self {
        let mut frames = self.frames.clone();
        frames.reverse();
        FrameSequence {
            frames,
            fps: self.fps,
            id: self.id.clone(),
        }
    }

    pub fn with_frames(&self, frames: Vec<Frame>) -> Result<Self> {
        FrameSequence::new(frames, self.fps, self.id.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_mixed_dimensions() {
        let a = Frame::constant(16, 16, 0.5);
        let b = Frame::constant(16, 18, 0.5);
        let err = FrameSequence::new(vec![a, b], 25.0, "x").unwrap_err();
        assert!(err.to_string().contains("inconsistent dimensions"));
    }

    #[test]
    fn rejects_bad_fps_and_empty() {
        let a = Frame::constant(16, 16, 0.5);
        assert!(FrameSequence::new(vec![a.clone()], 0.0, "x").is_err());
        assert!(FrameSequence::new(vec![], 25.0, "x").is_err());
        assert!(FrameSequence::new(vec![a], 25.0, "x").is_ok());
    }

    #[test]
    fn frame_rejects_out_of_range_values() {
        assert!(Frame::from_pixels(2, 1, vec![0.0, 1.5]).is_err());
        assert!(Frame::from_pixels(2, 1, vec![0.0, 1.0]).is_ok());
        assert!(Frame::from_pixels(3, 1, vec![0.0, 1.0]).is_err());
    }
}
