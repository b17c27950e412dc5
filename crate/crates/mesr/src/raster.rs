//! Low-level raster helpers shared by the geometry, feature and
//! magnification code: points, rectangles, bilinear sampling, separable
//! blurs and pyramid reduce/expand.

use crate::media::Frame;
use serde::{Deserialize, Serialize};

/// A 2-D position in pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Half-open pixel rectangle `[x0, x1) x [y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

impl Rect {
    pub fn new(x0: usize, y0: usize, x1: usize, y1: usize) -> Self {
        Rect { x0, y0, x1, y1 }
    }

    pub fn width(&self) -> usize {
        self.x1.saturating_sub(self.x0)
    }

    pub fn height(&self) -> usize {
        self.y1.saturating_sub(self.y0)
    }

    pub fn is_empty(&self) -> bool {
        self.x1 <= self.x0 || self.y1 <= self.y0
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x0 && x < self.x1 && y >= self.y0 && y < self.y1
    }

    /// Whole-frame rectangle.
    pub fn of_frame(frame: &Frame) -> Self {
        Rect::new(0, 0, frame.width(), frame.height())
    }

    pub fn fits_in(&self, width: usize, height: usize) -> bool {
        !self.is_empty() && self.x1 <= width && self.y1 <= height
    }
}

/// Border policy for samples that fall outside the frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Border {
    /// Out-of-bounds reads return 0.
    Zero,
    /// Coordinates are clamped to the nearest valid pixel.
    Replicate,
}

/// Bilinear sample at a fractional position.
pub fn bilinear(frame: &Frame, x: f64, y: f64, border: Border) -> f64 {
    let w = frame.width() as isize;
    let h = frame.height() as isize;
    let x0 = x.floor();
    let y0 = y.floor();
    let fx = x - x0;
    let fy = y - y0;
    let x0 = x0 as isize;
    let y0 = y0 as isize;

    let read = |xi: isize, yi: isize| -> f64 {
        match border {
            Border::Zero => {
                if xi < 0 || yi < 0 || xi >= w || yi >= h {
                    0.0
                } else {
                    frame.get(xi as usize, yi as usize)
                }
            }
            Border::Replicate => {
                let xc = xi.clamp(0, w - 1) as usize;
                let yc = yi.clamp(0, h - 1) as usize;
                frame.get(xc, yc)
            }
        }
    };

    let v00 = read(x0, y0);
    let v10 = read(x0 + 1, y0);
    let v01 = read(x0, y0 + 1);
    let v11 = read(x0 + 1, y0 + 1);
    let top = v00 + fx * (v10 - v00);
    let bot = v01 + fx * (v11 - v01);
    top + fy * (bot - top)
}

/// Resample a frame through an inverse map: `out(x, y) = in(map(x, y))`.
pub fn warp<F>(frame: &Frame, border: Border, map: F) -> Frame
where
    F: Fn(f64, f64) -> (f64, f64),
{
    Frame::from_fn(frame.width(), frame.height(), |x, y| {
        let (sx, sy) = map(x as f64, y as f64);
        bilinear(frame, sx, sy, border)
    })
}

/// Translate a frame by a fractional offset.
pub fn translate(frame: &Frame, dx: f64, dy: f64, border: Border) -> Frame {
    warp(frame, border, |x, y| (x - dx, y - dy))
}

/// Central-difference gradients `(I(x+1) - I(x-1), I(y+1) - I(y-1))`
/// with replicated borders.
pub fn central_gradients(frame: &Frame) -> (Vec<f64>, Vec<f64>) {
    let w = frame.width();
    let h = frame.height();
    let mut gx = vec![0.0; w * h];
    let mut gy = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let xm = x.saturating_sub(1);
            let xp = (x + 1).min(w - 1);
            let ym = y.saturating_sub(1);
            let yp = (y + 1).min(h - 1);
            gx[y * w + x] = frame.get(xp, y) - frame.get(xm, y);
            gy[y * w + x] = frame.get(x, yp) - frame.get(x, ym);
        }
    }
    (gx, gy)
}

/// 5-tap binomial kernel used for pyramid smoothing.
const BINOMIAL5: [f64; 5] = [1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0];

/// Separable 5-tap binomial blur with replicated borders.
pub fn binomial_blur(frame: &Frame) -> Frame {
    let w = frame.width() as isize;
    let h = frame.height() as isize;
    let mut tmp = vec![0.0; (w * h) as usize];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (i, k) in BINOMIAL5.iter().enumerate() {
                let xi = (x + i as isize - 2).clamp(0, w - 1);
                acc += k * frame.get(xi as usize, y as usize);
            }
            tmp[(y * w + x) as usize] = acc;
        }
    }
    let mut out = vec![0.0; (w * h) as usize];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (i, k) in BINOMIAL5.iter().enumerate() {
                let yi = (y + i as isize - 2).clamp(0, h - 1);
                acc += k * tmp[(yi * w + x) as usize];
            }
            out[(y * w + x) as usize] = acc;
        }
    }
    Frame::from_pixels(frame.width(), frame.height(), out).expect("blur preserves shape")
}

/// Blur and decimate by two; odd sizes round up.
pub fn reduce(frame: &Frame) -> Frame {
    let blurred = binomial_blur(frame);
    let w2 = frame.width().div_ceil(2);
    let h2 = frame.height().div_ceil(2);
    Frame::from_fn(w2, h2, |x, y| blurred.get(x * 2, y * 2))
}

/// Upsample to an explicit size, inverting `reduce` for pyramid
/// reconstruction. Interpolates bilinearly between the coarse samples.
pub fn expand(frame: &Frame, width: usize, height: usize) -> Frame {
    Frame::from_fn(width, height, |x, y| {
        bilinear(frame, x as f64 / 2.0, y as f64 / 2.0, Border::Replicate)
    })
}
