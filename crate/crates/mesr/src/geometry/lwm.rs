//! Local-weighted-mean registration of a clip onto a model face.
//!
//! Each control point carries a local degree-2 polynomial fitted over its
//! nearest neighbors; evaluation blends the polynomials with a radial
//! weight that vanishes at each control's support radius, giving a smooth
//! transition across regions.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::media::{Frame, FrameSequence};
use crate::raster::{bilinear, Border, Point, Rect};

/// Landmark count of the face annotation scheme.
pub const LANDMARK_COUNT: usize = 68;

/// Landmark indices of the two eyes (first is the image-left eye).
const EYE_A: std::ops::Range<usize> = 36..42;
const EYE_B: std::ops::Range<usize> = 42..48;

/// Crop width as a multiple of the model inter-ocular distance.
const CROP_WIDTH_FACTOR: f64 = 1.8;
/// Crop height as a multiple of the model inter-ocular distance.
const CROP_HEIGHT_FACTOR: f64 = 2.2;
/// Eye line position within the crop, as a fraction of its height.
const CROP_EYE_HEIGHT: f64 = 0.3;

/// Registration residual the fit is expected to stay under, in pixels.
pub const REGISTRATION_EPS: f64 = 0.5;

/// A 68-point facial landmark annotation.
#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkSet(Vec<Point>);

impl LandmarkSet {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.len() != LANDMARK_COUNT {
            return Err(Error::InvalidParameter(format!(
                "expected {LANDMARK_COUNT} landmarks, got {}",
                points.len()
            )));
        }
        if points.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::InvalidParameter("non-finite landmark".into()));
        }
        Ok(LandmarkSet(points))
    }

    pub fn points(&self) -> &[Point] {
        &self.0
    }

    /// Applies `f` to every point.
    pub fn map(&self, f: impl Fn(Point) -> Point) -> LandmarkSet {
        LandmarkSet(self.0.iter().map(|&p| f(p)).collect())
    }
}

/// Mean positions of the two eye landmark groups.
pub fn landmark_eye_centers(set: &LandmarkSet) -> (Point, Point) {
    let mean = |r: std::ops::Range<usize>| {
        let pts = &set.points()[r];
        let n = pts.len() as f64;
        Point::new(
            pts.iter().map(|p| p.x).sum::<f64>() / n,
            pts.iter().map(|p| p.y).sum::<f64>() / n,
        )
    };
    (mean(EYE_A), mean(EYE_B))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LwmParams {
    /// Support size: nearest controls used for each local polynomial.
    pub neighbors: usize,
}

impl Default for LwmParams {
    fn default() -> Self {
        LwmParams { neighbors: 12 }
    }
}

/// One control point's local quadratic map, in coordinates centered on the
/// control and scaled by its support radius.
#[derive(Debug, Clone)]
struct LocalPolynomial {
    center: Point,
    radius: f64,
    /// Coefficients over the basis [1, u, v, u^2, uv, v^2], per output axis.
    coeffs: [[f64; 6]; 2],
}

impl LocalPolynomial {
    fn eval(&self, p: Point) -> Point {
        let u = (p.x - self.center.x) / self.radius;
        let v = (p.y - self.center.y) / self.radius;
        let basis = [1.0, u, v, u * u, u * v, v * v];
        let mut out = [0.0; 2];
        for axis in 0..2 {
            out[axis] = basis
                .iter()
                .zip(&self.coeffs[axis])
                .map(|(b, c)| b * c)
                .sum();
        }
        Point::new(out[0], out[1])
    }

    fn weight(&self, p: Point) -> f64 {
        let r = p.distance(&self.center) / self.radius;
        if r >= 1.0 {
            0.0
        } else {
            1.0 - 3.0 * r * r + 2.0 * r * r * r
        }
    }
}

/// A fitted local-weighted-mean transform from source to target space.
#[derive(Debug, Clone)]
pub struct LwmTransform {
    locals: Vec<LocalPolynomial>,
}

/// Solves the 6x6 normal equations by Gaussian elimination with partial
/// pivoting; a vanishing pivot means the support points are degenerate.
fn solve_normal(mut a: [[f64; 7]; 6]) -> Result<[f64; 6]> {
    for col in 0..6 {
        let pivot = (col..6)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[pivot][col].abs() < 1e-12 {
            return Err(Error::DegenerateGeometry(
                "degenerate support set in local polynomial fit".into(),
            ));
        }
        a.swap(col, pivot);
        for row in 0..6 {
            if row == col {
                continue;
            }
            let f = a[row][col] / a[col][col];
            for k in col..7 {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    let mut x = [0.0; 6];
    for i in 0..6 {
        x[i] = a[i][6] / a[i][i];
    }
    Ok(x)
}

/// Fits an LWM transform mapping `source` control points onto `target`.
pub fn lwm_fit(source: &LandmarkSet, target: &LandmarkSet) -> Result<LwmTransform> {
    lwm_fit_with(source, target, &LwmParams::default())
}

pub fn lwm_fit_with(
    source: &LandmarkSet,
    target: &LandmarkSet,
    params: &LwmParams,
) -> Result<LwmTransform> {
    let n = params.neighbors;
    if n < 6 {
        return Err(Error::InvalidParameter(
            "local quadratic fit needs at least 6 support points".into(),
        ));
    }
    if source.points().len() < n {
        return Err(Error::InvalidParameter(format!(
            "fewer than {n} control points"
        )));
    }
    let src = source.points();
    let dst = target.points();
    let mut locals = Vec::with_capacity(src.len());
    for (i, &center) in src.iter().enumerate() {
        // nearest supports, ties broken by index for determinism
        let mut order: Vec<usize> = (0..src.len()).collect();
        order.sort_by(|&a, &b| {
            let da = src[a].distance(&center);
            let db = src[b].distance(&center);
            da.partial_cmp(&db).unwrap().then(a.cmp(&b))
        });
        let support = &order[..n];
        let radius = src[support[n - 1]].distance(&center);
        if radius <= 0.0 {
            return Err(Error::DegenerateGeometry(format!(
                "control {i} has coincident support points"
            )));
        }
        let mut coeffs = [[0.0; 6]; 2];
        for axis in 0..2 {
            let mut normal = [[0.0f64; 7]; 6];
            for &j in support {
                let u = (src[j].x - center.x) / radius;
                let v = (src[j].y - center.y) / radius;
                let basis = [1.0, u, v, u * u, u * v, v * v];
                let value = if axis == 0 { dst[j].x } else { dst[j].y };
                for r in 0..6 {
                    for c in 0..6 {
                        normal[r][c] += basis[r] * basis[c];
                    }
                    normal[r][6] += basis[r] * value;
                }
            }
            coeffs[axis] = solve_normal(normal)?;
        }
        locals.push(LocalPolynomial {
            center,
            radius,
            coeffs,
        });
    }
    Ok(LwmTransform { locals })
}

impl LwmTransform {
    /// Evaluates the transform; outside every support radius the nearest
    /// control's polynomial applies unblended.
    pub fn apply(&self, p: Point) -> Point {
        let mut wsum = 0.0;
        let mut acc = (0.0, 0.0);
        for local in &self.locals {
            let w = local.weight(p);
            if w > 0.0 {
                let v = local.eval(p);
                acc.0 += w * v.x;
                acc.1 += w * v.y;
                wsum += w;
            }
        }
        if wsum > 0.0 {
            Point::new(acc.0 / wsum, acc.1 / wsum)
        } else {
            let nearest = self
                .locals
                .iter()
                .min_by(|a, b| {
                    p.distance(&a.center)
                        .partial_cmp(&p.distance(&b.center))
                        .unwrap()
                })
                .expect("at least one control");
            nearest.eval(p)
        }
    }

    /// Largest distance between a mapped source control and its target.
    pub fn max_control_residual(&self, source: &LandmarkSet, target: &LandmarkSet) -> f64 {
        source
            .points()
            .iter()
            .zip(target.points())
            .map(|(&s, t)| self.apply(s).distance(t))
            .fold(0.0, f64::max)
    }
}

/// Face crop rectangle in model coordinates, sized by the model
/// inter-ocular distance with the eyes at 30% height.
pub fn model_crop_rect(model: &LandmarkSet) -> Rect {
    let (a, b) = landmark_eye_centers(model);
    let iod = a.distance(&b);
    let mid = Point::new((a.x + b.x) / 2.0, (a.y + b.y) / 2.0);
    let w = CROP_WIDTH_FACTOR * iod;
    let h = CROP_HEIGHT_FACTOR * iod;
    let x0 = (mid.x - w / 2.0).round().max(0.0) as usize;
    let y0 = (mid.y - CROP_EYE_HEIGHT * h).round().max(0.0) as usize;
    Rect::new(x0, y0, x0 + w.round() as usize, y0 + h.round() as usize)
}

/// Registers every frame of a clip to the model face through one LWM
/// transform fitted on the frame-1 landmarks, then crops the face area.
pub fn register_clip(
    clip: &FrameSequence,
    first_frame_landmarks: &LandmarkSet,
    model_landmarks: &LandmarkSet,
) -> Result<FrameSequence> {
    // resampling pulls model-space pixels back into clip space, so the
    // fitted direction is model -> clip
    let pullback = lwm_fit(model_landmarks, first_frame_landmarks)?;
    let crop = model_crop_rect(model_landmarks);

    // one sampling map shared by all frames
    let mut map = Vec::with_capacity(crop.width() * crop.height());
    for y in 0..crop.height() {
        for x in 0..crop.width() {
            let m = Point::new((crop.x0 + x) as f64, (crop.y0 + y) as f64);
            map.push(pullback.apply(m));
        }
    }

    let frames: Vec<Frame> = clip
        .frames()
        .par_iter()
        .map(|frame| {
            let mut f = Frame::constant(crop.width(), crop.height(), 0.0);
            for y in 0..crop.height() {
                for x in 0..crop.width() {
                    let s = map[y * crop.width() + x];
                    f.set(x, y, bilinear(frame, s.x, s.y, Border::Zero));
                }
            }
            f
        })
        .collect();
    clip.with_frames(frames)
}

/// Reads a 68-row `x,y` landmark CSV.
pub fn read_landmarks(path: impl AsRef<Path>) -> Result<LandmarkSet> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_landmarks(&text).map_err(|reason| Error::Parse {
        path: path.to_path_buf(),
        reason,
    })
}

fn parse_landmarks(text: &str) -> std::result::Result<LandmarkSet, String> {
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let x: f64 = parts
            .next()
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| format!("line {}: bad x", i + 1))?;
        let y: f64 = parts
            .next()
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| format!("line {}: bad y", i + 1))?;
        points.push(Point::new(x, y));
    }
    LandmarkSet::new(points).map_err(|e| e.to_string())
}

/// Writes a landmark CSV.
pub fn write_landmarks(path: impl AsRef<Path>, set: &LandmarkSet) -> Result<()> {
    let path = path.as_ref();
    let mut body = String::new();
    for p in set.points() {
        body.push_str(&format!("{},{}\n", p.x, p.y));
    }
    std::fs::write(path, body).map_err(|e| Error::io(path, e))
}

/// The model face landmarks shipped with the crate (200x200 canvas,
/// inter-ocular distance 60 px).
pub fn model_face() -> LandmarkSet {
    parse_landmarks(include_str!("../../assets/model_landmarks.csv"))
        .expect("embedded model landmarks are valid")
}
