//! Face geometry: anchor-point tracking, in-plane rotation/scale
//! correction, the fixed 6x6 block grid, and landmark-based registration
//! to a model face.

mod klt;
mod lwm;

pub use klt::{track_point, KltParams};
pub use lwm::{
    landmark_eye_centers, lwm_fit, model_face, read_landmarks, register_clip, write_landmarks,
    LandmarkSet, LwmParams, LwmTransform, LANDMARK_COUNT, REGISTRATION_EPS,
};

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::media::{Frame, FrameSequence};
use crate::raster::{warp, Border, Point, Rect};

/// Grid rows/columns of the spotting block structure.
pub const GRID_ROWS: usize = 6;
pub const GRID_COLS: usize = 6;

/// Grid width as a multiple of the inter-ocular distance.
pub const GRID_WIDTH_FACTOR: f64 = 2.4;
/// Grid height as a multiple of the eye-midpoint-to-nasal-spine distance.
pub const GRID_HEIGHT_FACTOR: f64 = 3.0;
/// Grid rows above the eye line (the eye line sits on the boundary
/// between the second and third row).
const ROWS_ABOVE_EYES: usize = 2;

/// The three tracked facial anchors of one frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnchorTriple {
    pub left_eye: Point,
    pub right_eye: Point,
    pub nasal_spine: Point,
}

impl AnchorTriple {
    pub fn new(left_eye: Point, right_eye: Point, nasal_spine: Point) -> Self {
        AnchorTriple {
            left_eye,
            right_eye,
            nasal_spine,
        }
    }

    pub fn inter_ocular(&self) -> f64 {
        self.left_eye.distance(&self.right_eye)
    }

    pub fn eye_midpoint(&self) -> Point {
        Point::new(
            (self.left_eye.x + self.right_eye.x) / 2.0,
            (self.left_eye.y + self.right_eye.y) / 2.0,
        )
    }

    fn inside(&self, width: usize, height: usize) -> bool {
        [self.left_eye, self.right_eye, self.nasal_spine]
            .iter()
            .all(|p| {
                p.x >= 0.0 && p.y >= 0.0 && p.x <= (width - 1) as f64 && p.y <= (height - 1) as f64
            })
    }
}

/// Per-frame anchor triples for a tracked sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct AnchorPoints(Vec<AnchorTriple>);

impl AnchorPoints {
    pub fn new(triples: Vec<AnchorTriple>) -> Result<Self> {
        if triples.is_empty() {
            return Err(Error::InvalidParameter("no anchor triples".into()));
        }
        for (i, t) in triples.iter().enumerate() {
            if t.inter_ocular() <= 0.0 {
                return Err(Error::DegenerateGeometry(format!(
                    "coincident eye corners in frame {i}"
                )));
            }
        }
        Ok(AnchorPoints(triples))
    }

    pub fn triples(&self) -> &[AnchorTriple] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Tracks the anchor triple through the whole sequence with pyramidal
/// Lucas-Kanade, each point independently, frame to frame.
pub fn track_points(seq: &FrameSequence, initial: AnchorTriple) -> Result<AnchorPoints> {
    track_points_with(seq, initial, &KltParams::default())
}

pub fn track_points_with(
    seq: &FrameSequence,
    initial: AnchorTriple,
    params: &KltParams,
) -> Result<AnchorPoints> {
    if !initial.inside(seq.width(), seq.height()) {
        return Err(Error::InvalidParameter(
            "initial anchor points outside frame 1".into(),
        ));
    }
    let mut triples = Vec::with_capacity(seq.len());
    triples.push(initial);
    for i in 1..seq.len() {
        let prev = seq.frame(i - 1);
        let next = seq.frame(i);
        let last = triples[i - 1];
        let tag = |e: Error| match e {
            Error::TrackingDiverged { reason, .. } => Error::TrackingDiverged { frame: i, reason },
            other => other,
        };
        let t = AnchorTriple::new(
            track_point(prev, next, last.left_eye, params).map_err(tag)?,
            track_point(prev, next, last.right_eye, params).map_err(tag)?,
            track_point(prev, next, last.nasal_spine, params).map_err(tag)?,
        );
        triples.push(t);
    }
    AnchorPoints::new(triples)
}

/// Direct similarity transform `z -> a*z + b` (rotation + uniform scale +
/// translation) in complex form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Similarity {
    pub a: (f64, f64),
    pub b: (f64, f64),
}

impl Similarity {
    pub const IDENTITY: Similarity = Similarity {
        a: (1.0, 0.0),
        b: (0.0, 0.0),
    };

    /// The unique similarity mapping the pair `(p0, p1)` onto `(q0, q1)`.
    pub fn from_pairs(p0: Point, p1: Point, q0: Point, q1: Point) -> Result<Self> {
        let dp = (p1.x - p0.x, p1.y - p0.y);
        let dq = (q1.x - q0.x, q1.y - q0.y);
        let den = dp.0 * dp.0 + dp.1 * dp.1;
        if den <= 0.0 {
            return Err(Error::DegenerateGeometry(
                "coincident source pair in similarity fit".into(),
            ));
        }
        // a = dq / dp in complex arithmetic
        let a = (
            (dq.0 * dp.0 + dq.1 * dp.1) / den,
            (dq.1 * dp.0 - dq.0 * dp.1) / den,
        );
        let b = (
            q0.x - (a.0 * p0.x - a.1 * p0.y),
            q0.y - (a.1 * p0.x + a.0 * p0.y),
        );
        Ok(Similarity { a, b })
    }

    pub fn apply(&self, p: Point) -> Point {
        Point::new(
            self.a.0 * p.x - self.a.1 * p.y + self.b.0,
            self.a.1 * p.x + self.a.0 * p.y + self.b.1,
        )
    }

    pub fn inverse(&self) -> Similarity {
        let den = self.a.0 * self.a.0 + self.a.1 * self.a.1;
        let inv_a = (self.a.0 / den, -self.a.1 / den);
        let inv_b = (
            -(inv_a.0 * self.b.0 - inv_a.1 * self.b.1),
            -(inv_a.1 * self.b.0 + inv_a.0 * self.b.1),
        );
        Similarity { a: inv_a, b: inv_b }
    }

    pub fn is_near_identity(&self, tol: f64) -> bool {
        (self.a.0 - 1.0).abs() < tol
            && self.a.1.abs() < tol
            && self.b.0.abs() < tol
            && self.b.1.abs() < tol
    }
}

/// The fixed 6x6 block structure anchored to the frame-1 geometry, plus
/// the per-frame similarity transforms that were applied to correct the
/// sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockGrid {
    origin: Point,
    width: f64,
    height: f64,
    transforms: Vec<Similarity>,
}

impl BlockGrid {
    /// Builds the grid from the frame-1 anchor triple: width scales with
    /// the inter-ocular distance, height with the eye-to-nasal-spine
    /// distance, and the eye line lies on the row 2/3 boundary.
    pub fn from_anchor(anchor: &AnchorTriple, transforms: Vec<Similarity>) -> Result<Self> {
        let iod = anchor.inter_ocular();
        let mid = anchor.eye_midpoint();
        let nasal = anchor.nasal_spine.distance(&mid);
        if iod <= 0.0 || nasal <= 0.0 {
            return Err(Error::DegenerateGeometry(
                "anchor triple does not span a face".into(),
            ));
        }
        let width = GRID_WIDTH_FACTOR * iod;
        let height = GRID_HEIGHT_FACTOR * nasal;
        let origin = Point::new(
            mid.x - width / 2.0,
            mid.y - height * ROWS_ABOVE_EYES as f64 / GRID_ROWS as f64,
        );
        Ok(BlockGrid {
            origin,
            width,
            height,
            transforms,
        })
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn transforms(&self) -> &[Similarity] {
        &self.transforms
    }

    /// Integer pixel rectangle of one cell; neighboring cells share edges
    /// so the 36 cells tile the face rectangle without overlap or gap.
    pub fn cell_rect(&self, row: usize, col: usize) -> Rect {
        assert!(row < GRID_ROWS && col < GRID_COLS);
        let ex = |c: usize| (self.origin.x + self.width * c as f64 / GRID_COLS as f64).round();
        let ey = |r: usize| (self.origin.y + self.height * r as f64 / GRID_ROWS as f64).round();
        let x0 = ex(col).max(0.0) as usize;
        let x1 = ex(col + 1).max(0.0) as usize;
        let y0 = ey(row).max(0.0) as usize;
        let y1 = ey(row + 1).max(0.0) as usize;
        Rect::new(x0, y0, x1, y1)
    }

    /// All 36 cells in row-major order.
    pub fn cells(&self) -> Vec<Rect> {
        let mut out = Vec::with_capacity(GRID_ROWS * GRID_COLS);
        for r in 0..GRID_ROWS {
            for c in 0..GRID_COLS {
                out.push(self.cell_rect(r, c));
            }
        }
        out
    }

    /// Bounding rectangle of the whole grid.
    pub fn bounds(&self) -> Rect {
        let a = self.cell_rect(0, 0);
        let b = self.cell_rect(GRID_ROWS - 1, GRID_COLS - 1);
        Rect::new(a.x0, a.y0, b.x1, b.y1)
    }
}

/// Corrects in-plane rotation and scale against frame 1 and builds the
/// block grid from the frame-1 anchors.
///
/// Each frame is resampled through the similarity that maps its eye pair
/// onto the frame-1 eye pair; frame 1 itself passes through untouched.
pub fn correct_and_grid(
    seq: &FrameSequence,
    points: &AnchorPoints,
) -> Result<(FrameSequence, BlockGrid)> {
    if points.len() != seq.len() {
        return Err(Error::InvalidParameter(format!(
            "{} anchor triples for {} frames",
            points.len(),
            seq.len()
        )));
    }
    let first = points.triples()[0];
    let mut transforms = Vec::with_capacity(seq.len());
    for t in points.triples() {
        transforms.push(Similarity::from_pairs(
            t.left_eye,
            t.right_eye,
            first.left_eye,
            first.right_eye,
        )?);
    }
    let frames: Vec<Frame> = seq
        .frames()
        .par_iter()
        .zip(&transforms)
        .map(|(frame, t)| {
            if t.is_near_identity(1e-12) {
                frame.clone()
            } else {
                let inv = t.inverse();
                warp(frame, Border::Zero, |x, y| {
                    let p = inv.apply(Point::new(x, y));
                    (p.x, p.y)
                })
            }
        })
        .collect();
    let corrected = seq.with_frames(frames)?;
    let grid = BlockGrid::from_anchor(&first, transforms)?;
    Ok((corrected, grid))
}

/// Reads the spotting anchor file: one CSV line `lx,ly,rx,ry,nx,ny` for
/// frame 1 (a header line is permitted).
pub fn read_anchors(path: impl AsRef<Path>) -> Result<AnchorTriple> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    for line in text.lines() {
        let vals: Vec<f64> = line
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .unwrap_or_default();
        if vals.len() == 6 {
            return Ok(AnchorTriple::new(
                Point::new(vals[0], vals[1]),
                Point::new(vals[2], vals[3]),
                Point::new(vals[4], vals[5]),
            ));
        }
    }
    Err(Error::Parse {
        path: path.to_path_buf(),
        reason: "no line with six comma-separated numbers".into(),
    })
}

/// Writes the spotting anchor file with a header line.
pub fn write_anchors(path: impl AsRef<Path>, anchor: &AnchorTriple) -> Result<()> {
    let path = path.as_ref();
    let body = format!(
        "frame1_lx,ly,rx,ry,nx,ny\n{},{},{},{},{},{}\n",
        anchor.left_eye.x,
        anchor.left_eye.y,
        anchor.right_eye.x,
        anchor.right_eye.y,
        anchor.nasal_spine.x,
        anchor.nasal_spine.y
    );
    std::fs::write(path, body).map_err(|e| Error::io(path, e))
}
