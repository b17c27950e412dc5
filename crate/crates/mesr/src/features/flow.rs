//! Dense optical flow and flow-orientation histograms.
//!
//! The solver is a classic Horn-Schunck iteration run coarse-to-fine over a
//! small pyramid, with the finer level warped by the upsampled coarse flow
//! before solving for the residual.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::media::Frame;
use crate::raster::{bilinear, reduce, Border, Rect};

/// Flow vectors below this magnitude (in pixels) are ignored by histograms.
pub const FLOW_EPS: f64 = 1e-4;

/// Flow-orientation quantizer with bin *centers* on the axis directions,
/// so an axis-aligned motion lands in one bin instead of splitting across
/// an edge under estimation noise.
#[inline]
pub fn flow_orientation_bin(theta: f64, bins: usize) -> usize {
    let step = std::f64::consts::TAU / bins as f64;
    let shifted = theta + std::f64::consts::PI + step / 2.0;
    let idx = (shifted / step).floor() as isize;
    (idx.rem_euclid(bins as isize)) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowParams {
    /// Smoothness weight of the regularization term.
    pub smoothness: f64,
    /// Jacobi iterations per pyramid level.
    pub iterations: usize,
    /// Pyramid depth; 1 disables coarse-to-fine.
    pub levels: usize,
}

impl Default for FlowParams {
    fn default() -> Self {
        FlowParams {
            smoothness: 0.05,
            iterations: 100,
            levels: 2,
        }
    }
}

/// Dense flow field mapping reference pixels to their displaced positions.
#[derive(Debug, Clone)]
pub struct FlowField {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub width: usize,
    pub height: usize,
}

fn warp_by_flow(frame: &Frame, u: &[f64], v: &[f64]) -> Frame {
    Frame::from_fn(frame.width(), frame.height(), |x, y| {
        let i = y * frame.width() + x;
        bilinear(frame, x as f64 + u[i], y as f64 + v[i], Border::Replicate)
    })
}

/// Horn-Schunck derivative estimates averaged over the 2x2x2 cube.
fn derivatives(a: &Frame, b: &Frame) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let w = a.width();
    let h = a.height();
    let gv = |f: &Frame, x: usize, y: usize| f.get(x.min(w - 1), y.min(h - 1));
    let mut ex = vec![0.0; w * h];
    let mut ey = vec![0.0; w * h];
    let mut et = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            ex[i] = 0.25
                * (gv(a, x + 1, y) - gv(a, x, y) + gv(a, x + 1, y + 1) - gv(a, x, y + 1)
                    + gv(b, x + 1, y)
                    - gv(b, x, y)
                    + gv(b, x + 1, y + 1)
                    - gv(b, x, y + 1));
            ey[i] = 0.25
                * (gv(a, x, y + 1) - gv(a, x, y) + gv(a, x + 1, y + 1) - gv(a, x + 1, y)
                    + gv(b, x, y + 1)
                    - gv(b, x, y)
                    + gv(b, x + 1, y + 1)
                    - gv(b, x + 1, y));
            et[i] = 0.25
                * (gv(b, x, y) - gv(a, x, y) + gv(b, x + 1, y) - gv(a, x + 1, y) + gv(b, x, y + 1)
                    - gv(a, x, y + 1)
                    + gv(b, x + 1, y + 1)
                    - gv(a, x + 1, y + 1));
        }
    }
    (ex, ey, et)
}

/// Weighted neighborhood average used by the Jacobi update.
fn local_average(field: &[f64], w: usize, h: usize, out: &mut [f64]) {
    let at = |x: isize, y: isize| -> f64 {
        let xc = x.clamp(0, w as isize - 1) as usize;
        let yc = y.clamp(0, h as isize - 1) as usize;
        field[yc * w + xc]
    };
    for y in 0..h as isize {
        for x in 0..w as isize {
            let cardinal = at(x - 1, y) + at(x + 1, y) + at(x, y - 1) + at(x, y + 1);
            let diagonal =
                at(x - 1, y - 1) + at(x + 1, y - 1) + at(x - 1, y + 1) + at(x + 1, y + 1);
            out[y as usize * w + x as usize] = cardinal / 6.0 + diagonal / 12.0;
        }
    }
}

/// Bilinear flow upsampling from `(cw, ch)` to `(w, h)`, scaling the
/// vectors by two to compensate for the resolution change.
fn upsample2(field: &[f64], cw: usize, ch: usize, w: usize, h: usize) -> Vec<f64> {
    let sample = |x: f64, y: f64| -> f64 {
        let x0 = x.floor();
        let y0 = y.floor();
        let fx = x - x0;
        let fy = y - y0;
        let xi = (x0 as isize).clamp(0, cw as isize - 1) as usize;
        let yi = (y0 as isize).clamp(0, ch as isize - 1) as usize;
        let x1 = (xi + 1).min(cw - 1);
        let y1 = (yi + 1).min(ch - 1);
        let top = field[yi * cw + xi] + fx * (field[yi * cw + x1] - field[yi * cw + xi]);
        let bot = field[y1 * cw + xi] + fx * (field[y1 * cw + x1] - field[y1 * cw + xi]);
        top + fy * (bot - top)
    };
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            out[y * w + x] = 2.0 * sample(x as f64 / 2.0, y as f64 / 2.0);
        }
    }
    out
}

fn solve_level(
    reference: &Frame,
    moved: &Frame,
    params: &FlowParams,
    u: &mut Vec<f64>,
    v: &mut Vec<f64>,
) {
    let w = reference.width();
    let h = reference.height();
    let (ex, ey, et) = derivatives(reference, moved);
    let alpha2 = params.smoothness;
    let mut ubar = vec![0.0; w * h];
    let mut vbar = vec![0.0; w * h];
    for _ in 0..params.iterations {
        local_average(u, w, h, &mut ubar);
        local_average(v, w, h, &mut vbar);
        for i in 0..w * h {
            let num = ex[i] * ubar[i] + ey[i] * vbar[i] + et[i];
            let den = alpha2 + ex[i] * ex[i] + ey[i] * ey[i];
            let t = num / den;
            u[i] = ubar[i] - ex[i] * t;
            v[i] = vbar[i] - ey[i] * t;
        }
    }
}

/// Dense flow from `reference` to `frame`.
pub fn dense_flow(reference: &Frame, frame: &Frame, params: &FlowParams) -> Result<FlowField> {
    if reference.width() != frame.width() || reference.height() != frame.height() {
        return Err(Error::InconsistentDimensions {
            expected_width: reference.width(),
            expected_height: reference.height(),
            width: frame.width(),
            height: frame.height(),
            context: "dense flow inputs".into(),
        });
    }
    if params.levels == 0 || params.iterations == 0 {
        return Err(Error::InvalidParameter(
            "flow needs at least one level and one iteration".into(),
        ));
    }

    // build pyramids, coarsest last
    let mut ref_pyr = vec![reference.clone()];
    let mut mov_pyr = vec![frame.clone()];
    for _ in 1..params.levels {
        let r = ref_pyr.last().unwrap();
        if r.width() < 8 || r.height() < 8 {
            break;
        }
        ref_pyr.push(reduce(r));
        mov_pyr.push(reduce(mov_pyr.last().unwrap()));
    }

    let coarsest = ref_pyr.len() - 1;
    let mut u = vec![0.0; ref_pyr[coarsest].width() * ref_pyr[coarsest].height()];
    let mut v = u.clone();

    for level in (0..=coarsest).rev() {
        let r = &ref_pyr[level];
        let m = &mov_pyr[level];
        if level != coarsest {
            // upsample flow from the previous (coarser) level, doubling it
            let cw = ref_pyr[level + 1].width();
            let ch = ref_pyr[level + 1].height();
            u = upsample2(&u, cw, ch, r.width(), r.height());
            v = upsample2(&v, cw, ch, r.width(), r.height());
        }
        // warp the moving image by the current estimate, solve for residual
        let warped = warp_by_flow(m, &u, &v);
        let mut du = vec![0.0; u.len()];
        let mut dv = vec![0.0; v.len()];
        solve_level(r, &warped, params, &mut du, &mut dv);
        for i in 0..u.len() {
            u[i] += du[i];
            v[i] += dv[i];
        }
    }

    Ok(FlowField {
        u,
        v,
        width: reference.width(),
        height: reference.height(),
    })
}

/// Magnitude-weighted orientation histogram of a flow field over `region`,
/// L1-normalized. All-zero flow yields the flagged all-zero histogram.
pub fn hoof_from_flow(flow: &FlowField, region: Rect, bins: usize) -> Result<Vec<f64>> {
    if bins == 0 {
        return Err(Error::InvalidParameter("bins must be positive".into()));
    }
    if !region.fits_in(flow.width, flow.height) {
        return Err(Error::OutOfBounds(format!(
            "region {:?} outside {}x{} flow field",
            region, flow.width, flow.height
        )));
    }
    let mut hist = vec![0.0; bins];
    for y in region.y0..region.y1 {
        for x in region.x0..region.x1 {
            let i = y * flow.width + x;
            let m = flow.u[i].hypot(flow.v[i]);
            if m < FLOW_EPS {
                continue;
            }
            hist[flow_orientation_bin(flow.v[i].atan2(flow.u[i]), bins)] += m;
        }
    }
    let sum: f64 = hist.iter().sum();
    if sum > 0.0 {
        for h in &mut hist {
            *h /= sum;
        }
    }
    Ok(hist)
}

/// Flow-orientation histogram of `frame` against a reference frame.
pub fn hoof(frame: &Frame, reference: &Frame, region: Rect, bins: usize) -> Result<Vec<f64>> {
    let flow = dense_flow(reference, frame, &FlowParams::default())?;
    hoof_from_flow(&flow, region, bins)
}
