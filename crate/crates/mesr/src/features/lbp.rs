//! Local binary patterns on frames and on the three orthogonal planes of a
//! frame volume.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{
    CuboidPartition, DescriptorKind, DescriptorLayout, DescriptorVector, GlobalNorm, Plane,
    PlaneCombination,
};
use crate::media::{Frame, FrameSequence};
use crate::raster::Rect;

/// Circular neighborhood parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LbpParams {
    /// Number of sampled neighbors on the circle.
    pub p: usize,
    /// Circle radius in pixels.
    pub r: f64,
    /// Map codes through the uniform-2 table (histogram length p(p-1)+3).
    pub uniform: bool,
}

impl Default for LbpParams {
    fn default() -> Self {
        LbpParams {
            p: 8,
            r: 3.0,
            uniform: true,
        }
    }
}

impl LbpParams {
    pub fn validate(&self) -> Result<()> {
        if self.p < 4 || self.p > 16 {
            return Err(Error::InvalidParameter(format!(
                "neighbor count p must be in [4, 16], got {}",
                self.p
            )));
        }
        if self.r < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "radius must be >= 1, got {}",
                self.r
            )));
        }
        Ok(())
    }

    /// Number of histogram bins produced under these parameters.
    pub fn histogram_len(&self) -> usize {
        if self.uniform {
            self.p * (self.p - 1) + 3
        } else {
            1 << self.p
        }
    }

    /// Margin (in pixels) a center must keep from the volume border.
    pub fn margin(&self) -> usize {
        self.r.ceil() as usize
    }
}

/// Number of circular 0/1 transitions in a p-bit code.
fn transitions(code: u32, p: usize) -> u32 {
    let mut t = 0;
    for i in 0..p {
        let a = (code >> i) & 1;
        let b = (code >> ((i + 1) % p)) & 1;
        t += a ^ b;
    }
    t
}

/// Bin index table: uniform codes get consecutive bins in ascending code
/// order, all non-uniform codes share the final bin.
pub(crate) fn uniform_table(p: usize) -> Vec<usize> {
    let size = 1usize << p;
    let last = p * (p - 1) + 2;
    let mut table = vec![last; size];
    let mut next = 0;
    for code in 0..size {
        if transitions(code as u32, p) <= 2 {
            table[code] = next;
            next += 1;
        }
    }
    debug_assert_eq!(next, last);
    table
}

/// Neighbor offsets on the circle, east first, counter-clockwise in image
/// coordinates (y down). Near-integer offsets are snapped so that integer
/// sampling positions stay exact.
fn neighbor_offsets(p: usize, r: f64) -> Vec<(f64, f64)> {
    (0..p)
        .map(|i| {
            let angle = std::f64::consts::TAU * i as f64 / p as f64;
            let snap = |v: f64| {
                if (v - v.round()).abs() < 1e-9 {
                    v.round()
                } else {
                    v
                }
            };
            (snap(r * angle.cos()), snap(-r * angle.sin()))
        })
        .collect()
}

/// Generic plane sampler: a 2-D slice of some volume.
trait PlaneView {
    fn extent(&self) -> (usize, usize);
    fn at(&self, a: usize, b: usize) -> f64;

    fn sample(&self, a: f64, b: f64) -> f64 {
        let (na, nb) = self.extent();
        let a0 = a.floor();
        let b0 = b.floor();
        let fa = a - a0;
        let fb = b - b0;
        let ai = (a0 as isize).clamp(0, na as isize - 1) as usize;
        let bi = (b0 as isize).clamp(0, nb as isize - 1) as usize;
        let a1 = (ai + 1).min(na - 1);
        let b1 = (bi + 1).min(nb - 1);
        let v00 = self.at(ai, bi);
        let v10 = self.at(a1, bi);
        let v01 = self.at(ai, b1);
        let v11 = self.at(a1, b1);
        let top = v00 + fa * (v10 - v00);
        let bot = v01 + fa * (v11 - v01);
        top + fb * (bot - top)
    }
}

struct XyView<'a>(&'a Frame);

impl PlaneView for XyView<'_> {
    fn extent(&self) -> (usize, usize) {
        (self.0.width(), self.0.height())
    }
    fn at(&self, a: usize, b: usize) -> f64 {
        self.0.get(a, b)
    }
}

struct XtView<'a> {
    frames: &'a [Frame],
    y: usize,
}

impl PlaneView for XtView<'_> {
    fn extent(&self) -> (usize, usize) {
        (self.frames[0].width(), self.frames.len())
    }
    fn at(&self, a: usize, b: usize) -> f64 {
        self.frames[b].get(a, self.y)
    }
}

struct YtView<'a> {
    frames: &'a [Frame],
    x: usize,
}

impl PlaneView for YtView<'_> {
    fn extent(&self) -> (usize, usize) {
        (self.frames[0].height(), self.frames.len())
    }
    fn at(&self, a: usize, b: usize) -> f64 {
        self.frames[b].get(self.x, a)
    }
}

fn code_on_plane<V: PlaneView>(
    view: &V,
    a: usize,
    b: usize,
    offsets: &[(f64, f64)],
    table: Option<&[usize]>,
) -> usize {
    let center = view.at(a, b);
    let mut code = 0u32;
    for (i, (da, db)) in offsets.iter().enumerate() {
        let v = view.sample(a as f64 + da, b as f64 + db);
        if v >= center {
            code |= 1 << i;
        }
    }
    match table {
        Some(t) => t[code as usize],
        None => code as usize,
    }
}

/// Binary pattern at one pixel; returns the histogram bin index (uniform
/// mapping applied when requested).
pub fn lbp_code(frame: &Frame, x: usize, y: usize, params: &LbpParams) -> Result<usize> {
    params.validate()?;
    let m = params.margin();
    if x < m || y < m || x + m >= frame.width() || y + m >= frame.height() {
        return Err(Error::OutOfBounds(format!(
            "center ({x}, {y}) too close to border for radius {}",
            params.r
        )));
    }
    let offsets = neighbor_offsets(params.p, params.r);
    let table = params.uniform.then(|| uniform_table(params.p));
    Ok(code_on_plane(
        &XyView(frame),
        x,
        y,
        &offsets,
        table.as_deref(),
    ))
}

/// L1-normalized pattern histogram over every valid center inside `region`.
pub fn lbp_frame_histogram(frame: &Frame, region: Rect, params: &LbpParams) -> Result<Vec<f64>> {
    params.validate()?;
    if !region.fits_in(frame.width(), frame.height()) {
        return Err(Error::OutOfBounds(format!(
            "region {:?} outside {}x{} frame",
            region,
            frame.width(),
            frame.height()
        )));
    }
    let m = params.margin();
    let offsets = neighbor_offsets(params.p, params.r);
    let table = params.uniform.then(|| uniform_table(params.p));
    let mut hist = vec![0.0; params.histogram_len()];
    let view = XyView(frame);
    let mut count = 0usize;
    let x_lo = region.x0.max(m);
    let x_hi = region.x1.min(frame.width().saturating_sub(m));
    let y_lo = region.y0.max(m);
    let y_hi = region.y1.min(frame.height().saturating_sub(m));
    for y in y_lo..y_hi {
        for x in x_lo..x_hi {
            hist[code_on_plane(&view, x, y, &offsets, table.as_deref())] += 1.0;
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::OutOfBounds(format!(
            "region {region:?} has no valid centers for radius {}",
            params.r
        )));
    }
    let n = count as f64;
    for v in &mut hist {
        *v /= n;
    }
    Ok(hist)
}

/// Pattern histograms per cuboid on the planes selected by `combo`,
/// locally L1-normalized and concatenated cuboid-major.
///
/// Centers run over every cuboid pixel; neighborhoods may cross cuboid
/// borders but must fit inside the frame volume. Cuboids whose valid
/// center set is empty contribute an all-zero histogram.
pub fn lbp_top(
    clip: &FrameSequence,
    partition: &CuboidPartition,
    combo: PlaneCombination,
    params: &LbpParams,
) -> Result<DescriptorVector> {
    params.validate()?;
    partition.validate()?;
    let m = params.margin();
    let temporal = combo.planes().iter().any(|p| *p != Plane::Xy);
    if temporal && clip.len() < 2 * m + 1 {
        return Err(Error::InvalidSequence(format!(
            "clip of {} frames too short for temporal radius {} (needs {})",
            clip.len(),
            params.r,
            2 * m + 1
        )));
    }
    let offsets = neighbor_offsets(params.p, params.r);
    let table = params.uniform.then(|| uniform_table(params.p));
    let bins = params.histogram_len();
    let frames = clip.frames();
    let (w, h, t_len) = (clip.width(), clip.height(), clip.len());

    let layout = DescriptorLayout {
        kind: DescriptorKind::Lbp,
        partition: *partition,
        combo,
        bins_per_plane: bins,
        lbp: Some(*params),
        global_norm: GlobalNorm::None,
        signed_orientation: true,
    };
    let mut values = Vec::with_capacity(layout.len());

    for cuboid in partition.cuboids(w, h, t_len) {
        for plane in combo.planes() {
            let mut hist = vec![0.0f64; bins];
            let mut count = 0usize;
            match plane {
                Plane::Xy => {
                    let x_lo = cuboid.x.start.max(m);
                    let x_hi = cuboid.x.end.min(w - m);
                    for t in cuboid.t.clone() {
                        let view = XyView(&frames[t]);
                        for y in cuboid.y.start.max(m)..cuboid.y.end.min(h - m) {
                            for x in x_lo..x_hi {
                                hist[code_on_plane(&view, x, y, &offsets, table.as_deref())] += 1.0;
                                count += 1;
                            }
                        }
                    }
                }
                Plane::Xt => {
                    let x_lo = cuboid.x.start.max(m);
                    let x_hi = cuboid.x.end.min(w - m);
                    let t_lo = cuboid.t.start.max(m);
                    let t_hi = cuboid.t.end.min(t_len - m);
                    for y in cuboid.y.clone() {
                        let view = XtView { frames, y };
                        for t in t_lo..t_hi {
                            for x in x_lo..x_hi {
                                hist[code_on_plane(&view, x, t, &offsets, table.as_deref())] += 1.0;
                                count += 1;
                            }
                        }
                    }
                }
                Plane::Yt => {
                    let y_lo = cuboid.y.start.max(m);
                    let y_hi = cuboid.y.end.min(h - m);
                    let t_lo = cuboid.t.start.max(m);
                    let t_hi = cuboid.t.end.min(t_len - m);
                    for x in cuboid.x.clone() {
                        let view = YtView { frames, x };
                        for t in t_lo..t_hi {
                            for y in y_lo..y_hi {
                                hist[code_on_plane(&view, y, t, &offsets, table.as_deref())] += 1.0;
                                count += 1;
                            }
                        }
                    }
                }
            }
            if count > 0 {
                let n = count as f64;
                for v in &mut hist {
                    *v /= n;
                }
            }
            values.extend_from_slice(&hist);
        }
    }
    debug_assert_eq!(values.len(), layout.len());
    Ok(DescriptorVector { values, layout })
}
