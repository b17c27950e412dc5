//! Appearance descriptors: binary patterns, oriented gradients and flow
//! histograms, each computable per frame region or per cuboid on the three
//! orthogonal planes of a clip volume.

mod flow;
mod gradient;
mod lbp;

pub use flow::{
    dense_flow, flow_orientation_bin, hoof, hoof_from_flow, FlowField, FlowParams, FLOW_EPS,
};
pub use gradient::{
    gradient, higo_top, hog_histogram, hog_top, orientation_bin, GradientField, MAGNITUDE_EPS,
};
pub use lbp::{lbp_code, lbp_frame_histogram, lbp_top, LbpParams};

use std::io::Write;
use std::ops::Range;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Block counts along the X, Y and T axes of a clip volume.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CuboidPartition {
    pub nx: usize,
    pub ny: usize,
    pub nt: usize,
}

impl CuboidPartition {
    pub fn new(nx: usize, ny: usize, nt: usize) -> Self {
        CuboidPartition { nx, ny, nt }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 || self.nt == 0 {
            return Err(Error::InvalidParameter(
                "cuboid partition counts must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn count(&self) -> usize {
        self.nx * self.ny * self.nt
    }

    /// Cuboid extents in deterministic order: spatial row-major, then
    /// temporal. Boundaries use integer floor division so the cuboids tile
    /// the volume exactly.
    pub fn cuboids(&self, width: usize, height: usize, t_len: usize) -> Vec<Cuboid> {
        let edge = |i: usize, n: usize, size: usize| i * size / n;
        let mut out = Vec::with_capacity(self.count());
        for cy in 0..self.ny {
            for cx in 0..self.nx {
                for ct in 0..self.nt {
                    out.push(Cuboid {
                        x: edge(cx, self.nx, width)..edge(cx + 1, self.nx, width),
                        y: edge(cy, self.ny, height)..edge(cy + 1, self.ny, height),
                        t: edge(ct, self.nt, t_len)..edge(ct + 1, self.nt, t_len),
                    });
                }
            }
        }
        out
    }
}

/// One block of a partitioned volume.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cuboid {
    pub x: Range<usize>,
    pub y: Range<usize>,
    pub t: Range<usize>,
}

/// One of the three orthogonal planes of a clip volume.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Plane {
    Xy,
    Xt,
    Yt,
}

/// Which plane histograms make up a descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlaneCombination {
    /// All three planes: XY + XT + YT.
    #[serde(rename = "top")]
    Top,
    /// Temporal planes only: XT + YT.
    #[serde(rename = "xyot")]
    XyOt,
    /// XT plane only.
    #[serde(rename = "xot")]
    XOt,
    /// YT plane only.
    #[serde(rename = "yot")]
    YOt,
    /// Spatial plane only.
    #[serde(rename = "xy")]
    Xy,
}

impl PlaneCombination {
    pub fn planes(&self) -> &'static [Plane] {
        match self {
            PlaneCombination::Top => &[Plane::Xy, Plane::Xt, Plane::Yt],
            PlaneCombination::XyOt => &[Plane::Xt, Plane::Yt],
            PlaneCombination::XOt => &[Plane::Xt],
            PlaneCombination::YOt => &[Plane::Yt],
            PlaneCombination::Xy => &[Plane::Xy],
        }
    }

    pub const ALL: [PlaneCombination; 5] = [
        PlaneCombination::Top,
        PlaneCombination::XyOt,
        PlaneCombination::XOt,
        PlaneCombination::YOt,
        PlaneCombination::Xy,
    ];
}

impl std::fmt::Display for PlaneCombination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PlaneCombination::Top => "top",
            PlaneCombination::XyOt => "xyot",
            PlaneCombination::XOt => "xot",
            PlaneCombination::YOt => "yot",
            PlaneCombination::Xy => "xy",
        };
        f.write_str(s)
    }
}

/// Descriptor family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DescriptorKind {
    Lbp,
    Hog,
    Higo,
    Hoof,
}

/// Normalization applied to the concatenated vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum GlobalNorm {
    None,
    L1,
    #[default]
    L2,
}

fn default_signed() -> bool {
    true
}

/// Layout metadata describing how a descriptor vector was produced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DescriptorLayout {
    pub kind: DescriptorKind,
    pub partition: CuboidPartition,
    pub combo: PlaneCombination,
    /// Histogram length contributed by one cuboid-plane pair.
    pub bins_per_plane: usize,
    /// Neighborhood parameters when `kind` is a binary-pattern descriptor.
    pub lbp: Option<LbpParams>,
    pub global_norm: GlobalNorm,
    /// Orientation bins span the full signed range `[-pi, pi]`.
    #[serde(default = "default_signed")]
    pub signed_orientation: bool,
}

impl DescriptorLayout {
    /// Total vector length: cuboids x planes x bins.
    pub fn len(&self) -> usize {
        self.partition.count() * self.combo.planes().len() * self.bins_per_plane
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Value range of the histogram for `(cuboid, plane_position)` where
    /// `plane_position` indexes into `combo.planes()`.
    pub fn segment(&self, cuboid: usize, plane_position: usize) -> Range<usize> {
        let planes = self.combo.planes().len();
        let start = (cuboid * planes + plane_position) * self.bins_per_plane;
        start..start + self.bins_per_plane
    }
}

/// A concatenated cuboid-plane histogram vector for one clip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptorVector {
    pub values: Vec<f64>,
    pub layout: DescriptorLayout,
}

impl DescriptorVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Histogram slice of one cuboid-plane pair.
    pub fn segment(&self, cuboid: usize, plane_position: usize) -> &[f64] {
        &self.values[self.layout.segment(cuboid, plane_position)]
    }
}

/// Writes descriptors as CSV (`id,label,v_1,...,v_d`) with the layout
/// metadata in a sidecar JSON file next to it (same path, `.json` extension).
pub fn write_descriptor_csv(
    path: impl AsRef<Path>,
    rows: &[(String, String, DescriptorVector)],
) -> Result<()> {
    let path = path.as_ref();
    if rows.is_empty() {
        return Err(Error::Validation("no descriptor rows to write".into()));
    }
    let layout = rows[0].2.layout;
    for (id, _, d) in rows {
        if d.layout != layout {
            return Err(Error::Validation(format!(
                "descriptor layout for {id} differs from the first row"
            )));
        }
    }
    let mut out = Vec::new();
    for (id, label, d) in rows {
        write!(out, "{id},{label}").expect("vec write");
        for v in &d.values {
            write!(out, ",{v}").expect("vec write");
        }
        out.push(b'\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))?;
    let sidecar = path.with_extension("json");
    let meta = serde_json::to_string_pretty(&layout)?;
    std::fs::write(&sidecar, meta).map_err(|e| Error::io(sidecar, e))?;
    Ok(())
}

/// Reads a descriptor CSV and its sidecar layout.
pub fn read_descriptor_csv(
    path: impl AsRef<Path>,
) -> Result<Vec<(String, String, DescriptorVector)>> {
    let path = path.as_ref();
    let sidecar = path.with_extension("json");
    let meta = std::fs::read_to_string(&sidecar).map_err(|e| Error::io(&sidecar, e))?;
    let layout: DescriptorLayout = serde_json::from_str(&meta)?;
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let id = parts.next().unwrap_or_default().to_string();
        let label = parts
            .next()
            .ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                reason: format!("line {}: missing label", lineno + 1),
            })?
            .to_string();
        let values: Vec<f64> = parts
            .map(|v| {
                v.parse().map_err(|_| Error::Parse {
                    path: path.to_path_buf(),
                    reason: format!("line {}: bad value {v:?}", lineno + 1),
                })
            })
            .collect::<Result<_>>()?;
        if values.len() != layout.len() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                reason: format!(
                    "line {}: {} values, layout expects {}",
                    lineno + 1,
                    values.len(),
                    layout.len()
                ),
            });
        }
        rows.push((id, label, DescriptorVector { values, layout }));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::media::synth::textured_frame;
    use crate::media::FrameSequence;
    use proptest::prelude::*;

    fn random_clip(seed: u64, n: usize) -> FrameSequence {
        let frames = (0..n as u64)
            .map(|i| textured_frame(24, 20, seed * 100 + i))
            .collect();
        FrameSequence::new(frames, 25.0, format!("clip{seed}")).unwrap()
    }

    #[test]
    fn cuboids_tile_volume_exactly() {
        let part = CuboidPartition::new(3, 4, 2);
        let cuboids = part.cuboids(25, 19, 11);
        assert_eq!(cuboids.len(), 24);
        let mut covered = vec![false; 25 * 19 * 11];
        for c in &cuboids {
            for t in c.t.clone() {
                for y in c.y.clone() {
                    for x in c.x.clone() {
                        let i = (t * 19 + y) * 25 + x;
                        assert!(!covered[i], "overlap at ({x},{y},{t})");
                        covered[i] = true;
                    }
                }
            }
        }
        assert!(covered.iter().all(|&c| c));
    }

    #[test]
    fn combination_vectors_are_slices_of_top() {
        let clip = random_clip(9, 8);
        let part = CuboidPartition::new(2, 2, 2);
        let params = LbpParams {
            p: 8,
            r: 1.0,
            uniform: true,
        };
        let top = lbp_top(&clip, &part, PlaneCombination::Top, &params).unwrap();
        for combo in [
            PlaneCombination::XyOt,
            PlaneCombination::XOt,
            PlaneCombination::YOt,
            PlaneCombination::Xy,
        ] {
            let sub = lbp_top(&clip, &part, combo, &params).unwrap();
            let mut gathered = Vec::new();
            for cuboid in 0..part.count() {
                for plane in combo.planes() {
                    let pos = PlaneCombination::Top
                        .planes()
                        .iter()
                        .position(|p| p == plane)
                        .unwrap();
                    gathered.extend_from_slice(top.segment(cuboid, pos));
                }
            }
            assert_eq!(sub.values, gathered, "{combo} mismatch");
        }
    }

    #[test]
    fn descriptor_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let clip = random_clip(3, 6);
        let part = CuboidPartition::new(2, 2, 1);
        let d = higo_top(&clip, &part, PlaneCombination::XyOt, 8, GlobalNorm::L2).unwrap();
        let rows = vec![
            ("c1".to_string(), "positive".to_string(), d.clone()),
            ("c2".to_string(), "negative".to_string(), d),
        ];
        let path = dir.path().join("features.csv");
        write_descriptor_csv(&path, &rows).unwrap();
        let back = read_descriptor_csv(&path).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].0, "c1");
        assert_eq!(back[1].1, "negative");
        assert_eq!(back[0].2, rows[0].2);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        /// every per-cuboid histogram sums to one or is all-zero, and no
        /// entry anywhere is negative
        #[test]
        fn cuboid_histograms_normalized_or_zero(seed in 0u64..500, nt in 1usize..4) {
            let clip = random_clip(seed, 6);
            let part = CuboidPartition::new(2, 2, nt);
            let params = LbpParams { p: 8, r: 1.0, uniform: true };
            let lbp = lbp_top(&clip, &part, PlaneCombination::Top, &params).unwrap();
            let hog = hog_top(&clip, &part, PlaneCombination::Top, 8, GlobalNorm::None).unwrap();
            for d in [&lbp, &hog] {
                prop_assert!(d.values.iter().all(|&v| v >= 0.0));
                for cuboid in 0..part.count() {
                    for pos in 0..d.layout.combo.planes().len() {
                        let s: f64 = d.segment(cuboid, pos).iter().sum();
                        prop_assert!(s == 0.0 || (s - 1.0).abs() < 1e-9, "sum {s}");
                    }
                }
            }
        }

        /// two runs on the same clip produce bit-identical vectors
        #[test]
        fn descriptors_are_deterministic(seed in 0u64..500) {
            let clip = random_clip(seed, 6);
            let part = CuboidPartition::new(2, 2, 2);
            let a = higo_top(&clip, &part, PlaneCombination::Top, 8, GlobalNorm::L2).unwrap();
            let b = higo_top(&clip, &part, PlaneCombination::Top, 8, GlobalNorm::L2).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
