//! Synthetic corpus generation: sequences with known injected transients,
//! written to disk with manifests, anchors, landmarks and ground truth so
//! the full pipeline can run on them.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{model_face, write_anchors, write_landmarks, AnchorTriple, LandmarkSet};
use crate::media::synth::{synthesize_transient, textured_frame, TransientSpec};
use crate::media::{save_sequence, FrameSequence};
use crate::pipeline::manifest::{ClipRecord, DatasetManifest};
use crate::raster::{Point, Rect};
use crate::spotting::{write_ground_truth, GroundTruth, GtInterval};

/// Emotion classes of the synthetic corpora. Each class moves its own
/// characteristic face region in its own direction, the way an expression
/// engages a consistent muscle group.
pub const SYNTH_CLASSES: [(&str, (f64, f64)); 3] = [
    ("positive", (0.0, -1.0)),
    ("negative", (0.0, 1.0)),
    ("surprise", (1.0, 0.0)),
];

/// Center of each class's moving region on the 200 px face canvas.
const CLASS_REGIONS_200: [(usize, usize); 3] = [(80, 78), (100, 135), (118, 100)];
/// The same on the 96 px spotting canvas.
const CLASS_REGIONS_96: [(usize, usize); 3] = [(38, 36), (48, 60), (57, 46)];

fn class_index(label: &str) -> usize {
    SYNTH_CLASSES
        .iter()
        .position(|(name, _)| *name == label)
        .unwrap_or(0)
}

/// What kind of corpus to generate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusKind {
    /// Long 96x96 sequences with anchors and ground truth, for spotting.
    Spotting,
    /// Short labeled clips with landmarks, for recognition.
    Recognition,
    /// Long 200x200 sequences with anchors, landmarks, labels and ground
    /// truth, for the combined run.
    Mesr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub kind: CorpusKind,
    pub seed: u64,
    /// Sequences (spotting) or clips per subject (recognition, mesr).
    pub sequences: usize,
    pub subjects: usize,
    /// Frames per long sequence.
    pub frames: usize,
    pub fps: f64,
    /// Peak transient displacement in pixels.
    pub amplitude: f64,
    /// Whole-frame drift magnitude in pixels per frame.
    pub drift: f64,
}

impl CorpusSpec {
    pub fn new(kind: CorpusKind) -> Self {
        match kind {
            CorpusKind::Spotting => CorpusSpec {
                kind,
                seed: 7,
                sequences: 30,
                subjects: 5,
                frames: 200,
                fps: 25.0,
                amplitude: 2.0,
                drift: 0.05,
            },
            CorpusKind::Recognition => CorpusSpec {
                kind,
                seed: 7,
                sequences: 6,
                subjects: 3,
                frames: 16,
                fps: 25.0,
                amplitude: 2.2,
                drift: 0.0,
            },
            CorpusKind::Mesr => CorpusSpec {
                kind,
                seed: 7,
                sequences: 6,
                subjects: 3,
                frames: 150,
                fps: 25.0,
                amplitude: 2.2,
                drift: 0.02,
            },
        }
    }
}

/// The 200x200 face canvas used by recognition-capable corpora, matching
/// the built-in model-face geometry.
const FACE_CANVAS: usize = 200;

fn face_anchor_200() -> AnchorTriple {
    AnchorTriple::new(
        Point::new(70.0, 90.0),
        Point::new(130.0, 90.0),
        Point::new(100.0, 120.0),
    )
}

fn face_anchor_96() -> AnchorTriple {
    AnchorTriple::new(
        Point::new(32.0, 34.0),
        Point::new(64.0, 34.0),
        Point::new(48.0, 53.0),
    )
}

fn jittered_landmarks(rng: &mut ChaCha8Rng) -> LandmarkSet {
    let (dx, dy) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    model_face().map(|p| Point::new(p.x + dx, p.y + dy))
}

/// Face-like base frame: a texture template shared across the corpus
/// (registered faces share their gross structure) blended with a weaker
/// clip-specific texture.
fn face_base(canvas: usize, corpus_seed: u64, clip_seed: u64) -> crate::media::Frame {
    let template = textured_frame(canvas, canvas, corpus_seed);
    let own = textured_frame(canvas, canvas, clip_seed);
    crate::media::Frame::from_fn(canvas, canvas, |x, y| {
        0.85 * template.get(x, y) + 0.15 * own.get(x, y)
    })
}

struct SequencePlan {
    id: String,
    subject: String,
    label: String,
    seq: FrameSequence,
    interval: Option<GtInterval>,
    anchor: AnchorTriple,
    landmarks: Option<LandmarkSet>,
}

fn direction_for(label: &str) -> (f64, f64) {
    SYNTH_CLASSES
        .iter()
        .find(|(name, _)| *name == label)
        .map(|(_, d)| *d)
        .unwrap_or((1.0, 0.0))
}

/// One long sequence with a single injected transient.
fn plan_long_sequence(
    spec: &CorpusSpec,
    index: usize,
    subject: usize,
    label: &str,
    canvas: usize,
    anchor: AnchorTriple,
    with_landmarks: bool,
) -> Result<SequencePlan> {
    let mut rng = ChaCha8Rng::seed_from_u64(
        spec.seed ^ (0x9e3779b97f4a7c15u64.wrapping_mul(index as u64 + 1)),
    );
    let base = face_base(canvas, spec.seed, rng.gen());
    let duration = rng.gen_range(7..=11);
    // keep the transient clear of the contrast signal's masked ends
    let margin = (spec.frames / 5).clamp(12, 30);
    if spec.frames < duration + 2 * margin + 1 {
        return Err(Error::Validation(format!(
            "{} frames are too few for a {duration}-frame transient with {margin}-frame margins",
            spec.frames
        )));
    }
    let onset = rng.gen_range(margin..spec.frames - duration - margin);
    let offset = onset + duration - 1;
    // the class region, jittered, inside both the spotting grid and the
    // recognition crop
    let (cx, cy, side) = if canvas == FACE_CANVAS {
        let (cx, cy) = CLASS_REGIONS_200[class_index(label)];
        (cx, cy, 30)
    } else {
        let (cx, cy) = CLASS_REGIONS_96[class_index(label)];
        (cx, cy, 16)
    };
    let jitter = side / 6;
    let bx = cx - side / 2 + rng.gen_range(0..=jitter) - jitter / 2;
    let by = cy - side / 2 + rng.gen_range(0..=jitter) - jitter / 2;
    let angle = rng.gen_range(0.0..std::f64::consts::TAU);
    let transient = TransientSpec {
        amplitude_px: spec.amplitude,
        direction: direction_for(label),
        intensity_delta: 0.0,
        drift_per_frame: (spec.drift * angle.cos(), spec.drift * angle.sin()),
        noise_sigma: 0.0,
        seed: rng.gen(),
    };
    let seq = synthesize_transient(
        &base,
        onset,
        offset,
        spec.frames,
        Rect::new(bx, by, bx + side, by + side),
        &transient,
    )?;
    let landmarks = with_landmarks.then(|| jittered_landmarks(&mut rng));
    Ok(SequencePlan {
        id: format!("seq{index:03}"),
        subject: format!("s{subject:02}"),
        label: label.to_string(),
        seq,
        interval: Some(GtInterval {
            onset,
            offset,
            label: label.to_string(),
        }),
        anchor,
        landmarks,
    })
}

/// One short labeled clip whose motion spans the whole clip.
fn plan_short_clip(
    spec: &CorpusSpec,
    index: usize,
    subject: usize,
    label: &str,
) -> Result<SequencePlan> {
    let mut rng = ChaCha8Rng::seed_from_u64(
        spec.seed ^ (0xd1b54a32d192ed03u64.wrapping_mul(index as u64 + 1)),
    );
    let base = face_base(FACE_CANVAS, spec.seed, rng.gen());
    let len = rng.gen_range(12..=20);
    let (cx, cy) = CLASS_REGIONS_200[class_index(label)];
    let (bx, by) = (
        cx - 15 + rng.gen_range(0..=5) - 2,
        cy - 15 + rng.gen_range(0..=5) - 2,
    );
    let transient = TransientSpec {
        amplitude_px: spec.amplitude,
        direction: direction_for(label),
        intensity_delta: 0.0,
        drift_per_frame: (0.0, 0.0),
        noise_sigma: 0.0,
        seed: rng.gen(),
    };
    let seq = synthesize_transient(
        &base,
        1,
        len - 2,
        len,
        Rect::new(bx, by, bx + 30, by + 30),
        &transient,
    )?;
    Ok(SequencePlan {
        id: format!("clip{index:03}"),
        subject: format!("s{subject:02}"),
        label: label.to_string(),
        seq,
        interval: None,
        anchor: face_anchor_200(),
        landmarks: Some(jittered_landmarks(&mut rng)),
    })
}

/// Generates a corpus under `dir` and returns the manifest path.
pub fn generate_corpus(dir: impl AsRef<Path>, spec: &CorpusSpec) -> Result<PathBuf> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for sub in ["clips", "anchors", "landmarks"] {
        let p = dir.join(sub);
        std::fs::create_dir_all(&p).map_err(|e| Error::io(p, e))?;
    }

    let plans: Vec<SequencePlan> = match spec.kind {
        CorpusKind::Spotting => (0..spec.sequences)
            .into_par_iter()
            .map(|i| {
                let label = SYNTH_CLASSES[i % 3].0;
                plan_long_sequence(
                    spec,
                    i,
                    i % spec.subjects,
                    label,
                    96,
                    face_anchor_96(),
                    false,
                )
            })
            .collect::<Result<_>>()?,
        CorpusKind::Mesr => (0..spec.subjects * spec.sequences)
            .into_par_iter()
            .map(|i| {
                let label = SYNTH_CLASSES[i % 3].0;
                plan_long_sequence(
                    spec,
                    i,
                    i / spec.sequences,
                    label,
                    FACE_CANVAS,
                    face_anchor_200(),
                    true,
                )
            })
            .collect::<Result<_>>()?,
        CorpusKind::Recognition => (0..spec.subjects * spec.sequences)
            .into_par_iter()
            .map(|i| plan_short_clip(spec, i, i / spec.sequences, SYNTH_CLASSES[i % 3].0))
            .collect::<Result<_>>()?,
    };

    let mut gt = GroundTruth::new();
    let mut clips = Vec::with_capacity(plans.len());
    for plan in &plans {
        let clip_dir = dir.join("clips").join(&plan.id);
        save_sequence(&clip_dir, &plan.seq)?;
        let anchors_rel = PathBuf::from("anchors").join(format!("{}.csv", plan.id));
        write_anchors(dir.join(&anchors_rel), &plan.anchor)?;
        let landmarks_rel = plan.landmarks.as_ref().map(|lms| {
            let rel = PathBuf::from("landmarks").join(format!("{}.csv", plan.id));
            (rel, lms)
        });
        if let Some((rel, lms)) = &landmarks_rel {
            write_landmarks(dir.join(rel), lms)?;
        }
        if let Some(interval) = &plan.interval {
            gt.insert(&plan.id, interval.clone());
        }
        clips.push(ClipRecord {
            id: plan.id.clone(),
            dir: PathBuf::from("clips").join(&plan.id),
            fps: spec.fps,
            subject: plan.subject.clone(),
            anchors: Some(anchors_rel),
            landmarks: landmarks_rel.map(|(rel, _)| rel),
            label: Some(plan.label.clone()),
            ground_truth: plan.interval.as_ref().map(|_| PathBuf::from("gt.csv")),
        });
    }
    if spec.kind != CorpusKind::Recognition {
        write_ground_truth(dir.join("gt.csv"), &gt)?;
    }

    let manifest = DatasetManifest::from_clips(clips, dir)?;
    let manifest_path = dir.join("manifest.json");
    manifest.save(&manifest_path)?;
    Ok(manifest_path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::media::load_sequence;

    #[test]
    fn spotting_corpus_layout() {
        let tmp = tempfile::tempdir().unwrap();
        let spec = CorpusSpec {
            sequences: 3,
            frames: 80,
            ..CorpusSpec::new(CorpusKind::Spotting)
        };
        let manifest_path = generate_corpus(tmp.path(), &spec).unwrap();
        let manifest = DatasetManifest::load(&manifest_path).unwrap();
        assert_eq!(manifest.clips.len(), 3);
        let clip = &manifest.clips[0];
        let seq = load_sequence(manifest.resolve(&clip.dir), clip.fps, &clip.id).unwrap();
        assert_eq!(seq.len(), 80);
        assert_eq!(seq.width(), 96);
        let gt = crate::spotting::read_ground_truth(tmp.path().join("gt.csv")).unwrap();
        assert!(gt.get("seq000").is_some());
    }

    #[test]
    fn generation_is_deterministic_for_a_seed() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let spec = CorpusSpec {
            sequences: 2,
            frames: 60,
            ..CorpusSpec::new(CorpusKind::Spotting)
        };
        generate_corpus(a.path(), &spec).unwrap();
        generate_corpus(b.path(), &spec).unwrap();
        for entry in walk(a.path()) {
            let rel = entry.strip_prefix(a.path()).unwrap();
            let other = b.path().join(rel);
            let x = std::fs::read(&entry).unwrap();
            let y = std::fs::read(&other).unwrap_or_default();
            assert_eq!(x, y, "{} differs", rel.display());
        }
    }

    fn walk(dir: &Path) -> Vec<PathBuf> {
        let mut out = Vec::new();
        let mut stack = vec![dir.to_path_buf()];
        while let Some(d) = stack.pop() {
            for e in std::fs::read_dir(&d).unwrap() {
                let p = e.unwrap().path();
                if p.is_dir() {
                    stack.push(p);
                } else {
                    out.push(p);
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn recognition_corpus_has_landmarks_and_labels() {
        let tmp = tempfile::tempdir().unwrap();
        let spec = CorpusSpec {
            sequences: 2,
            subjects: 2,
            ..CorpusSpec::new(CorpusKind::Recognition)
        };
        let manifest_path = generate_corpus(tmp.path(), &spec).unwrap();
        let manifest = DatasetManifest::load(&manifest_path).unwrap();
        assert_eq!(manifest.clips.len(), 4);
        for clip in &manifest.clips {
            assert!(clip.landmarks.is_some());
            assert!(clip.label.is_some());
        }
    }
}
