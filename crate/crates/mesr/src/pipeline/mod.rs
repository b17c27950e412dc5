//! End-to-end runs over dataset manifests: spotting with a threshold
//! sweep, recognition under grouped protocols, the combined
//! spot-then-recognize system, and parameter sweeps.

pub mod config;
pub mod manifest;
pub mod report;
pub mod synthgen;

pub use config::{ClassifierConfig, DescriptorConfig, PipelineConfig};
pub use manifest::{ClipRecord, DatasetManifest};
pub use report::{
    EvalSweepReport, MesrPeak, MesrReport, MesrSequenceEntry, RecognitionReport, SequenceEntry,
    SpotRunReport, SweepPoint,
};
pub use synthgen::{generate_corpus, CorpusKind, CorpusSpec, SYNTH_CLASSES};

use rayon::prelude::*;

use crate::classify::{loso_evaluate, LabeledSample, SvmOptions};
use crate::error::{Error, Result};
use crate::features::{higo_top, hog_top, lbp_top, DescriptorKind, DescriptorVector};
use crate::geometry::{
    correct_and_grid, model_face, read_anchors, read_landmarks, register_clip, track_points,
    LandmarkSet,
};
use crate::magnify::{magnify, ALPHA_SWEEP};
use crate::media::{load_sequence, load_sequence_range, FrameSequence};
use crate::spotting::{
    evaluate, roc_from_series, spot_sequence, DifferenceSeries, GroundTruth, SequenceSeries,
    SequenceSpots, SpotResult,
};
use crate::tim::{tim_length_sweep, tim_to_length};

/// Parameter sweep kinds of the `eval` command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    Alpha,
    Tim,
}

fn load_model_landmarks(config: &PipelineConfig) -> Result<LandmarkSet> {
    match &config.model_landmarks {
        Some(path) => read_landmarks(path),
        None => Ok(model_face()),
    }
}

/// Merged ground truth from every file the manifest references.
fn load_ground_truth(manifest: &DatasetManifest) -> Result<GroundTruth> {
    let files = manifest.ground_truth_files();
    if files.is_empty() {
        return Err(Error::Validation(
            "no ground-truth files referenced by the manifest".into(),
        ));
    }
    let mut merged = GroundTruth::new();
    for file in files {
        let gt = crate::spotting::read_ground_truth(&file)?;
        for (id, intervals) in gt.sequences() {
            for iv in intervals {
                merged.insert(id, iv.clone());
            }
        }
    }
    Ok(merged)
}

struct SpottedClip {
    id: String,
    subject: String,
    n_frames: usize,
    series: DifferenceSeries,
    spots: SpotResult,
}

/// Tracks, corrects and runs the difference analysis on one clip.
fn spot_clip(
    manifest: &DatasetManifest,
    clip: &ClipRecord,
    config: &PipelineConfig,
) -> Result<SpottedClip> {
    let anchors_path = clip.anchors.as_ref().ok_or_else(|| {
        Error::Validation(format!("clip {}: anchors required for spotting", clip.id))
    })?;
    let seq = load_sequence(manifest.resolve(&clip.dir), clip.fps, &clip.id)?;
    let anchor = read_anchors(manifest.resolve(anchors_path))?;
    let points = track_points(&seq, anchor)?;
    let (corrected, grid) = correct_and_grid(&seq, &points)?;
    let (series, spots) = spot_sequence(&corrected, &grid, &config.spot)?;
    Ok(SpottedClip {
        id: clip.id.clone(),
        subject: clip.subject.clone(),
        n_frames: seq.len(),
        series,
        spots,
    })
}

/// Spotting over a whole manifest: per-sequence peaks at the configured
/// threshold plus the full ROC sweep. Per-sequence failures are isolated
/// into error entries.
pub fn run_spot(manifest: &DatasetManifest, config: &PipelineConfig) -> Result<SpotRunReport> {
    config.validate()?;
    let truth = load_ground_truth(manifest)?;

    let outcomes: Vec<(String, Result<SpottedClip>)> = manifest
        .clips
        .par_iter()
        .map(|clip| (clip.id.clone(), spot_clip(manifest, clip, config)))
        .collect();

    let mut sequences = Vec::with_capacity(outcomes.len());
    let mut spotted = Vec::new();
    for (id, outcome) in outcomes {
        match outcome {
            Ok(s) => {
                sequences.push(SequenceEntry {
                    id: id.clone(),
                    frames: Some(s.n_frames),
                    window: Some(s.series.window.n),
                    peaks: s.spots.peaks.iter().map(|p| p + 1).collect(),
                    threshold: Some(s.spots.threshold),
                    error: None,
                });
                spotted.push(s);
            }
            Err(e) => sequences.push(SequenceEntry {
                id,
                frames: None,
                window: None,
                peaks: vec![],
                threshold: None,
                error: Some(e.to_string()),
            }),
        }
    }
    if spotted.is_empty() {
        return Err(Error::Validation(
            "every sequence failed before the difference analysis".into(),
        ));
    }

    let series: Vec<SequenceSeries> = spotted
        .iter()
        .map(|s| SequenceSeries {
            id: s.id.clone(),
            n_frames: s.n_frames,
            window: s.series.window,
            c: s.series.c.clone(),
        })
        .collect();
    let curve = roc_from_series(&series, &truth)?;

    let at_tau: Vec<SequenceSpots> = spotted
        .iter()
        .map(|s| SequenceSpots {
            id: s.id.clone(),
            n_frames: s.n_frames,
            window: s.series.window,
            peaks: s.spots.peaks.clone(),
        })
        .collect();
    let score_at_tau = evaluate(&at_tau, &truth)?;

    Ok(SpotRunReport {
        feature: match config.spot.feature {
            crate::spotting::SpotFeature::Lbp { .. } => "lbp".into(),
            crate::spotting::SpotFeature::Hoof { .. } => "hoof".into(),
        },
        window_seconds: config.spot.window_seconds,
        m_top: config.spot.m_top,
        tau: config.spot.tau,
        n: spotted.len(),
        auc: curve.auc,
        score_at_tau,
        roc: curve.points,
        sequences,
    })
}

/// Register, magnify, interpolate and describe one clip.
fn clip_descriptor(
    clip: &FrameSequence,
    landmarks: &LandmarkSet,
    model: &LandmarkSet,
    config: &PipelineConfig,
) -> Result<DescriptorVector> {
    let registered = register_clip(clip, landmarks, model)?;
    let magnified = if config.magnify.alpha > 1.0 {
        magnify(&registered, &config.magnify)?
    } else {
        registered
    };
    let shaped = match config.tim_len {
        Some(len) => tim_to_length(&magnified, len)?,
        None => magnified,
    };
    let d = &config.descriptor;
    match d.kind {
        DescriptorKind::Lbp => lbp_top(&shaped, &d.partition, d.combo, &d.lbp),
        DescriptorKind::Hog => hog_top(&shaped, &d.partition, d.combo, d.bins, d.global_norm),
        DescriptorKind::Higo => higo_top(&shaped, &d.partition, d.combo, d.bins, d.global_norm),
        DescriptorKind::Hoof => Err(Error::Validation(
            "flow histograms cannot serve as the recognition descriptor".into(),
        )),
    }
}

fn labeled_sample_for_clip(
    manifest: &DatasetManifest,
    clip: &ClipRecord,
    model: &LandmarkSet,
    config: &PipelineConfig,
) -> Result<LabeledSample> {
    let label = clip.label.clone().ok_or_else(|| {
        Error::Validation(format!("clip {}: label required for recognition", clip.id))
    })?;
    let landmarks_path = clip.landmarks.as_ref().ok_or_else(|| {
        Error::Validation(format!(
            "clip {}: landmarks required for registration",
            clip.id
        ))
    })?;
    let seq = load_sequence(manifest.resolve(&clip.dir), clip.fps, &clip.id)?;
    let landmarks = read_landmarks(manifest.resolve(landmarks_path))?;
    let descriptor = clip_descriptor(&seq, &landmarks, model, config)?;
    Ok(LabeledSample {
        values: descriptor.values,
        label,
        subject: clip.subject.clone(),
    })
}

fn descriptor_name(config: &PipelineConfig) -> String {
    let d = &config.descriptor;
    format!(
        "{:?}-{} {}x{}x{}",
        d.kind, d.combo, d.partition.nx, d.partition.ny, d.partition.nt
    )
    .to_lowercase()
}

/// Writes each clip's registered, magnified sequence as a PGM directory
/// under `out/<clip id>/` for visual inspection.
pub fn dump_magnified(
    manifest: &DatasetManifest,
    config: &PipelineConfig,
    out: &std::path::Path,
) -> Result<()> {
    config.validate()?;
    let model = load_model_landmarks(config)?;
    let results: Vec<Result<()>> = manifest
        .clips
        .par_iter()
        .map(|clip| {
            let landmarks_path = clip.landmarks.as_ref().ok_or_else(|| {
                Error::Validation(format!("clip {}: landmarks required", clip.id))
            })?;
            let seq = load_sequence(manifest.resolve(&clip.dir), clip.fps, &clip.id)?;
            let landmarks = read_landmarks(manifest.resolve(landmarks_path))?;
            let registered = register_clip(&seq, &landmarks, &model)?;
            let magnified = magnify(&registered, &config.magnify)?;
            crate::media::save_sequence(out.join(&clip.id), &magnified)
        })
        .collect();
    for r in results {
        r?;
    }
    Ok(())
}

/// Recognition over labeled clips under the configured grouped protocol.
pub fn run_recognize(
    manifest: &DatasetManifest,
    config: &PipelineConfig,
) -> Result<RecognitionReport> {
    config.validate()?;
    let model = load_model_landmarks(config)?;

    let outcomes: Vec<(String, Result<LabeledSample>)> = manifest
        .clips
        .par_iter()
        .map(|clip| {
            (
                clip.id.clone(),
                labeled_sample_for_clip(manifest, clip, &model, config),
            )
        })
        .collect();

    let mut samples = Vec::new();
    let mut errors = Vec::new();
    for (id, outcome) in outcomes {
        match outcome {
            Ok(s) => samples.push(s),
            Err(e) => errors.push(SequenceEntry {
                id,
                frames: None,
                window: None,
                peaks: vec![],
                threshold: None,
                error: Some(e.to_string()),
            }),
        }
    }
    if samples.is_empty() {
        return Err(Error::Validation("no clips produced descriptors".into()));
    }

    let options = SvmOptions {
        cost: 1.0,
        standardize: config.classifier.standardize,
    };
    let outcome = loso_evaluate(&samples, &options, config.classifier.protocol)?;

    Ok(RecognitionReport {
        accuracy: outcome.accuracy,
        correct: outcome.correct,
        total: outcome.total,
        classes: outcome.classes,
        confusion: outcome.confusion,
        per_subject: outcome.per_group,
        rounds: outcome.rounds,
        alpha: config.magnify.alpha,
        tim_len: config.tim_len,
        descriptor: descriptor_name(config),
        warnings: outcome.warnings,
        errors,
    })
}

/// The combined system: spot with the fixed threshold, excerpt spotted
/// intervals from raw frames, re-align and classify them with a model
/// trained on the other subjects' annotated intervals.
pub fn run_mesr(manifest: &DatasetManifest, config: &PipelineConfig) -> Result<MesrReport> {
    config.validate()?;
    let model = load_model_landmarks(config)?;
    let truth = load_ground_truth(manifest)?;

    // spotting pass
    let outcomes: Vec<(String, Result<SpottedClip>)> = manifest
        .clips
        .par_iter()
        .map(|clip| (clip.id.clone(), spot_clip(manifest, clip, config)))
        .collect();

    let mut warnings = Vec::new();
    let mut entries: Vec<MesrSequenceEntry> = Vec::new();
    let mut spotted: Vec<SpottedClip> = Vec::new();
    for (id, outcome) in outcomes {
        match outcome {
            Ok(s) => spotted.push(s),
            Err(e) => {
                let subject = manifest
                    .clips
                    .iter()
                    .find(|c| c.id == id)
                    .map(|c| c.subject.clone())
                    .unwrap_or_default();
                entries.push(MesrSequenceEntry {
                    id,
                    subject,
                    peaks: vec![],
                    error: Some(e.to_string()),
                });
            }
        }
    }
    if spotted.is_empty() {
        return Err(Error::Validation(
            "every sequence failed before the difference analysis".into(),
        ));
    }

    let at_tau: Vec<SequenceSpots> = spotted
        .iter()
        .map(|s| SequenceSpots {
            id: s.id.clone(),
            n_frames: s.n_frames,
            window: s.series.window,
            peaks: s.spots.peaks.clone(),
        })
        .collect();
    let spotting = evaluate(&at_tau, &truth)?;

    // training descriptors from every annotated interval
    let record_of = |id: &str| manifest.clips.iter().find(|c| c.id == id).unwrap();
    let mut train_jobs = Vec::new();
    for s in &spotted {
        if let Some(intervals) = truth.get(&s.id) {
            for iv in intervals {
                train_jobs.push((s.id.clone(), s.subject.clone(), iv.clone()));
            }
        }
    }
    let train_outcomes: Vec<Result<LabeledSample>> = train_jobs
        .par_iter()
        .map(|(id, subject, iv)| {
            let clip = record_of(id);
            let seq = load_sequence_range(
                manifest.resolve(&clip.dir),
                clip.fps,
                format!("{id}:{}-{}", iv.onset, iv.offset),
                iv.onset..iv.offset + 1,
            )?;
            let landmarks_path = clip.landmarks.as_ref().ok_or_else(|| {
                Error::Validation(format!("clip {id}: landmarks required for registration"))
            })?;
            let landmarks = read_landmarks(manifest.resolve(landmarks_path))?;
            let descriptor = clip_descriptor(&seq, &landmarks, &model, config)?;
            Ok(LabeledSample {
                values: descriptor.values,
                label: iv.label.clone(),
                subject: subject.clone(),
            })
        })
        .collect();
    let mut train_samples = Vec::new();
    for (job, outcome) in train_jobs.iter().zip(train_outcomes) {
        match outcome {
            Ok(s) => train_samples.push(s),
            Err(e) => warnings.push(format!("training interval {}: {e}", job.0)),
        }
    }

    // classify each correctly spotted interval with a model trained on
    // the other subjects
    struct TrueSpot {
        clip_idx: usize,
        peak: usize,
        truth_label: String,
    }
    let mut true_spots: Vec<TrueSpot> = Vec::new();
    let mut peak_entries: Vec<Vec<MesrPeak>> = vec![Vec::new(); spotted.len()];
    for (ci, s) in spotted.iter().enumerate() {
        let intervals = truth.get(&s.id).unwrap_or(&[]);
        let mut claimed = vec![false; intervals.len()];
        for &peak in &s.spots.peaks {
            let hit = intervals
                .iter()
                .position(|iv| iv.matches(peak, s.series.window));
            match hit {
                Some(j) if !claimed[j] => {
                    claimed[j] = true;
                    true_spots.push(TrueSpot {
                        clip_idx: ci,
                        peak,
                        truth_label: intervals[j].label.clone(),
                    });
                    peak_entries[ci].push(MesrPeak {
                        peak: peak + 1,
                        matched: true,
                        truth: Some(intervals[j].label.clone()),
                        predicted: None,
                    });
                }
                Some(_) => peak_entries[ci].push(MesrPeak {
                    peak: peak + 1,
                    matched: true,
                    truth: None,
                    predicted: None,
                }),
                None => peak_entries[ci].push(MesrPeak {
                    peak: peak + 1,
                    matched: false,
                    truth: None,
                    predicted: None,
                }),
            }
        }
    }

    let spot_descriptors: Vec<Result<DescriptorVector>> = true_spots
        .par_iter()
        .map(|ts| {
            let s = &spotted[ts.clip_idx];
            let clip = record_of(&s.id);
            let k = s.series.window.k;
            let lo = ts.peak.saturating_sub(k);
            let hi = (ts.peak + k + 1).min(s.n_frames);
            let seq = load_sequence_range(
                manifest.resolve(&clip.dir),
                clip.fps,
                format!("{}@{}", s.id, ts.peak),
                lo..hi,
            )?;
            let landmarks_path = clip
                .landmarks
                .as_ref()
                .ok_or_else(|| Error::Validation(format!("clip {}: landmarks required", s.id)))?;
            let landmarks = read_landmarks(manifest.resolve(landmarks_path))?;
            clip_descriptor(&seq, &landmarks, &model, config)
        })
        .collect();

    let options = SvmOptions {
        cost: 1.0,
        standardize: config.classifier.standardize,
    };
    let mut recognized = 0usize;
    for (ts, descriptor) in true_spots.iter().zip(spot_descriptors) {
        let s = &spotted[ts.clip_idx];
        let train: Vec<LabeledSample> = train_samples
            .iter()
            .filter(|t| t.subject != s.subject)
            .cloned()
            .collect();
        let predicted = descriptor.and_then(|d| {
            let classes: std::collections::BTreeSet<&str> =
                train.iter().map(|t| t.label.as_str()).collect();
            if classes.len() < 2 {
                return Err(Error::Validation(format!(
                    "subject {}: training data from other subjects has {} class(es)",
                    s.subject,
                    classes.len()
                )));
            }
            let selection = crate::classify::select_cost(&train, &options)?;
            let svm = crate::classify::svm_train_with(
                &train,
                &SvmOptions {
                    cost: selection.cost,
                    ..options
                },
            )?;
            svm.predict(&d.values).map(str::to_string)
        });
        match predicted {
            Ok(label) => {
                if label == ts.truth_label {
                    recognized += 1;
                }
                if let Some(entry) = peak_entries[ts.clip_idx]
                    .iter_mut()
                    .find(|p| p.peak == ts.peak + 1)
                {
                    entry.predicted = Some(label);
                }
            }
            Err(e) => warnings.push(format!(
                "spot at frame {} of {}: {e} (counted as an error)",
                ts.peak + 1,
                s.id
            )),
        }
    }

    for (ci, s) in spotted.iter().enumerate() {
        entries.push(MesrSequenceEntry {
            id: s.id.clone(),
            subject: s.subject.clone(),
            peaks: std::mem::take(&mut peak_entries[ci]),
            error: None,
        });
    }
    entries.sort_by(|a, b| a.id.cmp(&b.id));

    let true_spot_count = true_spots.len();
    let recognition_accuracy = if true_spot_count == 0 {
        warnings.push("no correctly spotted intervals to classify".into());
        0.0
    } else {
        recognized as f64 / true_spot_count as f64
    };
    let overall = spotting.tpr * recognition_accuracy;

    Ok(MesrReport {
        tau: config.spot.tau,
        spotting,
        recognition_accuracy,
        recognized,
        true_spots: true_spot_count,
        overall,
        sequences: entries,
        warnings,
    })
}

/// Accuracy sweeps over the magnification level or interpolation length.
///
/// Clips are registered once; each sweep point re-runs magnification,
/// interpolation, description and the grouped evaluation.
pub fn run_eval(
    manifest: &DatasetManifest,
    config: &PipelineConfig,
    sweep: SweepKind,
) -> Result<EvalSweepReport> {
    config.validate()?;
    let model = load_model_landmarks(config)?;

    let registered: Vec<Result<(FrameSequence, String, String)>> = manifest
        .clips
        .par_iter()
        .map(|clip| {
            let label = clip
                .label
                .clone()
                .ok_or_else(|| Error::Validation(format!("clip {}: label required", clip.id)))?;
            let landmarks_path = clip.landmarks.as_ref().ok_or_else(|| {
                Error::Validation(format!("clip {}: landmarks required", clip.id))
            })?;
            let seq = load_sequence(manifest.resolve(&clip.dir), clip.fps, &clip.id)?;
            let landmarks = read_landmarks(manifest.resolve(landmarks_path))?;
            let reg = register_clip(&seq, &landmarks, &model)?;
            Ok((reg, label, clip.subject.clone()))
        })
        .collect();
    let mut clips = Vec::new();
    for r in registered {
        clips.push(r?);
    }

    let evaluate_with = |cfg: &PipelineConfig| -> Result<f64> {
        let samples: Vec<Result<LabeledSample>> = clips
            .par_iter()
            .map(|(reg, label, subject)| {
                let magnified = if cfg.magnify.alpha > 1.0 {
                    magnify(reg, &cfg.magnify)?
                } else {
                    reg.clone()
                };
                let shaped = match cfg.tim_len {
                    Some(len) => tim_to_length(&magnified, len)?,
                    None => magnified,
                };
                let d = &cfg.descriptor;
                let descriptor = match d.kind {
                    DescriptorKind::Lbp => lbp_top(&shaped, &d.partition, d.combo, &d.lbp)?,
                    DescriptorKind::Hog => {
                        hog_top(&shaped, &d.partition, d.combo, d.bins, d.global_norm)?
                    }
                    DescriptorKind::Higo => {
                        higo_top(&shaped, &d.partition, d.combo, d.bins, d.global_norm)?
                    }
                    DescriptorKind::Hoof => unreachable!("rejected by validation"),
                };
                Ok(LabeledSample {
                    values: descriptor.values,
                    label: label.clone(),
                    subject: subject.clone(),
                })
            })
            .collect();
        let samples: Result<Vec<LabeledSample>> = samples.into_iter().collect();
        let options = SvmOptions {
            cost: 1.0,
            standardize: config.classifier.standardize,
        };
        Ok(loso_evaluate(&samples?, &options, config.classifier.protocol)?.accuracy)
    };

    let points = match sweep {
        SweepKind::Alpha => {
            let mut points = Vec::with_capacity(ALPHA_SWEEP.len());
            for alpha in ALPHA_SWEEP {
                let mut cfg = config.clone();
                cfg.magnify.alpha = alpha;
                points.push(SweepPoint {
                    setting: format!("{alpha}"),
                    accuracy: evaluate_with(&cfg)?,
                });
            }
            points
        }
        SweepKind::Tim => {
            let mut points = Vec::with_capacity(9);
            for len in tim_length_sweep() {
                let mut cfg = config.clone();
                cfg.tim_len = len;
                points.push(SweepPoint {
                    setting: len.map_or("none".to_string(), |l| l.to_string()),
                    accuracy: evaluate_with(&cfg)?,
                });
            }
            points
        }
    };

    Ok(EvalSweepReport {
        sweep: match sweep {
            SweepKind::Alpha => "alpha".into(),
            SweepKind::Tim => "tim".into(),
        },
        points,
    })
}
