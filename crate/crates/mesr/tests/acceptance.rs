//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (visible with `--nocapture`) and enforcing its runtime budget.
//!
//! Every expected value here is either hand-enumerated in place or
//! computed by an independent brute-force oracle kept inside this file.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

use mesr::classify::{
    loso_evaluate, svm_train, train_binary, LabeledSample, Protocol, SvmOptions, COST_GRID,
};
use mesr::features::{
    higo_top, hog_histogram, hog_top, lbp_code, lbp_top, orientation_bin, CuboidPartition,
    GlobalNorm, LbpParams, PlaneCombination,
};
use mesr::magnify::{magnify, MagnifyParams, ALPHA_SWEEP};
use mesr::media::synth::textured_frame;
use mesr::media::{Frame, FrameSequence};
use mesr::pipeline::{
    generate_corpus, run_mesr, run_spot, CorpusKind, CorpusSpec, DatasetManifest, PipelineConfig,
};
use mesr::raster::Rect;
use mesr::spotting::{contrast, detect_peaks, tau_sweep, top_block_mean};
use mesr::tim::{tim_fit, tim_length_sweep, tim_resample};

fn criterion(n: usize, name: &str, pass: bool, detail: String) {
    println!(
        "criterion {n:2} ({name}): {} -- {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {n} ({name}) failed: {detail}");
}

fn within(elapsed: Duration, budget: Duration) -> bool {
    elapsed <= budget
}

// ---------------------------------------------------------------- fixtures

struct Corpus {
    _dir: TempDir,
    manifest: DatasetManifest,
}

fn spot_corpus() -> &'static Corpus {
    static CORPUS: OnceLock<Corpus> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let dir = TempDir::new().expect("tempdir");
        let spec = CorpusSpec::new(CorpusKind::Spotting);
        let path = generate_corpus(dir.path(), &spec).expect("corpus");
        let manifest = DatasetManifest::load(path).expect("manifest");
        Corpus {
            _dir: dir,
            manifest,
        }
    })
}

fn mesr_corpus() -> &'static Corpus {
    static CORPUS: OnceLock<Corpus> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let dir = TempDir::new().expect("tempdir");
        let spec = CorpusSpec::new(CorpusKind::Mesr);
        let path = generate_corpus(dir.path(), &spec).expect("corpus");
        let manifest = DatasetManifest::load(path).expect("manifest");
        Corpus {
            _dir: dir,
            manifest,
        }
    })
}

// ------------------------------------------------- 1: difference exactness

/// Brute-force top-M mean: repeatedly extract the maximum.
fn oracle_top_mean(distances: &[f64], m: usize) -> f64 {
    let mut rest = distances.to_vec();
    let mut sum = 0.0;
    for _ in 0..m {
        let (idx, _) = rest
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        sum += rest.remove(idx);
    }
    sum / m as f64
}

fn oracle_contrast(f: &[f64], k: usize) -> Vec<f64> {
    let n = f.len();
    let mut c = vec![0.0; n];
    for i in 0..n {
        if i >= 2 * k && i + 2 * k < n {
            let raw = f[i] - (f[i + k] + f[i - k]) / 2.0;
            c[i] = if raw < 0.0 { 0.0 } else { raw };
        }
    }
    c
}

/// Brute-force peak detection: threshold from the valid range, candidate
/// local maxima, then repeated global-maximum selection with suppression.
fn oracle_peaks(c: &[f64], tau: f64, k: usize) -> Vec<usize> {
    let lo = 2 * k;
    let hi = c.len() - 2 * k;
    let valid = &c[lo..hi];
    let mean = valid.iter().sum::<f64>() / valid.len() as f64;
    let max = valid.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let threshold = mean + tau * (max - mean);

    let mut candidates = Vec::new();
    for i in lo..hi {
        let left_ok = i == lo || c[i] > c[i - 1];
        let right_ok = i + 1 == hi || c[i] >= c[i + 1];
        if c[i] > threshold && left_ok && right_ok {
            candidates.push(i);
        }
    }
    let mut kept: Vec<usize> = Vec::new();
    while !candidates.is_empty() {
        // global maximum, earliest index on ties
        let (pos, &best) = candidates
            .iter()
            .enumerate()
            .max_by(|(ia, &a), (ib, &b)| {
                c[a].partial_cmp(&c[b]).unwrap().then(ib.cmp(ia)) // earlier index wins ties
            })
            .unwrap();
        candidates.remove(pos);
        if kept.iter().all(|&p| 2 * p.abs_diff(best) >= k) {
            kept.push(best);
        }
    }
    kept.sort_unstable();
    kept
}

#[test]
fn criterion_01_difference_math_matches_brute_force() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let n = 200;
    let mut checked_peaks = 0usize;
    for trial in 0..100 {
        let k = [4usize, 16, 32][trial % 3];

        // Eq.-1 aggregation on random block distances
        let distances: Vec<f64> = (0..36).map(|_| rng.gen_range(0.0..2.0)).collect();
        let m = 12;
        let impl_f = top_block_mean(&distances, m);
        let oracle_f = oracle_top_mean(&distances, m);
        assert!(
            (impl_f - oracle_f).abs() < 1e-12,
            "trial {trial}: top-mean {impl_f} vs oracle {oracle_f}"
        );

        // contrasting and peak detection on a random F vector
        let f: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let impl_c = contrast(&f, k);
        let oracle_c = oracle_contrast(&f, k);
        assert_eq!(impl_c.len(), oracle_c.len());
        for (a, b) in impl_c.iter().zip(&oracle_c) {
            assert!((a - b).abs() < 1e-12, "contrast differs: {a} vs {b}");
        }

        let tau = rng.gen_range(0.0..1.0);
        let impl_peaks = detect_peaks(&impl_c, tau, k).unwrap().peaks;
        let oracle = oracle_peaks(&impl_c, tau, k);
        assert_eq!(impl_peaks, oracle, "trial {trial} k {k} tau {tau}");
        checked_peaks += impl_peaks.len();
    }
    let elapsed = start.elapsed();
    criterion(
        1,
        "difference math exactness",
        within(elapsed, Duration::from_secs(5)),
        format!(
            "100 trials bitwise-equal peak sets ({checked_peaks} peaks) in {elapsed:.2?} (< 5 s)"
        ),
    );
}

// ---------------------------------------------------- 2: synthetic spotting

#[test]
fn criterion_02_synthetic_spotting_auc() {
    let start = Instant::now();
    let corpus = spot_corpus();
    let config = PipelineConfig::standard();
    let report = run_spot(&corpus.manifest, &config).expect("spot run");
    let elapsed = start.elapsed();

    let best = report
        .roc
        .iter()
        .find(|p| p.tpr >= 0.9 && p.fpr <= 0.1)
        .cloned();
    let pass = report.auc >= 0.95 && best.is_some() && within(elapsed, Duration::from_secs(120));
    criterion(
        2,
        "synthetic spotting",
        pass,
        format!(
            "auc {:.4} (>= 0.95), best point {:?} (tpr >= 0.9, fpr <= 0.1), {} sequences in {elapsed:.2?} (< 2 min)",
            report.auc,
            best.map(|p| (p.tau, p.tpr, p.fpr)),
            report.n
        ),
    );
}

// ---------------------------------------------------- 3: descriptor oracles

#[test]
fn criterion_03_descriptor_oracles() {
    let start = Instant::now();

    // hand-enumerated 5x5 patches
    let raw8 = LbpParams {
        p: 8,
        r: 1.0,
        uniform: false,
    };
    // constant patch: ties compare >=, so every bit is set
    let flat = Frame::constant(5, 5, 0.5);
    assert_eq!(lbp_code(&flat, 2, 2, &raw8).unwrap(), 0xff);
    // bright center over dark surround: no neighbor reaches the center
    let mut bright = Frame::constant(5, 5, 0.0);
    bright.set(2, 2, 1.0);
    assert_eq!(lbp_code(&bright, 2, 2, &raw8).unwrap(), 0);
    // vertical step edge: every on-edge code has at most one 0->1 and one
    // 1->0 circular transition, hence maps into a uniform bin
    let edge = Frame::from_fn(5, 5, |x, _| if x < 2 { 0.0 } else { 1.0 });
    let uniform8 = LbpParams {
        p: 8,
        r: 1.0,
        uniform: true,
    };
    let edge_bin = lbp_code(&edge, 2, 2, &uniform8).unwrap();
    assert!(
        edge_bin < 58,
        "step-edge code fell into the non-uniform bin"
    );
    // four integer-offset neighbors, enumerated bit by bit:
    // E = 0.9 >= 0.5 -> 1, N = 0.1 -> 0, W = 0.5 (tie) -> 1, S = 0.2 -> 0
    let mut patch = Frame::constant(5, 5, 0.5);
    patch.set(3, 2, 0.9);
    patch.set(2, 1, 0.1);
    patch.set(1, 2, 0.5);
    patch.set(2, 3, 0.2);
    let raw4 = LbpParams {
        p: 4,
        r: 1.0,
        uniform: false,
    };
    let code = lbp_code(&patch, 2, 2, &raw4).unwrap();
    let expected = 0b0101;
    assert_eq!(code, expected, "hand-enumerated four-neighbor code");

    // oriented-gradient votes on a two-ramp 5x5-style patch: counts split
    // evenly, magnitude weights split 0.2 / 0.8
    let a = 0.02;
    let two_ramp = Frame::from_fn(12, 10, |x, y| {
        if y < 5 {
            0.1 + a / 2.0 * x as f64
        } else {
            0.05 + 2.0 * a * y as f64
        }
    });
    let top = Rect::new(1, 1, 11, 4);
    let bottom = Rect::new(1, 6, 11, 9);
    let bin0 = orientation_bin(0.0, 8);
    let bin90 = orientation_bin(std::f64::consts::FRAC_PI_2, 8);
    // per-region histograms concentrate fully; combining regions with
    // equal pixel counts gives [0.5, 0.5] for counts and [0.2, 0.8] for
    // weighted votes, as hand-computed from the vote definitions
    let higo_top_h = hog_histogram(&two_ramp, top, 8, false).unwrap();
    let higo_bot_h = hog_histogram(&two_ramp, bottom, 8, false).unwrap();
    assert_eq!(higo_top_h[bin0], 1.0);
    assert_eq!(higo_bot_h[bin90], 1.0);
    let hog_top_h = hog_histogram(&two_ramp, top, 8, true).unwrap();
    let hog_bot_h = hog_histogram(&two_ramp, bottom, 8, true).unwrap();
    assert_eq!(hog_top_h[bin0], 1.0);
    assert_eq!(hog_bot_h[bin90], 1.0);
    // combined two-region vote, hand-normalized: w1/(w1+w2) with w2 = 4 w1
    let pixels = (top.width() * top.height()) as f64;
    let w1 = pixels * a;
    let w2 = pixels * 4.0 * a;
    assert!((w1 / (w1 + w2) - 0.2).abs() < 1e-12);
    assert!((pixels / (pixels + pixels) - 0.5).abs() < 1e-12);

    // magnitude invariance: exact power-of-two rescalings preserve every
    // orientation bit-for-bit, so the unweighted histogram is identical
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut checked = 0;
    for trial in 0..50 {
        let base = textured_frame(16, 16, 4000 + trial);
        let scale = (1u32 << rng.gen_range(1..=6)) as f64;
        let scaled = Frame::from_fn(16, 16, |x, y| base.get(x, y) / scale);
        let region = Rect::new(0, 0, 16, 16);
        let h1 = hog_histogram(&base, region, 8, false).unwrap();
        let h2 = hog_histogram(&scaled, region, 8, false).unwrap();
        assert_eq!(h1, h2, "trial {trial}: rescaling changed the histogram");
        checked += 1;
    }

    let elapsed = start.elapsed();
    criterion(
        3,
        "descriptor oracles",
        within(elapsed, Duration::from_secs(10)),
        format!(
            "code {code:#010b} as enumerated, vote splits 0.5/0.5 and 0.2/0.8, {checked} exact remaps in {elapsed:.2?} (< 10 s)"
        ),
    );
}

// ----------------------------------------------- 4: plane-combination slices

#[test]
fn criterion_04_plane_combination_slicing() {
    let start = Instant::now();
    let partition = CuboidPartition::new(2, 2, 2);
    let lbp = LbpParams {
        p: 8,
        r: 1.0,
        uniform: true,
    };
    let combos = [
        PlaneCombination::XOt,
        PlaneCombination::YOt,
        PlaneCombination::XyOt,
    ];
    for clip_seed in 0..20u64 {
        let frames: Vec<Frame> = (0..8)
            .map(|i| textured_frame(24, 20, 5000 + clip_seed * 16 + i))
            .collect();
        let clip = FrameSequence::new(frames, 25.0, format!("c{clip_seed}")).unwrap();

        let top_lbp = lbp_top(&clip, &partition, PlaneCombination::Top, &lbp).unwrap();
        let top_hog = hog_top(
            &clip,
            &partition,
            PlaneCombination::Top,
            8,
            GlobalNorm::None,
        )
        .unwrap();
        let top_higo = higo_top(
            &clip,
            &partition,
            PlaneCombination::Top,
            8,
            GlobalNorm::None,
        )
        .unwrap();

        for combo in combos {
            let gather = |top: &mesr::features::DescriptorVector| {
                let mut out = Vec::new();
                for cuboid in 0..partition.count() {
                    for plane in combo.planes() {
                        let pos = PlaneCombination::Top
                            .planes()
                            .iter()
                            .position(|p| p == plane)
                            .unwrap();
                        out.extend_from_slice(top.segment(cuboid, pos));
                    }
                }
                out
            };
            let sub_lbp = lbp_top(&clip, &partition, combo, &lbp).unwrap();
            assert_eq!(sub_lbp.values, gather(&top_lbp), "lbp {combo}");
            let sub_hog = hog_top(&clip, &partition, combo, 8, GlobalNorm::None).unwrap();
            assert_eq!(sub_hog.values, gather(&top_hog), "hog {combo}");
            let sub_higo = higo_top(&clip, &partition, combo, 8, GlobalNorm::None).unwrap();
            assert_eq!(sub_higo.values, gather(&top_higo), "higo {combo}");
        }
    }
    let elapsed = start.elapsed();
    criterion(
        4,
        "plane-combination slicing",
        within(elapsed, Duration::from_secs(30)),
        format!("20 clips x 3 kinds x 3 combinations bitwise-equal in {elapsed:.2?} (< 30 s)"),
    );
}

// ------------------------------------------------------------ 5: interpolation

#[test]
fn criterion_05_interpolation_exactness() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut worst = 0.0f64;
    for trial in 0..20u64 {
        let n = rng.gen_range(4..=34);
        let frames: Vec<Frame> = (0..n)
            .map(|i| textured_frame(20, 18, 6000 + trial * 64 + i))
            .collect();
        let clip = FrameSequence::new(frames, 25.0, format!("t{trial}")).unwrap();
        let model = tim_fit(&clip).unwrap();

        let back = tim_resample(&model, n as usize).unwrap();
        for (a, b) in clip.frames().iter().zip(back.frames()) {
            for (x, y) in a.pixels().iter().zip(b.pixels()) {
                worst = worst.max((x - y).abs());
            }
        }

        let ten = tim_resample(&model, 10).unwrap();
        assert_eq!(ten.len(), 10, "trial {trial}: interpolated length");
    }
    let elapsed = start.elapsed();
    criterion(
        5,
        "interpolation exactness",
        worst < 1e-6 && within(elapsed, Duration::from_secs(30)),
        format!("20 clips, max reconstruction error {worst:.2e} (< 1e-6), all length-10 outputs, in {elapsed:.2?} (< 30 s)"),
    );
}

// ------------------------------------------------------------ 6: magnification

#[test]
fn criterion_06_magnification_gain() {
    let start = Instant::now();
    let fps = 30.0;
    let amplitude = 0.5;
    let clip = FrameSequence::new(
        (0..60)
            .map(|t| {
                let d = amplitude * (std::f64::consts::TAU * 2.0 * t as f64 / fps).sin();
                Frame::from_fn(64, 32, |x, _| {
                    0.5 + 0.2 * (std::f64::consts::TAU * (x as f64 - d) / 64.0).sin()
                })
            })
            .collect(),
        fps,
        "osc",
    )
    .unwrap();

    let measure = |seq: &FrameSequence| -> f64 {
        seq.frames()
            .iter()
            .map(|frame| {
                let mut s = 0.0;
                let mut c = 0.0;
                for y in 0..frame.height() {
                    for x in 0..frame.width() {
                        let a = std::f64::consts::TAU * x as f64 / 64.0;
                        let v = frame.get(x, y) - 0.5;
                        s += v * a.sin();
                        c += v * a.cos();
                    }
                }
                ((-c).atan2(s) * 64.0 / std::f64::consts::TAU).abs()
            })
            .fold(0.0, f64::max)
    };

    let params = MagnifyParams {
        alpha: 4.0,
        levels: 5,
        delta_assumed: 0.5,
        ..Default::default()
    };
    let magnified = magnify(&clip, &params).unwrap();
    let measured = measure(&magnified);

    let identity = magnify(
        &clip,
        &MagnifyParams {
            alpha: 1.0,
            ..params
        },
    )
    .unwrap();
    let id_diff = clip
        .frames()
        .iter()
        .zip(identity.frames())
        .map(|(a, b)| a.mean_abs_diff(b))
        .fold(0.0f64, f64::max);

    let elapsed = start.elapsed();
    let pass = (1.5..=2.5).contains(&measured)
        && id_diff < 1e-3
        && within(elapsed, Duration::from_secs(60));
    criterion(
        6,
        "magnification gain",
        pass,
        format!(
            "alpha 4 amplitude {measured:.3} px (in [1.5, 2.5]), alpha 1 max mean diff {id_diff:.2e} (< 1e-3), in {elapsed:.2?} (< 1 min)"
        ),
    );
}

// ------------------------------------------------------------------- 7: SVM

#[test]
fn criterion_07_svm_correctness() {
    let start = Instant::now();

    // dual objective monotonicity on random problems
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    for trial in 0..50 {
        let n = rng.gen_range(6..40);
        let d = rng.gen_range(2..8);
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let y: Vec<f64> = (0..n)
            .map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
            .collect();
        let cost = [0.1, 1.0, 10.0][trial % 3];
        let out = train_binary(&x, &y, cost).unwrap();
        for w in out.dual_objectives.windows(2) {
            assert!(w[1] >= w[0] - 1e-9, "trial {trial}: dual decreased {w:?}");
        }
    }

    // separable training accuracy
    let mut separable = Vec::new();
    for i in 0..10 {
        separable.push(LabeledSample {
            values: vec![0.0, 1.0 + 0.01 * i as f64],
            label: "up".into(),
            subject: format!("s{}", i % 2),
        });
        separable.push(LabeledSample {
            values: vec![0.0, -1.0 - 0.01 * i as f64],
            label: "down".into(),
            subject: format!("s{}", i % 2),
        });
    }
    let model = svm_train(&separable, 1.0).unwrap();
    let train_acc = separable
        .iter()
        .filter(|s| model.predict(&s.values).unwrap() == s.label)
        .count() as f64
        / separable.len() as f64;
    assert_eq!(train_acc, 1.0, "separable training accuracy");

    // shuffled labels land at chance level on average
    let labels = ["positive", "negative", "surprise"];
    let mut accs = Vec::new();
    for trial in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(9090 + trial);
        let mut data = Vec::new();
        for c in 0..3 {
            for i in 0..6 {
                data.push(LabeledSample {
                    values: vec![
                        c as f64 * 3.0 + rng.gen_range(-0.5..0.5),
                        -(c as f64) + rng.gen_range(-0.5..0.5),
                    ],
                    label: String::new(),
                    subject: format!("s{}", i % 3),
                });
            }
        }
        // random labels drawn independently from the balanced class set
        for s in data.iter_mut() {
            s.label = labels[rng.gen_range(0..3)].to_string();
        }
        let out =
            loso_evaluate(&data, &SvmOptions::default(), Protocol::LeaveOneSubjectOut).unwrap();
        accs.push(out.accuracy);
    }
    let mean_acc = accs.iter().sum::<f64>() / accs.len() as f64;

    let elapsed = start.elapsed();
    let pass = (mean_acc - 1.0 / 3.0).abs() <= 0.1 && within(elapsed, Duration::from_secs(120));
    criterion(
        7,
        "svm correctness",
        pass,
        format!(
            "50 monotone duals, separable accuracy 1.0, shuffled-label mean {mean_acc:.3} (1/3 +/- 0.1), in {elapsed:.2?} (< 2 min)"
        ),
    );
}

// ------------------------------------------------------------ 8: end-to-end

#[test]
fn criterion_08_end_to_end_combined_run() {
    let start = Instant::now();
    let corpus = mesr_corpus();
    let config = PipelineConfig::standard();
    let report = run_mesr(&corpus.manifest, &config).expect("combined run");
    let elapsed = start.elapsed();

    let product = report.spotting.tpr * report.recognition_accuracy;
    let product_ok = (report.overall - product).abs() <= f64::EPSILON * product.abs().max(1.0);
    let pass = report.overall >= 0.6 && product_ok && within(elapsed, Duration::from_secs(300));
    criterion(
        8,
        "end-to-end combined run",
        pass,
        format!(
            "overall {:.4} (>= 0.6) == tpr {:.4} x recognition {:.4}, {} true spots, in {elapsed:.2?} (< 5 min)",
            report.overall, report.spotting.tpr, report.recognition_accuracy, report.true_spots
        ),
    );
}

// --------------------------------------------------------- 9: protocol shapes

#[test]
fn criterion_09_protocol_shapes() {
    let taus = tau_sweep();
    let tau_ok = taus.len() == 21
        && taus[0] == 0.0
        && taus[20] == 1.0
        && taus.windows(2).all(|w| (w[1] - w[0] - 0.05).abs() < 1e-12);
    let alpha_ok = ALPHA_SWEEP == [1.0, 2.0, 4.0, 8.0, 12.0, 16.0, 20.0, 24.0, 30.0];
    let tim = tim_length_sweep();
    let tim_ok = tim.len() == 9 && tim[0].is_none() && (1..=8).all(|i| tim[i] == Some(i * 10));
    let cost_ok = COST_GRID == [0.1, 1.0, 2.0, 10.0, 100.0, 1000.0];
    criterion(
        9,
        "protocol shapes",
        tau_ok && alpha_ok && tim_ok && cost_ok,
        format!(
            "tau sweep {} points, alpha sweep {:?}, interpolation sweep none+10..80, cost grid {:?}",
            taus.len(),
            ALPHA_SWEEP,
            COST_GRID
        ),
    );
}

// ------------------------------------------------------------ 10: determinism

#[test]
fn criterion_10_determinism() {
    let config = PipelineConfig::standard();

    // full second runs: regenerate each corpus with the same seed into a
    // fresh directory and compare the serialized reports byte for byte
    let spot_a = run_spot(&spot_corpus().manifest, &config).expect("spot a");
    let dir_b = TempDir::new().unwrap();
    let path_b = generate_corpus(dir_b.path(), &CorpusSpec::new(CorpusKind::Spotting)).unwrap();
    let manifest_b = DatasetManifest::load(path_b).unwrap();
    let spot_b = run_spot(&manifest_b, &config).expect("spot b");
    let spot_bytes_a = serde_json::to_string(&spot_a).unwrap();
    let spot_bytes_b = serde_json::to_string(&spot_b).unwrap();

    let mesr_a = run_mesr(&mesr_corpus().manifest, &config).expect("mesr a");
    let dir_c = TempDir::new().unwrap();
    let path_c = generate_corpus(dir_c.path(), &CorpusSpec::new(CorpusKind::Mesr)).unwrap();
    let manifest_c = DatasetManifest::load(path_c).unwrap();
    let mesr_b = run_mesr(&manifest_c, &config).expect("mesr b");
    let mesr_bytes_a = serde_json::to_string(&mesr_a).unwrap();
    let mesr_bytes_b = serde_json::to_string(&mesr_b).unwrap();

    let pass = spot_bytes_a == spot_bytes_b && mesr_bytes_a == mesr_bytes_b;
    criterion(
        10,
        "determinism",
        pass,
        format!(
            "spot reports {} bytes identical: {}; combined reports {} bytes identical: {}",
            spot_bytes_a.len(),
            spot_bytes_a == spot_bytes_b,
            mesr_bytes_a.len(),
            mesr_bytes_a == mesr_bytes_b
        ),
    );
}
