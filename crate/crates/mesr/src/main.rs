//! Thin command-line front end over the library pipeline.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mesr::pipeline::{
    generate_corpus, run_eval, run_mesr, run_recognize, run_spot, CorpusKind, CorpusSpec,
    DatasetManifest, PipelineConfig, SweepKind,
};
use mesr::spotting::SpotFeature;
use mesr::Result;

#[derive(Parser)]
#[command(
    name = "mesr",
    about = "Micro-expression spotting and recognition toolkit",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Dataset manifest (JSON array of clip records).
    #[arg(long)]
    manifest: PathBuf,
    /// Output directory for reports.
    #[arg(long)]
    out: PathBuf,
    /// Pipeline configuration JSON; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Spotting threshold fraction in [0, 1].
    #[arg(long)]
    tau: Option<f64>,
    /// Motion magnification level (1 = off).
    #[arg(long)]
    alpha: Option<f64>,
    /// Spatial wavelength cutoff in pixels.
    #[arg(long)]
    gamma: Option<f64>,
    /// Temporal passband as lo:hi in Hz.
    #[arg(long)]
    band: Option<String>,
    /// Pyramid depth of the magnification.
    #[arg(long)]
    levels: Option<usize>,
    /// Interpolation length, or "none".
    #[arg(long, value_name = "N|none")]
    tim_len: Option<String>,
    /// Spotting feature.
    #[arg(long, value_enum)]
    feature: Option<FeatureArg>,
    /// Write each clip's registered, magnified frames under this
    /// directory for inspection.
    #[arg(long, value_name = "DIR")]
    dump_magnified: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FeatureArg {
    Lbp,
    Hoof,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepArg {
    Alpha,
    Tim,
    Tau,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Spotting,
    Recognition,
    Mesr,
}

#[derive(Subcommand)]
enum Command {
    /// Spot rapid motions in long sequences and report the ROC sweep.
    Spot(CommonArgs),
    /// Classify labeled clips under the grouped protocol.
    Recognize(CommonArgs),
    /// Spot long sequences, then classify the spotted intervals.
    Mesr(CommonArgs),
    /// Sweep a pipeline parameter and report accuracy per setting.
    Eval {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum)]
        sweep: SweepArg,
    },
    /// Generate a synthetic test corpus.
    Synth {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Sequences (spotting) or clips per subject (recognition, mesr).
        #[arg(long)]
        sequences: Option<usize>,
        #[arg(long)]
        subjects: Option<usize>,
        /// Frames per long sequence.
        #[arg(long)]
        frames: Option<usize>,
        /// Peak transient displacement in pixels.
        #[arg(long)]
        amplitude: Option<f64>,
        /// Whole-frame drift in pixels per frame.
        #[arg(long)]
        drift: Option<f64>,
    },
    /// Inspect the configuration.
    Config {
        /// Print the full default configuration as JSON.
        #[arg(long)]
        print_defaults: bool,
    },
}

fn build_config(args: &CommonArgs) -> Result<PipelineConfig> {
    let mut config = match &args.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::standard(),
    };
    if let Some(tau) = args.tau {
        config.spot.tau = tau;
    }
    if let Some(alpha) = args.alpha {
        config.magnify.alpha = alpha;
    }
    if let Some(gamma) = args.gamma {
        config.magnify.gamma = gamma;
    }
    if let Some(levels) = args.levels {
        config.magnify.levels = levels;
    }
    if let Some(band) = &args.band {
        let parts: Vec<&str> = band.split(':').collect();
        let parsed = (parts.len() == 2)
            .then(|| Some((parts[0].parse::<f64>().ok()?, parts[1].parse::<f64>().ok()?)))
            .flatten();
        match parsed {
            Some(b) => config.magnify.band = Some(b),
            None => {
                return Err(mesr::Error::Validation(format!(
                    "--band expects lo:hi in Hz, got {band:?}"
                )))
            }
        }
    }
    if let Some(tim) = &args.tim_len {
        config.tim_len = match tim.as_str() {
            "none" => None,
            v => Some(v.parse().map_err(|_| {
                mesr::Error::Validation(format!(
                    "--tim-len expects a number or \"none\", got {v:?}"
                ))
            })?),
        };
    }
    if let Some(feature) = args.feature {
        config.spot.feature = match feature {
            FeatureArg::Lbp => SpotFeature::Lbp {
                params: Default::default(),
            },
            FeatureArg::Hoof => SpotFeature::Hoof { bins: 8 },
        };
    }
    Ok(config)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Spot(args) => {
            let config = build_config(&args)?;
            let manifest = DatasetManifest::load(&args.manifest)?;
            let report = run_spot(&manifest, &config)?;
            report.save(&args.out)?;
            println!(
                "spotted {} sequence(s): auc {:.4}, tpr {:.4} / fpr {:.4} at tau {}",
                report.n, report.auc, report.score_at_tau.tpr, report.score_at_tau.fpr, report.tau
            );
            Ok(())
        }
        Command::Recognize(args) => {
            let config = build_config(&args)?;
            let manifest = DatasetManifest::load(&args.manifest)?;
            if let Some(dir) = &args.dump_magnified {
                mesr::pipeline::dump_magnified(&manifest, &config, dir)?;
                println!("magnified clips written under {}", dir.display());
            }
            let report = run_recognize(&manifest, &config)?;
            report.save(&args.out)?;
            println!(
                "recognized {}/{} clips ({:.2}%) over {} rounds",
                report.correct,
                report.total,
                100.0 * report.accuracy,
                report.rounds
            );
            Ok(())
        }
        Command::Mesr(args) => {
            let config = build_config(&args)?;
            let manifest = DatasetManifest::load(&args.manifest)?;
            let report = run_mesr(&manifest, &config)?;
            report.save(&args.out)?;
            println!(
                "tpr {:.4} x recognition {:.4} = overall {:.4}",
                report.spotting.tpr, report.recognition_accuracy, report.overall
            );
            Ok(())
        }
        Command::Eval { common, sweep } => {
            let config = build_config(&common)?;
            let manifest = DatasetManifest::load(&common.manifest)?;
            match sweep {
                SweepArg::Tau => {
                    // the threshold sweep is the spotting ROC
                    let report = run_spot(&manifest, &config)?;
                    report.save(&common.out)?;
                    println!("tau sweep written as roc.csv (auc {:.4})", report.auc);
                }
                SweepArg::Alpha | SweepArg::Tim => {
                    let kind = match sweep {
                        SweepArg::Alpha => SweepKind::Alpha,
                        _ => SweepKind::Tim,
                    };
                    let report = run_eval(&manifest, &config, kind)?;
                    report.save(&common.out)?;
                    for p in &report.points {
                        println!("{} = {:.4}", p.setting, p.accuracy);
                    }
                }
            }
            Ok(())
        }
        Command::Synth {
            kind,
            out,
            seed,
            sequences,
            subjects,
            frames,
            amplitude,
            drift,
        } => {
            let kind = match kind {
                KindArg::Spotting => CorpusKind::Spotting,
                KindArg::Recognition => CorpusKind::Recognition,
                KindArg::Mesr => CorpusKind::Mesr,
            };
            let mut spec = CorpusSpec::new(kind);
            if let Some(v) = seed {
                spec.seed = v;
            }
            if let Some(v) = sequences {
                spec.sequences = v;
            }
            if let Some(v) = subjects {
                spec.subjects = v;
            }
            if let Some(v) = frames {
                spec.frames = v;
            }
            if let Some(v) = amplitude {
                spec.amplitude = v;
            }
            if let Some(v) = drift {
                spec.drift = v;
            }
            let manifest = generate_corpus(&out, &spec)?;
            println!("wrote {}", manifest.display());
            Ok(())
        }
        Command::Config { print_defaults } => {
            if print_defaults {
                print!("{}", PipelineConfig::standard().to_json()?);
            } else {
                eprintln!("nothing to do; try --print-defaults");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
