//! Experiment CLI: verification experiment, audio training, scoring and
//! evaluation. All randomness is seed-controlled; identical invocations
//! produce identical artifacts.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use batchuni_core::corpus::{generate_tone_corpus, ToneCorpusSpec};
use batchuni_core::eval::{
    decide, grid_pdf_from_scores, grid_scores, max_over_frames, write_grid_csv, write_grid_pgm,
    Decision, DecisionConfig, DecisionMode, EvalGrid,
};
use batchuni_core::experiment::{
    audio_config_from_toml, evaluate_audio_model, export_audio_artifacts, export_auc_artifacts,
    export_verify_artifacts, run_audio, run_verify, score_wav, verify_config_from_toml,
    AudioConfig, VerifyConfig,
};
use batchuni_core::nn::load_model;
use batchuni_core::ObjectiveKind;

#[derive(Parser)]
#[command(
    name = "batchuni",
    about = "Autoencoder anomaly detection with batch-uniformization training",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the 2-D annulus verification experiment and export its artifacts.
    Verify(VerifyArgs),
    /// Train an audio model on a WAV corpus and report per-ANR AUC.
    TrainAudio(TrainAudioArgs),
    /// Score one WAV file with a trained model.
    Score(ScoreArgs),
    /// Evaluate a trained model against a test manifest at several ANRs.
    EvalAuc(EvalAucArgs),
    /// Export density and score heatmaps of a 2-D model.
    ExportGrid(ExportGridArgs),
    /// Generate the synthetic tone corpus (WAVs plus manifests).
    GenCorpus(GenCorpusArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Output directory for the run artifacts.
    #[arg(long)]
    out: PathBuf,
    /// TOML config file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Objective override: re, snp or bu.
    #[arg(long)]
    objective: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Initialization seed override (share it to compare objectives from
    /// identical initial parameters).
    #[arg(long)]
    init_seed: Option<u64>,
    #[arg(long)]
    updates: Option<usize>,
}

#[derive(Args)]
struct TrainAudioArgs {
    /// TOML config file with the network, schedule and manifest paths.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    objective: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    init_seed: Option<u64>,
    #[arg(long)]
    epochs: Option<u32>,
    /// Training mixing range in dB as `lo:hi`, e.g. `-30:10`.
    #[arg(long, value_name = "LO:HI")]
    anr_range: Option<String>,
}

#[derive(Args)]
struct ScoreArgs {
    /// Model file written by a training run.
    #[arg(long)]
    model: PathBuf,
    /// WAV file to score.
    #[arg(long)]
    wav: PathBuf,
    /// Audio config TOML (for example the run's config.echo); defaults
    /// apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Decision threshold; prints a normal/anomaly decision when set.
    #[arg(long)]
    threshold: Option<f64>,
    /// Decision mode: frame or max.
    #[arg(long, default_value = "max")]
    mode: String,
    /// Optional CSV of per-frame scores.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalAucArgs {
    #[arg(long)]
    model: PathBuf,
    /// Test manifest with normal and else entries.
    #[arg(long)]
    manifest: PathBuf,
    /// Audio config TOML matching the model's features.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated ANR list in dB.
    #[arg(long, default_value = "-10,-15,-20")]
    anr: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for auc.csv and per-ANR ROC curves.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExportGridArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 201)]
    resolution: usize,
}

#[derive(Args)]
struct GenCorpusArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 24)]
    normal_train: usize,
    #[arg(long, default_value_t = 8)]
    normal_test: usize,
    #[arg(long, default_value_t = 6)]
    else_train: usize,
    #[arg(long, default_value_t = 4)]
    else_test: usize,
    /// Fraction of normal files carrying the rare-normal harmonic stack.
    #[arg(long, default_value_t = 0.2)]
    rare_fraction: f64,
}

fn parse_objective(text: &str) -> Result<ObjectiveKind> {
    match text.to_ascii_lowercase().as_str() {
        "re" => Ok(ObjectiveKind::Re),
        "snp" => Ok(ObjectiveKind::Snp),
        "bu" => Ok(ObjectiveKind::Bu),
        other => bail!("unknown objective '{other}' (expected re, snp or bu)"),
    }
}

fn parse_anr_range(text: &str) -> Result<(f64, f64)> {
    let (lo, hi) = text
        .split_once(':')
        .with_context(|| format!("anr range '{text}' must look like lo:hi"))?;
    let lo: f64 = lo.trim().parse().context("anr range low bound")?;
    let hi: f64 = hi.trim().parse().context("anr range high bound")?;
    Ok((lo, hi))
}

fn parse_anr_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .with_context(|| format!("bad ANR value '{s}'"))
        })
        .collect()
}

fn load_verify_config(args: &VerifyArgs) -> Result<VerifyConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            verify_config_from_toml(&text)?
        }
        None => VerifyConfig::default(),
    };
    if let Some(objective) = &args.objective {
        cfg.objective = parse_objective(objective)?;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(init_seed) = args.init_seed {
        cfg.init_seed = Some(init_seed);
    }
    if let Some(updates) = args.updates {
        cfg.updates = updates;
    }
    Ok(cfg)
}

fn load_audio_config(path: &Path) -> Result<AudioConfig> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    Ok(audio_config_from_toml(&text, base)?)
}

fn audio_features_from(config: &Option<PathBuf>) -> Result<batchuni_core::audio::FeatureConfig> {
    Ok(match config {
        Some(path) => load_audio_config(path)?.features,
        None => batchuni_core::audio::FeatureConfig::default(),
    })
}

fn cmd_verify(args: VerifyArgs) -> Result<()> {
    let cfg = load_verify_config(&args)?;
    let outcome = run_verify(&cfg)?;
    export_verify_artifacts(&outcome, &args.out)?;
    println!(
        "verify objective={} updates={} seed={}",
        cfg.objective, cfg.updates, cfg.seed
    );
    println!("D(p||q) = {:.4}", outcome.kld_p);
    println!("D(U||q) = {:.4}", outcome.kld_u);
    println!(
        "wall = {:.1}s, artifacts in {}",
        outcome.wall_secs,
        args.out.display()
    );
    Ok(())
}

fn cmd_train_audio(args: TrainAudioArgs) -> Result<()> {
    let mut cfg = load_audio_config(&args.config)?;
    if let Some(objective) = &args.objective {
        cfg.objective = parse_objective(objective)?;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(init_seed) = args.init_seed {
        cfg.init_seed = Some(init_seed);
    }
    if let Some(epochs) = args.epochs {
        cfg.epochs = epochs;
    }
    if let Some(range) = &args.anr_range {
        cfg.anr_range = parse_anr_range(range)?;
    }
    let outcome = run_audio(&cfg)?;
    export_audio_artifacts(&outcome, &args.out)?;
    println!(
        "train-audio objective={} D={} epochs={} seed={}",
        cfg.objective, outcome.feature_dim, cfg.epochs, cfg.seed
    );
    println!("anr_db\tframe_auc\tclip_auc");
    for row in &outcome.aucs {
        println!("{}\t{:.4}\t{:.4}", row.anr_db, row.frame_auc, row.clip_auc);
    }
    println!(
        "wall = {:.1}s, artifacts in {}",
        outcome.wall_secs,
        args.out.display()
    );
    Ok(())
}

fn cmd_score(args: ScoreArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let features = audio_features_from(&args.config)?;
    let scores = score_wav(&model, &features, &args.wav)?;
    let max = max_over_frames(&scores)?;
    let mean: f64 = scores.iter().sum::<f64>() / scores.len() as f64;
    println!("frames = {}", scores.len());
    println!("max_score = {max}");
    println!("mean_score = {mean}");

    if let Some(threshold) = args.threshold {
        let mode = match args.mode.as_str() {
            "frame" => DecisionMode::FrameWise,
            "max" => DecisionMode::MaxOverSequence,
            other => bail!("unknown decision mode '{other}' (expected frame or max)"),
        };
        let cfg = DecisionConfig { threshold, mode };
        match mode {
            DecisionMode::FrameWise => {
                let flagged = scores
                    .iter()
                    .filter(|&&s| decide(s, &cfg) == Decision::Anomaly)
                    .count();
                println!("frames_over_threshold = {flagged}");
                println!(
                    "decision = {}",
                    if flagged > 0 { "anomaly" } else { "normal" }
                );
            }
            DecisionMode::MaxOverSequence => {
                let verdict = if decide(max, &cfg) == Decision::Anomaly {
                    "anomaly"
                } else {
                    "normal"
                };
                println!("decision = {verdict}");
            }
        }
    }

    if let Some(out) = &args.out {
        let mut text = String::from("frame,score\n");
        for (i, s) in scores.iter().enumerate() {
            text.push_str(&format!("{i},{s}\n"));
        }
        fs::write(out, text).with_context(|| format!("writing {}", out.display()))?;
    }
    Ok(())
}

fn cmd_eval_auc(args: EvalAucArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let features = audio_features_from(&args.config)?;
    let anrs = parse_anr_list(&args.anr)?;
    let rows = evaluate_audio_model(&model, &features, &args.manifest, &anrs, args.seed)?;
    export_auc_artifacts(&rows, &args.out)?;
    println!("anr_db\tframe_auc\tclip_auc");
    for (row, _) in &rows {
        println!("{}\t{:.4}\t{:.4}", row.anr_db, row.frame_auc, row.clip_auc);
    }
    println!("artifacts in {}", args.out.display());
    Ok(())
}

fn cmd_export_grid(args: ExportGridArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let grid = EvalGrid {
        resolution: args.resolution,
        ..EvalGrid::default()
    };
    let scores = grid_scores(&model, &grid)?;
    let pdf = grid_pdf_from_scores(&scores, &grid);
    fs::create_dir_all(&args.out)?;
    write_grid_csv(&args.out.join("pdf.csv"), &pdf, &scores)?;
    write_grid_pgm(&args.out.join("pdf.pgm"), &grid, &pdf.density)?;
    write_grid_pgm(&args.out.join("score.pgm"), &grid, &scores)?;
    println!(
        "exported {} cells to {}",
        grid.num_cells(),
        args.out.display()
    );
    Ok(())
}

fn cmd_gen_corpus(args: GenCorpusArgs) -> Result<()> {
    let spec = ToneCorpusSpec {
        normal_train: args.normal_train,
        normal_test: args.normal_test,
        else_train: args.else_train,
        else_test: args.else_test,
        rare_fraction: args.rare_fraction,
        ..ToneCorpusSpec::default()
    };
    let corpus = generate_tone_corpus(&args.out, &spec, args.seed)?;
    println!("train manifest: {}", corpus.train_manifest.display());
    println!("test manifest:  {}", corpus.test_manifest.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(args) => cmd_verify(args),
        Command::TrainAudio(args) => cmd_train_audio(args),
        Command::Score(args) => cmd_score(args),
        Command::EvalAuc(args) => cmd_eval_auc(args),
        Command::ExportGrid(args) => cmd_export_grid(args),
        Command::GenCorpus(args) => cmd_gen_corpus(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
