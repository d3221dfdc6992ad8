//! Experiment orchestration: the 2-D verification experiment, the scaled
//! audio experiment, and artifact export.
//!
//! Every run is fully determined by its config and seed: data generation,
//! mini-batch draws and initialization all derive from seeded ChaCha streams,
//! and training is single-threaded.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use ndarray::{Array2, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::audio::{features_from_wave, read_wav_mono, FeatureConfig};
use crate::corpus::{ClipCorpus, CorpusManifest, SegmentedCorpus};
use crate::eval::{
    auc, grid_pdf_from_scores, grid_pdf_kld, grid_scores, max_over_frames, roc_points,
    write_grid_csv, write_grid_pgm, EvalGrid, GridPdf, OracleDensity,
};
use crate::kde::KdeConfig;
use crate::nn::{save_model, AeModel, AeSpec};
use crate::objectives::{loss_and_grad, ObjectiveConfig, ObjectiveKind};
use crate::optim::{AmsGrad, LrSchedule};
use crate::synth::{anr_gain, build_audio_minibatch, frame_overlaps_span, gen_annulus, AnnulusClass, AnnulusConfig};
use crate::{Error, Result};

/// Separates the seeded random streams of one run.
fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const STREAM_BATCH: u64 = 1;
const STREAM_EVAL: u64 = 2;

/// Verification experiment settings (annulus data, 2/20,10,20/2 sigmoid AE).
///
/// `sigma` and `clip_lambda` default to `2D = 4` when unset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifyConfig {
    pub objective: ObjectiveKind,
    /// Normal and anomalous sample count, each.
    pub samples_per_class: usize,
    pub batch_normal: usize,
    pub batch_anomaly: usize,
    pub updates: usize,
    pub learning_rate: f64,
    pub sigma: Option<f64>,
    pub clip_lambda: Option<f64>,
    pub weight_floor: f64,
    pub normalize_kde_batch: bool,
    pub grid_resolution: usize,
    pub seed: u64,
    /// Model initialization seed; defaults to `seed`. Sharing it across
    /// objectives gives all of them identical initial parameters.
    pub init_seed: Option<u64>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            objective: ObjectiveKind::Bu,
            samples_per_class: 10_000,
            batch_normal: 500,
            batch_anomaly: 500,
            updates: 5_000,
            learning_rate: 1e-3,
            sigma: None,
            clip_lambda: None,
            weight_floor: 1e-6,
            normalize_kde_batch: false,
            grid_resolution: 201,
            seed: 0,
            init_seed: None,
        }
    }
}

impl VerifyConfig {
    /// Input dimension of the verification model.
    pub const INPUT_DIM: usize = 2;

    pub fn resolved_sigma(&self) -> f64 {
        self.sigma.unwrap_or(2.0 * Self::INPUT_DIM as f64)
    }

    pub fn resolved_lambda(&self) -> f64 {
        self.clip_lambda.unwrap_or(2.0 * Self::INPUT_DIM as f64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples_per_class == 0 || self.batch_normal == 0 || self.batch_anomaly == 0 {
            return Err(Error::InvalidConfig("sample and batch counts must be positive".into()));
        }
        if self.batch_normal > self.samples_per_class || self.batch_anomaly > self.samples_per_class
        {
            return Err(Error::InvalidConfig(
                "mini-batch size cannot exceed the dataset size".into(),
            ));
        }
        if self.learning_rate <= 0.0 {
            return Err(Error::InvalidConfig("learning_rate must be > 0".into()));
        }
        if self.grid_resolution < 2 {
            return Err(Error::InvalidConfig("grid_resolution must be >= 2".into()));
        }
        self.objective_config().validate()
    }

    pub fn objective_config(&self) -> ObjectiveConfig {
        let kde = KdeConfig::new(self.resolved_sigma())
            .with_weight_floor(self.weight_floor)
            .with_normalization(self.normalize_kde_batch);
        ObjectiveConfig {
            kind: self.objective,
            clip_lambda: self.resolved_lambda(),
            kde,
        }
    }

    /// Copy with `sigma`/`clip_lambda` made explicit, used for the config
    /// echo.
    fn resolved(&self) -> Self {
        Self {
            sigma: Some(self.resolved_sigma()),
            clip_lambda: Some(self.resolved_lambda()),
            init_seed: Some(self.init_seed.unwrap_or(self.seed)),
            ..self.clone()
        }
    }
}

/// Result of one verification run.
#[derive(Debug, Clone)]
pub struct VerifyOutcome {
    pub model: AeModel,
    pub loss_curve: Vec<f64>,
    /// `D(p || q)`: divergence from the data density to the learned one.
    pub kld_p: f64,
    /// `D(U || q)`: divergence from the uniform target to the learned one.
    pub kld_u: f64,
    pub grid: EvalGrid,
    pub pdf: GridPdf,
    pub grid_score_values: Vec<f64>,
    pub wall_secs: f64,
    pub config: VerifyConfig,
}

fn take_rows(data: &Array2<f64>, indices: &[usize]) -> Array2<f64> {
    data.select(Axis(0), indices)
}

fn sample_indices(rng: &mut ChaCha8Rng, population: usize, amount: usize) -> Vec<usize> {
    rand::seq::index::sample(rng, population, amount).into_vec()
}

/// Trains the verification model with the configured objective and measures
/// the learned density against both annulus oracles.
pub fn run_verify(cfg: &VerifyConfig) -> Result<VerifyOutcome> {
    cfg.validate()?;
    let start = Instant::now();

    let annulus = AnnulusConfig {
        count: cfg.samples_per_class,
        seed: cfg.seed,
        ..AnnulusConfig::default()
    };
    annulus.validate()?;
    let normal_data = gen_annulus(&annulus, AnnulusClass::Normal);
    let anomaly_data = gen_annulus(&annulus, AnnulusClass::Anomaly);

    let objective = cfg.objective_config();
    let mut model = AeModel::glorot_init(
        &AeSpec::verification(),
        cfg.init_seed.unwrap_or(cfg.seed),
    )?;
    let mut optimizer = AmsGrad::new(cfg.learning_rate);
    let mut batch_rng = ChaCha8Rng::seed_from_u64(mix_seed(cfg.seed, STREAM_BATCH));

    let mut loss_curve = Vec::with_capacity(cfg.updates);
    for _ in 0..cfg.updates {
        let normal_idx = sample_indices(&mut batch_rng, cfg.samples_per_class, cfg.batch_normal);
        let normal_batch = take_rows(&normal_data, &normal_idx);
        let anomaly_batch = if objective.kind.uses_anomaly_batch() {
            let idx = sample_indices(&mut batch_rng, cfg.samples_per_class, cfg.batch_anomaly);
            Some(take_rows(&anomaly_data, &idx))
        } else {
            None
        };
        let (report, grads) = loss_and_grad(
            &model,
            &objective,
            normal_batch.view(),
            anomaly_batch.as_ref().map(|b| b.view()),
        )?;
        optimizer.step(&mut model, &grads)?;
        loss_curve.push(report.total);
    }

    let grid = EvalGrid {
        resolution: cfg.grid_resolution,
        ..EvalGrid::default()
    };
    let grid_score_values = grid_scores(&model, &grid)?;
    let pdf = grid_pdf_from_scores(&grid_score_values, &grid);
    let oracle_p = OracleDensity::AnnulusP.on_grid(&grid);
    let oracle_u = OracleDensity::AnnulusUniform.on_grid(&grid);
    let kld_p = grid_pdf_kld(&oracle_p, &pdf)?;
    let kld_u = grid_pdf_kld(&oracle_u, &pdf)?;

    Ok(VerifyOutcome {
        model,
        loss_curve,
        kld_p,
        kld_u,
        grid,
        pdf,
        grid_score_values,
        wall_secs: start.elapsed().as_secs_f64(),
        config: cfg.clone(),
    })
}

/// Audio experiment settings: network size, feature layout, schedule and
/// corpus manifests.
///
/// `sigma` defaults to `1/(2D)` and `clip_lambda` to twice the mel band
/// count when unset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AudioConfig {
    pub objective: ObjectiveKind,
    pub features: FeatureConfig,
    /// Hidden FCN layers per encoder/decoder half, between the input and
    /// output layers.
    pub hidden_layers: usize,
    pub hidden_units: usize,
    pub latent_dim: usize,
    pub epochs: u32,
    pub batches_per_epoch: usize,
    pub schedule: LrSchedule,
    pub sigma: Option<f64>,
    pub clip_lambda: Option<f64>,
    pub weight_floor: f64,
    pub normalize_kde_batch: bool,
    /// Training mixing range in dB, sampled uniformly per mini-batch.
    pub anr_range: (f64, f64),
    pub segments_per_batch: usize,
    /// ANR conditions evaluated on the test set.
    pub eval_anrs: Vec<f64>,
    pub seed: u64,
    pub init_seed: Option<u64>,
    pub train_manifest: PathBuf,
    pub test_manifest: PathBuf,
}

impl Default for AudioConfig {
    fn default() -> Self {
        Self {
            objective: ObjectiveKind::Bu,
            features: FeatureConfig::default(),
            hidden_layers: 2,
            hidden_units: 128,
            latent_dim: 40,
            epochs: 200,
            batches_per_epoch: 500,
            schedule: LrSchedule::WarmThenLinear {
                base_rate: 1e-4,
                hold_epochs: 100,
                end_epoch: 200,
                final_divisor: 100.0,
            },
            sigma: None,
            clip_lambda: None,
            weight_floor: 1e-6,
            normalize_kde_batch: true,
            anr_range: (-30.0, 10.0),
            segments_per_batch: 10,
            eval_anrs: vec![-10.0, -15.0, -20.0],
            seed: 0,
            init_seed: None,
            train_manifest: PathBuf::from("train_manifest.txt"),
            test_manifest: PathBuf::from("test_manifest.txt"),
        }
    }
}

impl AudioConfig {
    pub fn feature_dim(&self) -> usize {
        self.features.feature_dim()
    }

    pub fn resolved_sigma(&self) -> f64 {
        self.sigma
            .unwrap_or_else(|| 1.0 / (2.0 * self.feature_dim() as f64))
    }

    pub fn resolved_lambda(&self) -> f64 {
        self.clip_lambda
            .unwrap_or_else(|| 2.0 * self.features.mel_bands as f64)
    }

    pub fn validate(&self) -> Result<()> {
        self.features.validate()?;
        self.schedule.validate()?;
        if self.hidden_units == 0 || self.latent_dim == 0 {
            return Err(Error::InvalidConfig("network sizes must be positive".into()));
        }
        if self.epochs == 0 || self.batches_per_epoch == 0 {
            return Err(Error::InvalidConfig("epoch and batch counts must be positive".into()));
        }
        if self.segments_per_batch == 0 {
            return Err(Error::InvalidConfig("segments_per_batch must be >= 1".into()));
        }
        if self.anr_range.0 > self.anr_range.1 {
            return Err(Error::InvalidConfig("anr_range must satisfy lo <= hi".into()));
        }
        if self.eval_anrs.is_empty() {
            return Err(Error::InvalidConfig("eval_anrs must not be empty".into()));
        }
        self.objective_config().validate()
    }

    pub fn objective_config(&self) -> ObjectiveConfig {
        let kde = KdeConfig::new(self.resolved_sigma())
            .with_weight_floor(self.weight_floor)
            .with_normalization(self.normalize_kde_batch);
        ObjectiveConfig {
            kind: self.objective,
            clip_lambda: self.resolved_lambda(),
            kde,
        }
    }

    pub fn model_spec(&self) -> AeSpec {
        AeSpec::audio(
            self.feature_dim(),
            self.hidden_layers,
            self.hidden_units,
            self.latent_dim,
        )
    }

    fn resolved(&self) -> Self {
        Self {
            sigma: Some(self.resolved_sigma()),
            clip_lambda: Some(self.resolved_lambda()),
            init_seed: Some(self.init_seed.unwrap_or(self.seed)),
            ..self.clone()
        }
    }
}

/// AUC of one evaluated ANR condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AucRow {
    pub anr_db: f64,
    /// Frames of mixed regions vs all frames of clean clips.
    pub frame_auc: f64,
    /// Max-over-frames clip scores, mixed vs clean clips.
    pub clip_auc: f64,
}

/// Result of one audio run.
#[derive(Debug, Clone)]
pub struct AudioOutcome {
    pub model: AeModel,
    pub loss_curve: Vec<f64>,
    pub aucs: Vec<AucRow>,
    pub feature_dim: usize,
    pub wall_secs: f64,
    pub config: AudioConfig,
}

/// Trains the configured audio model and evaluates per-ANR AUC on the test
/// manifest.
pub fn run_audio(cfg: &AudioConfig) -> Result<AudioOutcome> {
    cfg.validate()?;
    let start = Instant::now();

    let train = CorpusManifest::load(&cfg.train_manifest)?;
    let normal_corpus = SegmentedCorpus::load(&train.normal, cfg.features.sample_rate)?;
    let else_corpus = ClipCorpus::load(&train.something_else, cfg.features.sample_rate)?;

    let objective = cfg.objective_config();
    let mut model = AeModel::glorot_init(&cfg.model_spec(), cfg.init_seed.unwrap_or(cfg.seed))?;
    let mut optimizer = AmsGrad::new(cfg.schedule.lr_at(0));

    let mut loss_curve = Vec::with_capacity(cfg.epochs as usize * cfg.batches_per_epoch);
    for epoch in 0..cfg.epochs {
        let lr = cfg.schedule.lr_at(epoch);
        for batch in 0..cfg.batches_per_epoch {
            let update = epoch as u64 * cfg.batches_per_epoch as u64 + batch as u64;
            let pair = build_batch_with_retry(
                &normal_corpus,
                &else_corpus,
                &cfg.features,
                cfg.anr_range,
                cfg.segments_per_batch,
                cfg.seed,
                update,
            )?;
            let (report, grads) = loss_and_grad(
                &model,
                &objective,
                pair.normal.view(),
                Some(pair.anomaly.view()),
            )?;
            optimizer.step_with_lr(&mut model, &grads, lr)?;
            loss_curve.push(report.total);
        }
    }

    let aucs = evaluate_audio_model(
        &model,
        &cfg.features,
        &cfg.test_manifest,
        &cfg.eval_anrs,
        mix_seed(cfg.seed, STREAM_EVAL),
    )?
    .into_iter()
    .map(|(row, _)| row)
    .collect();

    Ok(AudioOutcome {
        model,
        loss_curve,
        aucs,
        feature_dim: cfg.feature_dim(),
        wall_secs: start.elapsed().as_secs_f64(),
        config: cfg.clone(),
    })
}

/// A synthesized batch occasionally has no anomaly frames (for example a
/// clip landing entirely inside a silent stretch is impossible, but an empty
/// clip is); retry with a perturbed stream a few times before giving up.
fn build_batch_with_retry(
    normal_corpus: &SegmentedCorpus,
    else_corpus: &ClipCorpus,
    features: &FeatureConfig,
    anr_range: (f64, f64),
    segments_per_batch: usize,
    seed: u64,
    update: u64,
) -> Result<crate::synth::MiniBatchPair> {
    let mut last_err = None;
    for attempt in 0..8 {
        let batch_seed = mix_seed(seed, STREAM_BATCH ^ (update << 8) ^ (attempt << 56));
        match build_audio_minibatch(
            normal_corpus,
            else_corpus,
            features,
            anr_range,
            segments_per_batch,
            batch_seed,
        ) {
            Ok(pair) => return Ok(pair),
            Err(e @ Error::EmptyMixRegion) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("retry loop recorded an error"))
}

/// Frame scores of one WAV under a trained model.
pub fn score_wav(model: &AeModel, features: &FeatureConfig, path: &Path) -> Result<Vec<f64>> {
    if model.input_dim() != features.feature_dim() {
        return Err(Error::DimMismatch {
            context: "model input vs feature dim",
            expected: model.input_dim(),
            actual: features.feature_dim(),
        });
    }
    let wave = read_wav_mono(path, features.sample_rate)?;
    let seq = features_from_wave(&wave, features)?;
    crate::objectives::anomaly_scores(model, seq.frames.view())
}

/// Evaluates a trained model against a test manifest: clean normal clips vs
/// the same clips with something-else audio mixed at each ANR. Returns per
/// ANR the AUC row and the ROC points of the frame-level scores.
pub fn evaluate_audio_model(
    model: &AeModel,
    features: &FeatureConfig,
    test_manifest: &Path,
    anrs: &[f64],
    seed: u64,
) -> Result<Vec<(AucRow, Vec<(f64, f64, f64)>)>> {
    if model.input_dim() != features.feature_dim() {
        return Err(Error::DimMismatch {
            context: "model input vs feature dim",
            expected: model.input_dim(),
            actual: features.feature_dim(),
        });
    }
    let manifest = CorpusManifest::load(test_manifest)?;
    if manifest.normal.is_empty() || manifest.something_else.is_empty() {
        return Err(Error::Corpus(
            "test manifest needs both normal and else entries".into(),
        ));
    }
    let waves: Vec<Vec<f64>> = manifest
        .normal
        .iter()
        .map(|p| read_wav_mono(p, features.sample_rate))
        .collect::<Result<_>>()?;
    let clips = ClipCorpus::load(&manifest.something_else, features.sample_rate)?;

    // Clean reference scores, shared across ANR conditions.
    let mut clean_frame_scores = Vec::new();
    let mut clean_clip_scores = Vec::new();
    for wave in &waves {
        let seq = features_from_wave(wave, features)?;
        let scores = crate::objectives::anomaly_scores(model, seq.frames.view())?;
        clean_clip_scores.push(max_over_frames(&scores)?);
        clean_frame_scores.extend(scores);
    }

    let mut out = Vec::with_capacity(anrs.len());
    for (a_idx, &anr_db) in anrs.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, a_idx as u64));
        let mut anomaly_frame_scores = Vec::new();
        let mut mixed_clip_scores = Vec::new();
        for (i, wave) in waves.iter().enumerate() {
            let clip = &clips.clips[i % clips.len()];
            let m = clip.len().min(wave.len());
            if m == 0 {
                continue;
            }
            let start = {
                use rand::Rng;
                rng.random_range(0..=wave.len() - m)
            };
            let mut mixed = wave.clone();
            let gain = anr_gain(&mixed[start..start + m], &clip[..m], anr_db)?;
            for (k, &c) in clip[..m].iter().enumerate() {
                mixed[start + k] += gain * c;
            }
            let seq = features_from_wave(&mixed, features)?;
            let scores = crate::objectives::anomaly_scores(model, seq.frames.view())?;
            mixed_clip_scores.push(max_over_frames(&scores)?);
            for (t, &s) in scores.iter().enumerate() {
                if frame_overlaps_span(t, features, (start, start + m)) {
                    anomaly_frame_scores.push(s);
                }
            }
        }
        let frame_auc = auc(&clean_frame_scores, &anomaly_frame_scores)?;
        let clip_auc = auc(&clean_clip_scores, &mixed_clip_scores)?;
        let roc = roc_points(&clean_frame_scores, &anomaly_frame_scores)?;
        out.push((
            AucRow {
                anr_db,
                frame_auc,
                clip_auc,
            },
            roc,
        ));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Artifact export
// ---------------------------------------------------------------------------

fn write_loss_csv(path: &Path, losses: &[f64]) -> Result<()> {
    let mut text = String::from("update,loss\n");
    for (i, &l) in losses.iter().enumerate() {
        text.push_str(&format!("{},{}\n", i, l));
    }
    fs::write(path, text)?;
    Ok(())
}

fn write_kld_csv(path: &Path, kld_p: f64, kld_u: f64) -> Result<()> {
    let text = format!("divergence,value\nD(p||q),{}\nD(U||q),{}\n", kld_p, kld_u);
    fs::write(path, text)?;
    Ok(())
}

fn write_auc_csv(path: &Path, rows: &[AucRow]) -> Result<()> {
    let mut text = String::from("anr_db,frame_auc,clip_auc\n");
    for row in rows {
        text.push_str(&format!("{},{},{}\n", row.anr_db, row.frame_auc, row.clip_auc));
    }
    fs::write(path, text)?;
    Ok(())
}

/// Staged, near-atomic export: everything is written into a hidden staging
/// directory next to the target and only moved in once complete, so a failed
/// export leaves no partial artifact files behind.
struct StagedDir {
    staging: PathBuf,
    target: PathBuf,
}

impl StagedDir {
    fn create(target: &Path) -> Result<Self> {
        let name = target
            .file_name()
            .ok_or_else(|| Error::InvalidConfig("output dir needs a name".into()))?;
        let staging = target.with_file_name(format!(".{}.staging", name.to_string_lossy()));
        if staging.exists() {
            fs::remove_dir_all(&staging)?;
        }
        fs::create_dir_all(&staging)?;
        Ok(Self {
            staging,
            target: target.to_path_buf(),
        })
    }

    fn path(&self, file: &str) -> PathBuf {
        self.staging.join(file)
    }

    /// Moves every staged file into the target directory.
    fn commit(self) -> Result<()> {
        fs::create_dir_all(&self.target)?;
        for entry in fs::read_dir(&self.staging)? {
            let entry = entry?;
            fs::rename(entry.path(), self.target.join(entry.file_name()))?;
        }
        fs::remove_dir_all(&self.staging)?;
        Ok(())
    }
}

impl Drop for StagedDir {
    fn drop(&mut self) {
        // Best-effort cleanup when an export bails out early.
        let _ = fs::remove_dir_all(&self.staging);
    }
}

/// Exports a verification run:
/// `loss.csv, kld.csv, pdf.csv, pdf.pgm, score.pgm, model.bin, config.echo`.
pub fn export_verify_artifacts(outcome: &VerifyOutcome, dir: &Path) -> Result<()> {
    let staged = StagedDir::create(dir)?;
    write_loss_csv(&staged.path("loss.csv"), &outcome.loss_curve)?;
    write_kld_csv(&staged.path("kld.csv"), outcome.kld_p, outcome.kld_u)?;
    write_grid_csv(&staged.path("pdf.csv"), &outcome.pdf, &outcome.grid_score_values)?;
    write_grid_pgm(&staged.path("pdf.pgm"), &outcome.grid, &outcome.pdf.density)?;
    write_grid_pgm(
        &staged.path("score.pgm"),
        &outcome.grid,
        &outcome.grid_score_values,
    )?;
    save_model(&outcome.model, &staged.path("model.bin"))?;
    let echo = toml::to_string_pretty(&outcome.config.resolved())
        .map_err(|e| Error::ConfigFormat(e.to_string()))?;
    fs::write(staged.path("config.echo"), echo)?;
    staged.commit()
}

/// Exports an audio run: `loss.csv, auc.csv, model.bin, config.echo`.
pub fn export_audio_artifacts(outcome: &AudioOutcome, dir: &Path) -> Result<()> {
    let staged = StagedDir::create(dir)?;
    write_loss_csv(&staged.path("loss.csv"), &outcome.loss_curve)?;
    write_auc_csv(&staged.path("auc.csv"), &outcome.aucs)?;
    save_model(&outcome.model, &staged.path("model.bin"))?;
    let echo = toml::to_string_pretty(&outcome.config.resolved())
        .map_err(|e| Error::ConfigFormat(e.to_string()))?;
    fs::write(staged.path("config.echo"), echo)?;
    staged.commit()
}

/// Writes the per-ANR AUC table and frame-level ROC curves produced by
/// [`evaluate_audio_model`].
pub fn export_auc_artifacts(
    rows: &[(AucRow, Vec<(f64, f64, f64)>)],
    dir: &Path,
) -> Result<()> {
    let staged = StagedDir::create(dir)?;
    let aucs: Vec<AucRow> = rows.iter().map(|(r, _)| *r).collect();
    write_auc_csv(&staged.path("auc.csv"), &aucs)?;
    for (row, roc) in rows {
        let name = format!("roc_anr{}.csv", row.anr_db);
        crate::eval::write_roc_csv(&staged.path(&name), roc)?;
    }
    staged.commit()
}

/// Parses a TOML verification config.
pub fn verify_config_from_toml(text: &str) -> Result<VerifyConfig> {
    toml::from_str(text).map_err(|e| Error::ConfigFormat(e.to_string()))
}

/// Parses a TOML audio config. Relative manifest paths are resolved against
/// `base_dir`.
pub fn audio_config_from_toml(text: &str, base_dir: &Path) -> Result<AudioConfig> {
    let mut cfg: AudioConfig =
        toml::from_str(text).map_err(|e| Error::ConfigFormat(e.to_string()))?;
    if cfg.train_manifest.is_relative() {
        cfg.train_manifest = base_dir.join(&cfg.train_manifest);
    }
    if cfg.test_manifest.is_relative() {
        cfg.test_manifest = base_dir.join(&cfg.test_manifest);
    }
    Ok(cfg)
}
