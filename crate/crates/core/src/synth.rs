//! Data synthesis: the 2-D annulus verification dataset and audio
//! mini-batch construction with ANR-controlled anomaly mixing.

use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::audio::{features_from_wave, FeatureConfig};
use crate::corpus::{ClipCorpus, SegmentedCorpus};
use crate::{Error, Result};

/// Radial ranges and sample count for the annulus dataset. Normal samples
/// fill the disk `r <= 2`; anomalies the ring `2 < r <= 3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusConfig {
    pub count: usize,
    pub seed: u64,
    pub normal_radius: (f64, f64),
    pub anomaly_radius: (f64, f64),
}

impl Default for AnnulusConfig {
    fn default() -> Self {
        Self {
            count: 10_000,
            seed: 0,
            normal_radius: (0.0, 2.0),
            anomaly_radius: (2.0, 3.0),
        }
    }
}

impl AnnulusConfig {
    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::InvalidConfig("annulus count must be >= 1".into()));
        }
        if self.normal_radius.1 > self.anomaly_radius.0 {
            return Err(Error::InvalidConfig(
                "normal and anomaly radius ranges must be disjoint".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnnulusClass {
    Normal,
    Anomaly,
}

/// Samples `x = r (cos psi, sin psi)` with `r` uniform on the class range
/// and `psi` uniform on `[0, 2 pi)`. Radius-uniform sampling makes the
/// Cartesian density of the normal class proportional to `1/r`.
///
/// The normal range is sampled as `[lo, hi)`, the anomaly range as
/// `(lo, hi]`, keeping the classes separable at the shared boundary.
pub fn gen_annulus(cfg: &AnnulusConfig, class: AnnulusClass) -> Array2<f64> {
    // Distinct stream per class so normals and anomalies are independent
    // draws even under a shared seed.
    let stream = match class {
        AnnulusClass::Normal => 0x416e6e4e,
        AnnulusClass::Anomaly => 0x416e6e41,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ stream);
    let (lo, hi) = match class {
        AnnulusClass::Normal => cfg.normal_radius,
        AnnulusClass::Anomaly => cfg.anomaly_radius,
    };
    let mut out = Array2::zeros((cfg.count, 2));
    for mut row in out.rows_mut() {
        let u: f64 = rng.random_range(0.0..1.0);
        let r = match class {
            AnnulusClass::Normal => lo + u * (hi - lo),
            AnnulusClass::Anomaly => hi - u * (hi - lo),
        };
        let psi = rng.random_range(0.0..std::f64::consts::TAU);
        row[0] = r * psi.cos();
        row[1] = r * psi.sin();
    }
    out
}

/// Root mean square of a segment.
pub fn rms(samples: &[f64]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    (samples.iter().map(|&s| s * s).sum::<f64>() / samples.len() as f64).sqrt()
}

/// Gain `alpha` that places the mixed something-else power `anr_db` decibels
/// relative to the normal power: `alpha = 10^(anr/20) * rms(normal)/rms(else)`.
pub fn anr_gain(normal_segment: &[f64], else_segment: &[f64], anr_db: f64) -> Result<f64> {
    let rms_n = rms(normal_segment);
    let rms_e = rms(else_segment);
    if rms_n == 0.0 || rms_e == 0.0 {
        return Err(Error::SilentSegment);
    }
    Ok(10f64.powf(anr_db / 20.0) * rms_n / rms_e)
}

/// Mixing gain derived from a target ANR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixSpec {
    pub anr_db: f64,
    pub gain: f64,
}

impl MixSpec {
    pub fn for_segments(normal: &[f64], something_else: &[f64], anr_db: f64) -> Result<Self> {
        Ok(Self {
            anr_db,
            gain: anr_gain(normal, something_else, anr_db)?,
        })
    }
}

/// Where a synthesized mini-batch came from.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchProvenance {
    pub normal_segments: Vec<(String, usize)>,
    pub else_clip: String,
    /// Mixed sample span `[start, end)` within the concatenated signal.
    pub mix_span: (usize, usize),
    pub anr_db: f64,
    pub gain: f64,
}

/// Normal and anomalous feature batches with provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct MiniBatchPair {
    pub normal: Array2<f64>,
    pub anomaly: Array2<f64>,
    pub provenance: BatchProvenance,
}

/// Builds one training mini-batch: concatenates randomly chosen normal
/// segments, mixes one something-else clip at a random ANR from the range,
/// extracts features, and splits frames by whether their context window
/// overlaps the mixed span. Deterministic given the seed.
pub fn build_audio_minibatch(
    normal_corpus: &SegmentedCorpus,
    else_corpus: &ClipCorpus,
    feature_cfg: &FeatureConfig,
    anr_range: (f64, f64),
    segments_per_batch: usize,
    seed: u64,
) -> Result<MiniBatchPair> {
    feature_cfg.validate()?;
    if normal_corpus.is_empty() {
        return Err(Error::Corpus("empty normal corpus".into()));
    }
    if else_corpus.is_empty() {
        return Err(Error::Corpus("empty something-else corpus".into()));
    }
    if segments_per_batch == 0 {
        return Err(Error::InvalidConfig("segments_per_batch must be >= 1".into()));
    }
    if anr_range.0 > anr_range.1 {
        return Err(Error::InvalidConfig("anr range must satisfy lo <= hi".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut signal = Vec::with_capacity(segments_per_batch * normal_corpus.segment_len);
    let mut sources = Vec::with_capacity(segments_per_batch);
    for _ in 0..segments_per_batch {
        let idx = rng.random_range(0..normal_corpus.len());
        signal.extend_from_slice(&normal_corpus.segments[idx]);
        sources.push(normal_corpus.sources[idx].clone());
    }

    let clip_idx = rng.random_range(0..else_corpus.len());
    let clip = &else_corpus.clips[clip_idx];
    if clip.len() > signal.len() {
        return Err(Error::Corpus(format!(
            "something-else clip '{}' ({} samples) longer than the concatenated signal ({})",
            else_corpus.names[clip_idx],
            clip.len(),
            signal.len()
        )));
    }

    let start = rng.random_range(0..=signal.len() - clip.len());
    let anr_db = if anr_range.0 == anr_range.1 {
        anr_range.0
    } else {
        rng.random_range(anr_range.0..anr_range.1)
    };
    // Degenerate empty clip: nothing to mix, the empty span below makes the
    // split reject the batch.
    let gain = if clip.is_empty() {
        0.0
    } else {
        let mix = MixSpec::for_segments(&signal[start..start + clip.len()], clip, anr_db)?;
        for (i, &c) in clip.iter().enumerate() {
            signal[start + i] += mix.gain * c;
        }
        mix.gain
    };
    let mix_span = (start, start + clip.len());

    let features = features_from_wave(&signal, feature_cfg)?;
    split_by_mix_span(&features.frames, features.config, mix_span).map(|(normal, anomaly)| {
        MiniBatchPair {
            normal,
            anomaly,
            provenance: BatchProvenance {
                normal_segments: sources,
                else_clip: else_corpus.names[clip_idx].clone(),
                mix_span,
                anr_db,
                gain,
            },
        }
    })
}

/// True when the context window of feature frame `t` overlaps the sample
/// span. The window covers STFT frames `t ..= t + 2C`,
/// samples `[t*hop, (t + 2C)*hop + stft_len)`.
pub fn frame_overlaps_span(t: usize, cfg: &FeatureConfig, span: (usize, usize)) -> bool {
    let (m0, m1) = span;
    let w0 = t * cfg.hop;
    let w1 = (t + 2 * cfg.context) * cfg.hop + cfg.stft_len;
    w0 < m1 && m0 < w1
}

fn split_by_mix_span(
    frames: &Array2<f64>,
    cfg: FeatureConfig,
    span: (usize, usize),
) -> Result<(Array2<f64>, Array2<f64>)> {
    let mut normal_rows = Vec::new();
    let mut anomaly_rows = Vec::new();
    for (t, row) in frames.rows().into_iter().enumerate() {
        if span.1 > span.0 && frame_overlaps_span(t, &cfg, span) {
            anomaly_rows.push(row);
        } else {
            normal_rows.push(row);
        }
    }
    if anomaly_rows.is_empty() {
        return Err(Error::EmptyMixRegion);
    }
    if normal_rows.is_empty() {
        return Err(Error::Corpus(
            "mix covers every frame; no normal frames remain".into(),
        ));
    }
    let d = frames.ncols();
    let stack = |rows: Vec<ndarray::ArrayView1<f64>>| {
        let mut out = Array2::zeros((rows.len(), d));
        for (mut dst, src) in out.rows_mut().into_iter().zip(rows) {
            dst.assign(&src);
        }
        out
    };
    Ok((stack(normal_rows), stack(anomaly_rows)))
}
