//! WAV input to context-stacked log-mel feature vectors.
//!
//! Pipeline: magnitude STFT, mel filterbank, natural log with a floor, then
//! stacking the log-mel vectors of the `2C + 1` frames around each center
//! frame into one feature vector of dimension `D = M (2C + 1)`.

mod mel;
mod stft;
mod wav;

pub use mel::{mel_centers, mel_matrix};
pub use stft::stft_mag;
pub use wav::{read_wav_mono, write_wav_mono};

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Floor applied before the natural log so silent bands stay finite.
pub const LOG_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowKind {
    Hann,
    Rectangular,
}

impl WindowKind {
    pub(crate) fn coefficients(self, len: usize) -> Vec<f64> {
        match self {
            WindowKind::Hann => (0..len)
                .map(|n| {
                    0.5 * (1.0 - (2.0 * std::f64::consts::PI * n as f64 / len as f64).cos())
                })
                .collect(),
            WindowKind::Rectangular => vec![1.0; len],
        }
    }
}

/// STFT, mel and context-stacking parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    pub sample_rate: u32,
    pub stft_len: usize,
    pub hop: usize,
    /// Mel band count `M`.
    pub mel_bands: usize,
    /// Context window half-size `C`; each feature stacks `2C + 1` frames.
    pub context: usize,
    pub window: WindowKind,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            sample_rate: 16_000,
            stft_len: 512,
            hop: 256,
            mel_bands: 40,
            context: 5,
            window: WindowKind::Hann,
        }
    }
}

impl FeatureConfig {
    /// Number of STFT magnitude bins (`stft_len / 2 + 1`).
    pub fn bins(&self) -> usize {
        self.stft_len / 2 + 1
    }

    /// Feature dimension `D = M (2C + 1)`.
    pub fn feature_dim(&self) -> usize {
        self.mel_bands * (2 * self.context + 1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.hop == 0 || self.stft_len <= self.hop {
            return Err(Error::InvalidConfig(
                "need stft_len > hop > 0 for overlapping frames".into(),
            ));
        }
        if self.mel_bands == 0 {
            return Err(Error::InvalidConfig("mel_bands must be >= 1".into()));
        }
        if self.sample_rate == 0 {
            return Err(Error::InvalidConfig("sample_rate must be > 0".into()));
        }
        Ok(())
    }
}

/// Ordered feature vectors with their frame-to-sample alignment.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSequence {
    /// One feature vector per row, dimension `D`.
    pub frames: Array2<f64>,
    pub config: FeatureConfig,
}

impl FeatureSequence {
    pub fn len(&self) -> usize {
        self.frames.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.frames.ncols()
    }

    /// Sample span `[start, end)` covered by the context window of feature
    /// frame `t`: STFT frames `t ..= t + 2C`.
    pub fn sample_span(&self, t: usize) -> (usize, usize) {
        let c = self.config.context;
        let start = t * self.config.hop;
        let end = (t + 2 * c) * self.config.hop + self.config.stft_len;
        (start, end)
    }
}

/// Log-mel with context stacking from a magnitude spectrogram of shape
/// `(bins, frames)`.
pub fn logmel_context(spectrogram: ArrayView2<f64>, cfg: &FeatureConfig) -> Result<FeatureSequence> {
    cfg.validate()?;
    let frames = spectrogram.ncols();
    let needed = 2 * cfg.context + 1;
    if frames < needed {
        return Err(Error::WaveTooShort {
            len: frames,
            min: needed,
        });
    }
    if spectrogram.nrows() != cfg.bins() {
        return Err(Error::DimMismatch {
            context: "spectrogram bins",
            expected: cfg.bins(),
            actual: spectrogram.nrows(),
        });
    }
    let mel = mel_matrix(cfg)?;
    let mut logmel = mel.dot(&spectrogram);
    logmel.mapv_inplace(|v| v.max(LOG_FLOOR).ln());

    let m = cfg.mel_bands;
    let out_frames = frames - 2 * cfg.context;
    let mut out = Array2::zeros((out_frames, cfg.feature_dim()));
    for t in 0..out_frames {
        for c in 0..needed {
            let col = logmel.column(t + c);
            for (b, &v) in col.iter().enumerate() {
                out[[t, c * m + b]] = v;
            }
        }
    }
    Ok(FeatureSequence {
        frames: out,
        config: *cfg,
    })
}

/// Full pipeline: waveform to context-stacked log-mel features.
pub fn features_from_wave(wave: &[f64], cfg: &FeatureConfig) -> Result<FeatureSequence> {
    let spec = stft_mag(wave, cfg)?;
    logmel_context(spec.view(), cfg)
}
