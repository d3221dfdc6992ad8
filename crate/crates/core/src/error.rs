use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("layer dimensions do not chain at layer {index}: previous output {expected}, next input {actual}")]
    BrokenChain {
        index: usize,
        expected: usize,
        actual: usize,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("empty batch passed to {0}")]
    EmptyBatch(&'static str),

    #[error("batch too small for {context}: need at least {min} samples, got {got}")]
    BatchTooSmall {
        context: &'static str,
        min: usize,
        got: usize,
    },

    #[error("gradient/optimizer state does not match model shapes")]
    ShapeIncongruent,

    #[error("waveform too short: {len} samples, need at least {min}")]
    WaveTooShort { len: usize, min: usize },

    #[error("segment has zero RMS; cannot set a mixing gain")]
    SilentSegment,

    #[error("mel filterbank too fine: {bands} bands over {bins} bins leaves an empty filter")]
    MelTooFine { bands: usize, bins: usize },

    #[error("unsupported wav format in {path}: {reason}")]
    WavFormat { path: PathBuf, reason: String },

    #[error("corpus error: {0}")]
    Corpus(String),

    #[error("synthesized mini-batch has no anomaly frames; batch rejected")]
    EmptyMixRegion,

    #[error("model file error: {0}")]
    ModelFormat(String),

    #[error("config file error: {0}")]
    ConfigFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("wav error: {0}")]
    Wav(#[from] hound::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
