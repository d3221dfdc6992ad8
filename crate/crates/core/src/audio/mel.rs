//! Triangular mel filterbank, HTK convention.

use ndarray::Array2;

use super::FeatureConfig;
use crate::{Error, Result};

fn hz_to_mel(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

fn mel_to_hz(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

/// Non-negative `(mel_bands, bins)` matrix of triangular filters spanning
/// 0 Hz to Nyquist on the mel scale. Rows are not normalized.
pub fn mel_matrix(cfg: &FeatureConfig) -> Result<Array2<f64>> {
    cfg.validate()?;
    let bins = cfg.bins();
    let m = cfg.mel_bands;
    let f_max = cfg.sample_rate as f64 / 2.0;

    // M + 2 corner frequencies, equally spaced in mel.
    let mel_max = hz_to_mel(f_max);
    let corners: Vec<f64> = (0..m + 2)
        .map(|i| mel_to_hz(mel_max * i as f64 / (m + 1) as f64))
        .collect();

    let bin_hz: Vec<f64> = (0..bins)
        .map(|k| k as f64 * cfg.sample_rate as f64 / cfg.stft_len as f64)
        .collect();

    let mut matrix = Array2::zeros((m, bins));
    for band in 0..m {
        let (lo, mid, hi) = (corners[band], corners[band + 1], corners[band + 2]);
        for (k, &f) in bin_hz.iter().enumerate() {
            let w = if f >= lo && f <= mid && mid > lo {
                (f - lo) / (mid - lo)
            } else if f > mid && f <= hi && hi > mid {
                (hi - f) / (hi - mid)
            } else {
                0.0
            };
            matrix[[band, k]] = w;
        }
        if matrix.row(band).iter().all(|&w| w == 0.0) {
            return Err(Error::MelTooFine { bands: m, bins });
        }
    }
    Ok(matrix)
}

/// Center (peak) frequency of each filter in Hz.
pub fn mel_centers(cfg: &FeatureConfig) -> Vec<f64> {
    let f_max = cfg.sample_rate as f64 / 2.0;
    let mel_max = hz_to_mel(f_max);
    (1..=cfg.mel_bands)
        .map(|i| mel_to_hz(mel_max * i as f64 / (cfg.mel_bands + 1) as f64))
        .collect()
}
