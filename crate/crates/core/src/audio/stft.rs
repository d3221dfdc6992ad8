//! Magnitude STFT.

use ndarray::Array2;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::FeatureConfig;
use crate::{Error, Result};

/// Magnitude spectrogram of shape `(bins, frames)` with
/// `bins = stft_len/2 + 1`. Frame `f` covers samples
/// `[f*hop, f*hop + stft_len)`; the frame count is
/// `floor((len - stft_len)/hop) + 1`.
pub fn stft_mag(wave: &[f64], cfg: &FeatureConfig) -> Result<Array2<f64>> {
    cfg.validate()?;
    if wave.len() < cfg.stft_len {
        return Err(Error::WaveTooShort {
            len: wave.len(),
            min: cfg.stft_len,
        });
    }
    let n = cfg.stft_len;
    let frames = (wave.len() - n) / cfg.hop + 1;
    let bins = cfg.bins();
    let window = cfg.window.coefficients(n);

    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    let mut buf = vec![Complex::new(0.0, 0.0); n];
    let mut scratch = vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()];

    let mut out = Array2::zeros((bins, frames));
    for f in 0..frames {
        let start = f * cfg.hop;
        for (i, slot) in buf.iter_mut().enumerate() {
            *slot = Complex::new(wave[start + i] * window[i], 0.0);
        }
        fft.process_with_scratch(&mut buf, &mut scratch);
        for (b, value) in buf.iter().take(bins).enumerate() {
            out[[b, f]] = value.norm();
        }
    }
    Ok(out)
}
