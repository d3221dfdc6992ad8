//! 16-bit PCM mono WAV input/output. No resampling: files at other rates or
//! layouts are rejected with a clear error.

use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use crate::{Error, Result};

/// Reads a 16-bit PCM mono WAV at the expected sample rate into `[-1, 1)`
/// floats.
pub fn read_wav_mono(path: &Path, expected_rate: u32) -> Result<Vec<f64>> {
    let reader = WavReader::open(path)?;
    let spec = reader.spec();
    let reject = |reason: String| Error::WavFormat {
        path: path.to_path_buf(),
        reason,
    };
    if spec.channels != 1 {
        return Err(reject(format!("{} channels, need mono", spec.channels)));
    }
    if spec.sample_rate != expected_rate {
        return Err(reject(format!(
            "sample rate {} Hz, need {} Hz",
            spec.sample_rate, expected_rate
        )));
    }
    if spec.sample_format != SampleFormat::Int || spec.bits_per_sample != 16 {
        return Err(reject(format!(
            "{:?} {} bit, need 16-bit PCM",
            spec.sample_format, spec.bits_per_sample
        )));
    }
    let mut samples = Vec::with_capacity(reader.len() as usize);
    for sample in reader.into_samples::<i16>() {
        samples.push(sample? as f64 / 32768.0);
    }
    Ok(samples)
}

/// Writes floats in `[-1, 1]` as a 16-bit PCM mono WAV, clamping out-of-range
/// values.
pub fn write_wav_mono(path: &Path, samples: &[f64], sample_rate: u32) -> Result<()> {
    let spec = WavSpec {
        channels: 1,
        sample_rate,
        bits_per_sample: 16,
        sample_format: SampleFormat::Int,
    };
    let mut writer = WavWriter::create(path, spec)?;
    for &s in samples {
        let v = (s.clamp(-1.0, 1.0) * 32767.0).round() as i16;
        writer.write_sample(v)?;
    }
    writer.finalize()?;
    Ok(())
}
