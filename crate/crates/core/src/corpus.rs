//! Corpus handling: plain-text manifests of WAV files with class tags,
//! 3-second segmentation of normal recordings, and a synthetic tone corpus
//! generator for end-to-end runs without external data.
//!
//! Manifest format, one entry per line:
//!
//! ```text
//! # comment
//! normal  relative/path/to/file.wav
//! else    relative/path/to/clip.wav
//! ```
//!
//! Paths are resolved against the manifest's directory.

use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::audio::{read_wav_mono, write_wav_mono};
use crate::{Error, Result};

/// Seconds per normal segment; trailing remainders shorter than this are
/// dropped.
pub const SEGMENT_SECS: f64 = 3.0;

/// WAV paths listed in a manifest, split by class tag.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusManifest {
    pub normal: Vec<PathBuf>,
    pub something_else: Vec<PathBuf>,
}

impl CorpusManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Corpus(format!("cannot read manifest {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        let mut manifest = CorpusManifest::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (tag, rest) = line.split_once(char::is_whitespace).ok_or_else(|| {
                Error::Corpus(format!(
                    "{}:{}: expected '<class> <path>'",
                    path.display(),
                    lineno + 1
                ))
            })?;
            let file = base.join(rest.trim());
            match tag {
                "normal" => manifest.normal.push(file),
                "else" => manifest.something_else.push(file),
                other => {
                    return Err(Error::Corpus(format!(
                        "{}:{}: unknown class tag '{other}' (expected 'normal' or 'else')",
                        path.display(),
                        lineno + 1
                    )))
                }
            }
        }
        Ok(manifest)
    }
}

/// Normal recordings cut into fixed-length segments.
#[derive(Debug, Clone)]
pub struct SegmentedCorpus {
    pub segments: Vec<Vec<f64>>,
    /// `(source file, segment index within file)` per segment.
    pub sources: Vec<(String, usize)>,
    pub segment_len: usize,
}

impl SegmentedCorpus {
    pub fn load(paths: &[PathBuf], sample_rate: u32) -> Result<Self> {
        let segment_len = (SEGMENT_SECS * sample_rate as f64) as usize;
        let mut segments = Vec::new();
        let mut sources = Vec::new();
        for path in paths {
            let wave = read_wav_mono(path, sample_rate)?;
            let name = path.display().to_string();
            for (i, chunk) in wave.chunks_exact(segment_len).enumerate() {
                segments.push(chunk.to_vec());
                sources.push((name.clone(), i));
            }
        }
        if segments.is_empty() {
            return Err(Error::Corpus(
                "no normal segments: every file shorter than the segment length".into(),
            ));
        }
        Ok(Self {
            segments,
            sources,
            segment_len,
        })
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }
}

/// Something-else clips kept whole.
#[derive(Debug, Clone)]
pub struct ClipCorpus {
    pub clips: Vec<Vec<f64>>,
    pub names: Vec<String>,
}

impl ClipCorpus {
    pub fn load(paths: &[PathBuf], sample_rate: u32) -> Result<Self> {
        let mut clips = Vec::new();
        let mut names = Vec::new();
        for path in paths {
            clips.push(read_wav_mono(path, sample_rate)?);
            names.push(path.display().to_string());
        }
        if clips.is_empty() {
            return Err(Error::Corpus("no something-else clips listed".into()));
        }
        Ok(Self { clips, names })
    }

    pub fn len(&self) -> usize {
        self.clips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clips.is_empty()
    }
}

/// Layout of the self-generated tone corpus.
///
/// Normal files are harmonic tone beds with slow amplitude modulation; a
/// configurable fraction carries a different harmonic stack, playing the role
/// of rare-but-normal operation. Something-else clips are broadband click
/// trains, spectrally far from any normal file.
#[derive(Debug, Clone, Copy)]
pub struct ToneCorpusSpec {
    pub normal_train: usize,
    pub normal_test: usize,
    pub else_train: usize,
    pub else_test: usize,
    /// Fraction of normal files using the rare-normal harmonic stack.
    pub rare_fraction: f64,
    pub file_secs: f64,
    pub sample_rate: u32,
}

impl Default for ToneCorpusSpec {
    fn default() -> Self {
        Self {
            normal_train: 24,
            normal_test: 8,
            else_train: 6,
            else_test: 4,
            rare_fraction: 0.2,
            file_secs: 3.0,
            sample_rate: 16_000,
        }
    }
}

/// Manifests written by [`generate_tone_corpus`].
#[derive(Debug, Clone)]
pub struct GeneratedCorpus {
    pub train_manifest: PathBuf,
    pub test_manifest: PathBuf,
}

const FREQUENT_HARMONICS: [f64; 3] = [220.0, 440.0, 660.0];
const RARE_HARMONICS: [f64; 3] = [950.0, 1425.0, 1900.0];

fn tone_bed(rng: &mut ChaCha8Rng, harmonics: &[f64], n: usize, rate: f64) -> Vec<f64> {
    let phases: Vec<f64> = harmonics
        .iter()
        .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
        .collect();
    let am_rate = rng.random_range(0.5..2.0);
    let am_phase = rng.random_range(0.0..std::f64::consts::TAU);
    (0..n)
        .map(|i| {
            let t = i as f64 / rate;
            let am = 0.8 + 0.2 * (std::f64::consts::TAU * am_rate * t + am_phase).sin();
            let mut v = 0.0;
            for (h, (&f, &p)) in harmonics.iter().zip(&phases).enumerate() {
                v += (std::f64::consts::TAU * f * t + p).sin() / (h + 1) as f64;
            }
            0.25 * am * v + 0.002 * (rng.random_range(-1.0..1.0))
        })
        .collect()
}

fn click_train(rng: &mut ChaCha8Rng, n: usize, rate: f64) -> Vec<f64> {
    let mut out = vec![0.0; n];
    let period = (rate / rng.random_range(6.0..10.0)) as usize;
    let burst = (rate * 0.006) as usize;
    let mut pos = rng.random_range(0..period.max(1));
    while pos + burst < n {
        for i in 0..burst {
            let decay = (-(i as f64) / (burst as f64 / 4.0)).exp();
            out[pos + i] = 0.6 * decay * rng.random_range(-1.0..1.0);
        }
        pos += period;
    }
    out
}

/// Writes the synthetic WAV corpus plus `train_manifest.txt` and
/// `test_manifest.txt` under `dir`. Deterministic given the seed.
pub fn generate_tone_corpus(
    dir: &Path,
    spec: &ToneCorpusSpec,
    seed: u64,
) -> Result<GeneratedCorpus> {
    if spec.normal_train == 0 || spec.else_train == 0 {
        return Err(Error::InvalidConfig(
            "tone corpus needs at least one normal and one else training file".into(),
        ));
    }
    let wav_dir = dir.join("wav");
    fs::create_dir_all(&wav_dir)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rate = spec.sample_rate as f64;
    let n = (spec.file_secs * rate) as usize;

    let mut train_lines = Vec::new();
    let mut test_lines = Vec::new();

    let write_normals =
        |count: usize, prefix: &str, lines: &mut Vec<String>, rng: &mut ChaCha8Rng| -> Result<()> {
            for i in 0..count {
                let rare = rng.random_range(0.0..1.0) < spec.rare_fraction;
                let harmonics: &[f64] = if rare {
                    &RARE_HARMONICS
                } else {
                    &FREQUENT_HARMONICS
                };
                let wave = tone_bed(rng, harmonics, n, rate);
                let name = format!("wav/{prefix}_{i:03}.wav");
                write_wav_mono(&dir.join(&name), &wave, spec.sample_rate)?;
                lines.push(format!("normal\t{name}"));
            }
            Ok(())
        };
    write_normals(spec.normal_train, "normal_train", &mut train_lines, &mut rng)?;
    write_normals(spec.normal_test, "normal_test", &mut test_lines, &mut rng)?;

    let write_else =
        |count: usize, prefix: &str, lines: &mut Vec<String>, rng: &mut ChaCha8Rng| -> Result<()> {
            for i in 0..count {
                let secs = rng.random_range(1.0..2.5);
                let wave = click_train(rng, (secs * rate) as usize, rate);
                let name = format!("wav/{prefix}_{i:03}.wav");
                write_wav_mono(&dir.join(&name), &wave, spec.sample_rate)?;
                lines.push(format!("else\t{name}"));
            }
            Ok(())
        };
    write_else(spec.else_train, "else_train", &mut train_lines, &mut rng)?;
    write_else(spec.else_test, "else_test", &mut test_lines, &mut rng)?;

    let train_manifest = dir.join("train_manifest.txt");
    let test_manifest = dir.join("test_manifest.txt");
    fs::write(&train_manifest, train_lines.join("\n") + "\n")?;
    fs::write(&test_manifest, test_lines.join("\n") + "\n")?;
    Ok(GeneratedCorpus {
        train_manifest,
        test_manifest,
    })
}
