//! Flat binary model format so `train` and `score` interoperate.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic   4 bytes  "BUAE"
//! version u32      currently 1
//! n_enc   u32      encoder layer count
//! n_dec   u32      decoder layer count
//! specs   per layer, encoder then decoder:
//!         in_dim u32, out_dim u32, activation u8 (0 sigmoid, 1 relu, 2 identity)
//! params  per layer, same order:
//!         weights f64 x (out_dim * in_dim), row-major,
//!         bias    f64 x out_dim
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::{Array1, Array2};

use super::{Activation, AeModel, Layer, LayerSpec};
use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"BUAE";
const VERSION: u32 = 1;

fn activation_tag(a: Activation) -> u8 {
    match a {
        Activation::Sigmoid => 0,
        Activation::Relu => 1,
        Activation::Identity => 2,
    }
}

fn activation_from_tag(tag: u8) -> Result<Activation> {
    match tag {
        0 => Ok(Activation::Sigmoid),
        1 => Ok(Activation::Relu),
        2 => Ok(Activation::Identity),
        other => Err(Error::ModelFormat(format!("unknown activation tag {other}"))),
    }
}

pub fn model_to_bytes(model: &AeModel) -> Vec<u8> {
    let mut buf = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(model.encoder.len() as u32).to_le_bytes());
    buf.extend_from_slice(&(model.decoder.len() as u32).to_le_bytes());
    for layer in model.layers() {
        buf.extend_from_slice(&(layer.spec.in_dim as u32).to_le_bytes());
        buf.extend_from_slice(&(layer.spec.out_dim as u32).to_le_bytes());
        buf.push(activation_tag(layer.spec.activation));
    }
    for layer in model.layers() {
        for &w in layer.weights.iter() {
            buf.extend_from_slice(&w.to_le_bytes());
        }
        for &b in layer.bias.iter() {
            buf.extend_from_slice(&b.to_le_bytes());
        }
    }
    buf
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.data.len() {
            return Err(Error::ModelFormat("unexpected end of model file".into()));
        }
        let slice = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn model_from_bytes(data: &[u8]) -> Result<AeModel> {
    let mut cur = Cursor { data, pos: 0 };
    if cur.take(4)? != MAGIC {
        return Err(Error::ModelFormat("bad magic, not a model file".into()));
    }
    let version = cur.u32()?;
    if version != VERSION {
        return Err(Error::ModelFormat(format!(
            "unsupported model version {version} (expected {VERSION})"
        )));
    }
    let n_enc = cur.u32()? as usize;
    let n_dec = cur.u32()? as usize;
    if n_enc == 0 || n_dec == 0 {
        return Err(Error::ModelFormat("empty encoder or decoder".into()));
    }
    let mut specs = Vec::with_capacity(n_enc + n_dec);
    for _ in 0..n_enc + n_dec {
        let in_dim = cur.u32()? as usize;
        let out_dim = cur.u32()? as usize;
        let activation = activation_from_tag(cur.u8()?)?;
        specs.push(LayerSpec {
            in_dim,
            out_dim,
            activation,
        });
    }
    let mut layers = Vec::with_capacity(specs.len());
    for spec in &specs {
        let mut weights = Array2::zeros((spec.out_dim, spec.in_dim));
        for w in weights.iter_mut() {
            *w = cur.f64()?;
        }
        let mut bias = Array1::zeros(spec.out_dim);
        for b in bias.iter_mut() {
            *b = cur.f64()?;
        }
        layers.push(Layer {
            spec: *spec,
            weights,
            bias,
        });
    }
    if cur.pos != data.len() {
        return Err(Error::ModelFormat("trailing bytes after model data".into()));
    }
    let decoder = layers.split_off(n_enc);
    AeModel::from_layers(layers, decoder)
}

pub fn save_model(model: &AeModel, path: &Path) -> Result<()> {
    let mut file = BufWriter::new(File::create(path)?);
    file.write_all(&model_to_bytes(model))?;
    file.flush()?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<AeModel> {
    let mut data = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut data)?;
    model_from_bytes(&data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::AeSpec;

    #[test]
    fn roundtrip_is_bit_identical() {
        let model = AeModel::glorot_init(&AeSpec::verification(), 17).unwrap();
        let restored = model_from_bytes(&model_to_bytes(&model)).unwrap();
        assert_eq!(model, restored);
    }

    #[test]
    fn roundtrip_through_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.bin");
        let model = AeModel::glorot_init(&AeSpec::audio(6, 1, 4, 2), 3).unwrap();
        save_model(&model, &path).unwrap();
        assert_eq!(load_model(&path).unwrap(), model);
    }

    #[test]
    fn rejects_bad_magic_and_truncation() {
        let model = AeModel::glorot_init(&AeSpec::verification(), 1).unwrap();
        let mut bytes = model_to_bytes(&model);
        assert!(model_from_bytes(&bytes[..bytes.len() - 3]).is_err());
        bytes[0] = b'X';
        assert!(model_from_bytes(&bytes).is_err());
    }

    #[test]
    fn rejects_unknown_version() {
        let model = AeModel::glorot_init(&AeSpec::verification(), 1).unwrap();
        let mut bytes = model_to_bytes(&model);
        bytes[4] = 99;
        assert!(model_from_bytes(&bytes).is_err());
    }
}
