//! Per-mini-batch Gaussian kernel density estimate and the inverse-density
//! weights used by batch uniformization.
//!
//! The density of a sample within its mini-batch is
//!
//! ```text
//! K(x_i) = (1/M) sum_j exp(-sigma * ||x_i - x_j||^2)
//! ```
//!
//! including the j = i self-term, so `1/M <= K(x_i) <= 1`. The weight of a
//! sample is `w_i = 1 / (K(x_i) + eps)`: rare samples in the batch get large
//! weights. Weights depend only on the inputs, never on model parameters, so
//! no gradient flows through them.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Bandwidth, weight floor and normalization switch for the per-batch KDE.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KdeConfig {
    /// Band-width `sigma` multiplying the squared distance inside the kernel
    /// exponent. The experiments use `2D` (2-D verification) and `1/(2D)`
    /// (audio features).
    pub band_width: f64,
    /// Small positive floor added to the density before inversion.
    pub weight_floor: f64,
    /// Normalize the batch to zero mean and unit variance per dimension
    /// before computing densities. Off for the 2-D verification experiment,
    /// on for audio features.
    pub normalize_batch: bool,
}

impl KdeConfig {
    pub fn new(band_width: f64) -> Self {
        Self {
            band_width,
            weight_floor: 1e-6,
            normalize_batch: false,
        }
    }

    pub fn with_weight_floor(mut self, eps: f64) -> Self {
        self.weight_floor = eps;
        self
    }

    pub fn with_normalization(mut self, on: bool) -> Self {
        self.normalize_batch = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.band_width <= 0.0 {
            return Err(Error::InvalidConfig("KDE band_width must be > 0".into()));
        }
        if self.weight_floor <= 0.0 {
            return Err(Error::InvalidConfig("KDE weight_floor must be > 0".into()));
        }
        Ok(())
    }
}

impl Default for KdeConfig {
    fn default() -> Self {
        Self::new(1.0)
    }
}

/// Inverse-density weights for one mini-batch, along with the densities they
/// came from.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    pub weights: Vec<f64>,
    pub densities: Vec<f64>,
}

impl WeightVector {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Centers and scales each dimension of the batch to sample mean 0 and
/// variance 1 (population convention). Zero-variance dimensions are centered
/// and passed through with the scale treated as 1.
///
/// Returns the normalized batch together with the per-dimension mean and
/// standard deviation that were removed.
pub fn batch_normalize(batch: ArrayView2<f64>) -> Result<(Array2<f64>, Array1<f64>, Array1<f64>)> {
    let m = batch.nrows();
    if m < 2 {
        return Err(Error::BatchTooSmall {
            context: "batch_normalize",
            min: 2,
            got: m,
        });
    }
    let mean = batch.mean_axis(Axis(0)).unwrap();
    let mut var = Array1::<f64>::zeros(batch.ncols());
    for row in batch.rows() {
        for (v, (&x, &mu)) in var.iter_mut().zip(row.iter().zip(mean.iter())) {
            let d = x - mu;
            *v += d * d;
        }
    }
    var.mapv_inplace(|v| v / m as f64);
    let std = var.mapv(|v| {
        let s = v.sqrt();
        if s > 0.0 {
            s
        } else {
            1.0
        }
    });
    let mut normalized = batch.to_owned();
    for mut row in normalized.rows_mut() {
        for (x, (&mu, &s)) in row.iter_mut().zip(mean.iter().zip(std.iter())) {
            *x = (*x - mu) / s;
        }
    }
    Ok((normalized, mean, std))
}

/// Gaussian-kernel density of each sample within the batch, self-term
/// included.
pub fn kde_density(batch: ArrayView2<f64>, band_width: f64) -> Result<Vec<f64>> {
    if batch.nrows() == 0 {
        return Err(Error::EmptyBatch("kde_density"));
    }
    if band_width <= 0.0 {
        return Err(Error::InvalidConfig("KDE band_width must be > 0".into()));
    }
    let m = batch.nrows();
    let mut densities = vec![0.0; m];
    // Symmetric kernel: accumulate each pair once, self-term contributes 1.
    for i in 0..m {
        densities[i] += 1.0;
        let xi = batch.row(i);
        for j in i + 1..m {
            let mut dist_sq = 0.0;
            for (&a, &b) in xi.iter().zip(batch.row(j).iter()) {
                let d = a - b;
                dist_sq += d * d;
            }
            let k = (-band_width * dist_sq).exp();
            densities[i] += k;
            densities[j] += k;
        }
    }
    let inv_m = 1.0 / m as f64;
    for d in &mut densities {
        *d *= inv_m;
    }
    Ok(densities)
}

/// Inverse-density weights `w_i = 1 / (K(x_i) + eps)` for one mini-batch,
/// normalizing the batch first when the config says so.
pub fn kde_weights(batch: ArrayView2<f64>, cfg: &KdeConfig) -> Result<WeightVector> {
    cfg.validate()?;
    let densities = if cfg.normalize_batch {
        let (normalized, _, _) = batch_normalize(batch)?;
        kde_density(normalized.view(), cfg.band_width)?
    } else {
        kde_density(batch, cfg.band_width)?
    };
    let weights = densities
        .iter()
        .map(|&k| 1.0 / (k + cfg.weight_floor))
        .collect();
    Ok(WeightVector { weights, densities })
}
