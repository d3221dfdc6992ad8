//! Dense-layer autoencoder with exact handwritten gradients.
//!
//! The model is a stack of fully connected layers split into an encoder and a
//! decoder. Forward evaluation caches per-layer activations so that
//! [`AeModel::backward_batch`] can run the exact chain rule for any loss whose
//! gradient with respect to the reconstruction is known. Semantics are
//! defined sample-wise; the batched entry points evaluate all samples as one
//! matrix product.

mod io;

pub use io::{load_model, save_model};

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Element-wise activation applied after a layer's affine transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Sigmoid,
    Relu,
    Identity,
}

impl Activation {
    #[inline]
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
            Activation::Relu => {
                if z > 0.0 {
                    z
                } else {
                    0.0
                }
            }
            Activation::Identity => z,
        }
    }

    /// Derivative of the activation expressed through its output value `a`.
    ///
    /// Works for all three variants: sigmoid' = a(1-a), relu' = [a > 0],
    /// identity' = 1.
    #[inline]
    fn derivative_from_output(self, a: f64) -> f64 {
        match self {
            Activation::Sigmoid => a * (1.0 - a),
            Activation::Relu => {
                if a > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Identity => 1.0,
        }
    }
}

/// Shape and activation of one fully connected layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub in_dim: usize,
    pub out_dim: usize,
    pub activation: Activation,
}

impl LayerSpec {
    pub fn new(in_dim: usize, out_dim: usize, activation: Activation) -> Self {
        Self {
            in_dim,
            out_dim,
            activation,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.in_dim == 0 || self.out_dim == 0 {
            return Err(Error::InvalidConfig(format!(
                "layer dims must be >= 1, got {}x{}",
                self.in_dim, self.out_dim
            )));
        }
        Ok(())
    }
}

/// Encoder/decoder layer layout of an autoencoder.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AeSpec {
    pub encoder: Vec<LayerSpec>,
    pub decoder: Vec<LayerSpec>,
}

impl AeSpec {
    pub fn new(encoder: Vec<LayerSpec>, decoder: Vec<LayerSpec>) -> Result<Self> {
        let spec = Self { encoder, decoder };
        spec.validate()?;
        Ok(spec)
    }

    /// The 2 / 20, 10, 20 / 2 sigmoid autoencoder used by the 2-D
    /// verification experiment. Sigmoid follows every layer except the
    /// decoder output, which stays linear.
    pub fn verification() -> Self {
        use Activation::{Identity, Sigmoid};
        Self {
            encoder: vec![
                LayerSpec::new(2, 20, Sigmoid),
                LayerSpec::new(20, 10, Sigmoid),
            ],
            decoder: vec![
                LayerSpec::new(10, 20, Sigmoid),
                LayerSpec::new(20, 2, Identity),
            ],
        }
    }

    /// ReLU autoencoder for audio features: each half has one input layer,
    /// `hidden_layers` hidden layers of `hidden_units` units, and one output
    /// layer. ReLU follows every layer except the decoder output.
    pub fn audio(input_dim: usize, hidden_layers: usize, hidden_units: usize, latent_dim: usize) -> Self {
        use Activation::{Identity, Relu};
        let mut encoder = vec![LayerSpec::new(input_dim, hidden_units, Relu)];
        for _ in 0..hidden_layers {
            encoder.push(LayerSpec::new(hidden_units, hidden_units, Relu));
        }
        encoder.push(LayerSpec::new(hidden_units, latent_dim, Relu));

        let mut decoder = vec![LayerSpec::new(latent_dim, hidden_units, Relu)];
        for _ in 0..hidden_layers {
            decoder.push(LayerSpec::new(hidden_units, hidden_units, Relu));
        }
        decoder.push(LayerSpec::new(hidden_units, input_dim, Identity));

        Self { encoder, decoder }
    }

    pub fn input_dim(&self) -> usize {
        self.encoder.first().map_or(0, |l| l.in_dim)
    }

    pub fn latent_dim(&self) -> usize {
        self.encoder.last().map_or(0, |l| l.out_dim)
    }

    pub fn validate(&self) -> Result<()> {
        if self.encoder.is_empty() || self.decoder.is_empty() {
            return Err(Error::InvalidConfig(
                "encoder and decoder each need at least one layer".into(),
            ));
        }
        for layer in self.encoder.iter().chain(&self.decoder) {
            layer.validate()?;
        }
        let chain: Vec<&LayerSpec> = self.encoder.iter().chain(&self.decoder).collect();
        for (i, pair) in chain.windows(2).enumerate() {
            if pair[0].out_dim != pair[1].in_dim {
                return Err(Error::BrokenChain {
                    index: i + 1,
                    expected: pair[0].out_dim,
                    actual: pair[1].in_dim,
                });
            }
        }
        let d_in = self.encoder[0].in_dim;
        let d_out = self.decoder.last().unwrap().out_dim;
        if d_in != d_out {
            return Err(Error::DimMismatch {
                context: "reconstruction dim",
                expected: d_in,
                actual: d_out,
            });
        }
        Ok(())
    }
}

/// One dense layer: `a = activation(W x + b)` with `W` of shape
/// `(out_dim, in_dim)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub spec: LayerSpec,
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

impl Layer {
    fn forward(&self, input: &Array2<f64>) -> Array2<f64> {
        let mut z = input.dot(&self.weights.t()) + &self.bias;
        z.mapv_inplace(|v| self.spec.activation.apply(v));
        z
    }
}

/// Autoencoder parameters: encoder layers followed by decoder layers.
#[derive(Debug, Clone, PartialEq)]
pub struct AeModel {
    pub encoder: Vec<Layer>,
    pub decoder: Vec<Layer>,
}

/// Per-layer activations recorded during a forward pass.
///
/// `acts[0]` is the input batch and `acts[l]` the output of layer `l - 1`,
/// so the last entry is the reconstruction.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    acts: Vec<Array2<f64>>,
}

impl ForwardCache {
    pub fn reconstruction(&self) -> &Array2<f64> {
        self.acts.last().expect("cache holds at least the input")
    }
}

/// One gradient array per parameter array of the model, same shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientSet {
    pub layers: Vec<LayerGrad>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerGrad {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

impl GradientSet {
    pub fn zeros_like(model: &AeModel) -> Self {
        let layers = model
            .layers()
            .map(|l| LayerGrad {
                weights: Array2::zeros(l.weights.raw_dim()),
                bias: Array1::zeros(l.bias.raw_dim()),
            })
            .collect();
        Self { layers }
    }

    pub fn shape_congruent(&self, model: &AeModel) -> bool {
        self.layers.len() == model.num_layers()
            && self
                .layers
                .iter()
                .zip(model.layers())
                .all(|(g, l)| g.weights.dim() == l.weights.dim() && g.bias.dim() == l.bias.dim())
    }

    /// Entry-wise sum of two gradient sets over the same model.
    pub fn add_assign(&mut self, other: &GradientSet) -> Result<()> {
        if self.layers.len() != other.layers.len() {
            return Err(Error::ShapeIncongruent);
        }
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            if a.weights.dim() != b.weights.dim() || a.bias.dim() != b.bias.dim() {
                return Err(Error::ShapeIncongruent);
            }
            a.weights += &b.weights;
            a.bias += &b.bias;
        }
        Ok(())
    }
}

impl AeModel {
    /// Initializes weights by Glorot's method: each weight uniform on
    /// `[-sqrt(6/(fan_in+fan_out)), +sqrt(6/(fan_in+fan_out))]`, biases zero.
    /// Deterministic given the seed.
    pub fn glorot_init(spec: &AeSpec, seed: u64) -> Result<Self> {
        spec.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut build = |specs: &[LayerSpec]| -> Vec<Layer> {
            specs
                .iter()
                .map(|&spec| {
                    let limit = (6.0 / (spec.in_dim + spec.out_dim) as f64).sqrt();
                    let weights = Array2::from_shape_fn((spec.out_dim, spec.in_dim), |_| {
                        rng.random_range(-limit..=limit)
                    });
                    Layer {
                        spec,
                        weights,
                        bias: Array1::zeros(spec.out_dim),
                    }
                })
                .collect()
        };
        let encoder = build(&spec.encoder);
        let decoder = build(&spec.decoder);
        Ok(Self { encoder, decoder })
    }

    /// Builds a model from explicit parameter arrays, checking the chain.
    pub fn from_layers(encoder: Vec<Layer>, decoder: Vec<Layer>) -> Result<Self> {
        let spec = AeSpec {
            encoder: encoder.iter().map(|l| l.spec).collect(),
            decoder: decoder.iter().map(|l| l.spec).collect(),
        };
        spec.validate()?;
        for layer in encoder.iter().chain(&decoder) {
            if layer.weights.dim() != (layer.spec.out_dim, layer.spec.in_dim)
                || layer.bias.len() != layer.spec.out_dim
            {
                return Err(Error::ShapeIncongruent);
            }
        }
        Ok(Self { encoder, decoder })
    }

    pub fn spec(&self) -> AeSpec {
        AeSpec {
            encoder: self.encoder.iter().map(|l| l.spec).collect(),
            decoder: self.decoder.iter().map(|l| l.spec).collect(),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.encoder[0].spec.in_dim
    }

    pub fn latent_dim(&self) -> usize {
        self.encoder.last().unwrap().spec.out_dim
    }

    pub fn num_layers(&self) -> usize {
        self.encoder.len() + self.decoder.len()
    }

    pub fn layers(&self) -> impl Iterator<Item = &Layer> {
        self.encoder.iter().chain(self.decoder.iter())
    }

    pub fn layers_mut(&mut self) -> impl Iterator<Item = &mut Layer> {
        self.encoder.iter_mut().chain(self.decoder.iter_mut())
    }

    /// Reconstructs one sample, returning the cache needed by `backward`.
    pub fn forward(&self, x: ArrayView1<f64>) -> Result<(Array1<f64>, ForwardCache)> {
        let batch = x.insert_axis(Axis(0));
        let (recon, cache) = self.forward_batch(batch)?;
        Ok((recon.row(0).to_owned(), cache))
    }

    /// Reconstructs a batch given as rows of `x`.
    pub fn forward_batch(&self, x: ArrayView2<f64>) -> Result<(Array2<f64>, ForwardCache)> {
        if x.ncols() != self.input_dim() {
            return Err(Error::DimMismatch {
                context: "forward input",
                expected: self.input_dim(),
                actual: x.ncols(),
            });
        }
        let mut acts = Vec::with_capacity(self.num_layers() + 1);
        acts.push(x.to_owned());
        for layer in self.layers() {
            let next = layer.forward(acts.last().unwrap());
            acts.push(next);
        }
        let recon = acts.last().unwrap().clone();
        Ok((recon, ForwardCache { acts }))
    }

    /// Backpropagates `upstream = dLoss/dReconstruction` (one row per sample
    /// of the cached forward pass) into gradients for every parameter.
    pub fn backward(&self, cache: &ForwardCache, upstream: ArrayView1<f64>) -> Result<GradientSet> {
        self.backward_batch(cache, upstream.insert_axis(Axis(0)))
    }

    pub fn backward_batch(
        &self,
        cache: &ForwardCache,
        upstream: ArrayView2<f64>,
    ) -> Result<GradientSet> {
        let n_layers = self.num_layers();
        if cache.acts.len() != n_layers + 1 {
            return Err(Error::ShapeIncongruent);
        }
        let out = cache.acts.last().unwrap();
        if upstream.dim() != out.dim() {
            return Err(Error::DimMismatch {
                context: "backward upstream",
                expected: out.len(),
                actual: upstream.len(),
            });
        }
        for (act, layer) in cache.acts[1..].iter().zip(self.layers()) {
            if act.ncols() != layer.spec.out_dim {
                return Err(Error::ShapeIncongruent);
            }
        }

        let layers: Vec<&Layer> = self.layers().collect();
        let mut grads: Vec<LayerGrad> = Vec::with_capacity(n_layers);
        // delta = dLoss/d(output of current layer)
        let mut delta = upstream.to_owned();
        for l in (0..n_layers).rev() {
            let layer = layers[l];
            let act = &cache.acts[l + 1];
            // dLoss/d(pre-activation), via the activation derivative.
            let mut dz = delta;
            dz.zip_mut_with(act, |d, &a| {
                *d *= layer.spec.activation.derivative_from_output(a)
            });
            let d_weights = dz.t().dot(&cache.acts[l]);
            let d_bias = dz.sum_axis(Axis(0));
            delta = dz.dot(&layer.weights);
            grads.push(LayerGrad {
                weights: d_weights,
                bias: d_bias,
            });
        }
        grads.reverse();
        Ok(GradientSet { layers: grads })
    }

    /// Reconstruction without the cache, for scoring paths.
    pub fn reconstruct_batch(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        Ok(self.forward_batch(x)?.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use proptest::prelude::*;

    fn identity_layer(dim: usize) -> Layer {
        Layer {
            spec: LayerSpec::new(dim, dim, Activation::Identity),
            weights: Array2::eye(dim),
            bias: Array1::zeros(dim),
        }
    }

    /// Model computing the identity map through one encoder and one decoder
    /// layer.
    fn identity_model(dim: usize) -> AeModel {
        AeModel::from_layers(vec![identity_layer(dim)], vec![identity_layer(dim)]).unwrap()
    }

    fn random_model(spec: &AeSpec, seed: u64) -> AeModel {
        AeModel::glorot_init(spec, seed).unwrap()
    }

    #[test]
    fn glorot_weights_within_bound() {
        let model = random_model(&AeSpec::verification(), 7);
        let limit0 = (6.0f64 / 22.0).sqrt();
        for &w in model.encoder[0].weights.iter() {
            assert!(w.abs() <= limit0, "weight {w} outside [-{limit0}, {limit0}]");
        }
        let limit1 = (6.0f64 / 30.0).sqrt();
        for &w in model.encoder[1].weights.iter() {
            assert!(w.abs() <= limit1);
        }
    }

    #[test]
    fn glorot_biases_zero() {
        let model = random_model(&AeSpec::verification(), 3);
        for layer in model.layers() {
            assert!(layer.bias.iter().all(|&b| b == 0.0));
        }
    }

    #[test]
    fn glorot_deterministic() {
        let a = random_model(&AeSpec::verification(), 42);
        let b = random_model(&AeSpec::verification(), 42);
        assert_eq!(a, b);
        let c = random_model(&AeSpec::verification(), 43);
        assert_ne!(a, c);
    }

    #[test]
    fn spec_rejects_broken_chain() {
        let bad = AeSpec {
            encoder: vec![LayerSpec::new(2, 20, Activation::Sigmoid)],
            decoder: vec![LayerSpec::new(10, 2, Activation::Identity)],
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn forward_identity_model() {
        let model = identity_model(2);
        let (recon, _) = model.forward(array![1.0, 2.0].view()).unwrap();
        assert_eq!(recon, array![1.0, 2.0]);
    }

    #[test]
    fn forward_constant_network_ignores_input() {
        // All-zero weights with sigmoid hidden activations and an identity
        // output reconstruct the same constant for every input.
        let mut model = AeModel::glorot_init(&AeSpec::verification(), 0).unwrap();
        for layer in model.layers_mut() {
            layer.weights.fill(0.0);
        }
        let (a, _) = model.forward(array![1.0, 2.0].view()).unwrap();
        let (b, _) = model.forward(array![-3.0, 0.5].view()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn forward_rejects_wrong_dim() {
        let model = identity_model(2);
        assert!(model.forward(array![1.0, 2.0, 3.0].view()).is_err());
        let batch = Array2::zeros((4, 3));
        assert!(model.forward_batch(batch.view()).is_err());
    }

    #[test]
    fn batched_forward_matches_per_sample() {
        let model = random_model(&AeSpec::verification(), 11);
        let batch = array![[0.3, -1.2], [2.0, 0.0], [-0.5, 0.7]];
        let (recon, _) = model.forward_batch(batch.view()).unwrap();
        for (i, row) in batch.rows().into_iter().enumerate() {
            let (single, _) = model.forward(row).unwrap();
            for (a, b) in recon.row(i).iter().zip(single.iter()) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn backward_zero_upstream_gives_zero_grads() {
        let model = random_model(&AeSpec::verification(), 5);
        let (_, cache) = model.forward(array![0.4, -0.9].view()).unwrap();
        let grads = model
            .backward(&cache, array![0.0, 0.0].view())
            .unwrap();
        for g in &grads.layers {
            assert!(g.weights.iter().all(|&v| v == 0.0));
            assert!(g.bias.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn backward_rejects_mismatched_upstream() {
        let model = identity_model(2);
        let (_, cache) = model.forward(array![1.0, 0.0].view()).unwrap();
        assert!(model.backward(&cache, array![1.0, 0.0, 0.0].view()).is_err());
    }

    #[test]
    fn backward_rejects_foreign_cache() {
        let model2 = identity_model(2);
        let model3 = identity_model(3);
        let (_, cache3) = model3.forward(array![1.0, 0.0, 2.0].view()).unwrap();
        assert!(model2
            .backward(&cache3, array![1.0, 0.0, 2.0].view())
            .is_err());
    }

    /// Squared-error reconstruction loss used by the finite-difference
    /// oracle below.
    fn recon_loss(model: &AeModel, x: ArrayView1<f64>) -> f64 {
        let (recon, _) = model.forward(x).unwrap();
        (&recon - &x).mapv(|d| d * d).sum()
    }

    fn analytic_recon_grads(model: &AeModel, x: ArrayView1<f64>) -> GradientSet {
        let (recon, cache) = model.forward(x).unwrap();
        let upstream = (&recon - &x).mapv(|d| 2.0 * d);
        model.backward(&cache, upstream.view()).unwrap()
    }

    /// Central finite difference of the reconstruction loss with respect to
    /// one parameter. Independent of the backward pass.
    fn fd_grad(
        model: &AeModel,
        x: ArrayView1<f64>,
        layer: usize,
        param: impl Fn(&mut Layer) -> &mut f64,
        step: f64,
    ) -> f64 {
        let mut plus = model.clone();
        *param(plus.layers_mut().nth(layer).unwrap()) += step;
        let mut minus = model.clone();
        *param(minus.layers_mut().nth(layer).unwrap()) -= step;
        (recon_loss(&plus, x) - recon_loss(&minus, x)) / (2.0 * step)
    }

    fn assert_rel_close(analytic: f64, numeric: f64) {
        let denom = analytic.abs().max(numeric.abs()).max(1e-8);
        let rel = (analytic - numeric).abs() / denom;
        assert!(
            rel <= 1e-4,
            "gradient mismatch: analytic={analytic:.10e} numeric={numeric:.10e} rel={rel:.3e}"
        );
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut checked_pairs = 0;
        while checked_pairs < 100 {
            let d = rng.random_range(1..=8usize);
            let h = rng.random_range(1..=6usize);
            let z = rng.random_range(1..=4usize);
            let spec = AeSpec::new(
                vec![
                    LayerSpec::new(d, h, Activation::Sigmoid),
                    LayerSpec::new(h, z, Activation::Sigmoid),
                ],
                vec![
                    LayerSpec::new(z, h, Activation::Sigmoid),
                    LayerSpec::new(h, d, Activation::Identity),
                ],
            )
            .unwrap();
            let model = random_model(&spec, rng.random());
            let x = Array1::from_shape_fn(d, |_| rng.random_range(-2.0..2.0));
            let grads = analytic_recon_grads(&model, x.view());

            for (l, layer) in model.layers().enumerate() {
                for i in 0..layer.spec.out_dim {
                    for j in 0..layer.spec.in_dim {
                        let numeric =
                            fd_grad(&model, x.view(), l, |lay| &mut lay.weights[[i, j]], 1e-5);
                        assert_rel_close(grads.layers[l].weights[[i, j]], numeric);
                    }
                    let numeric = fd_grad(&model, x.view(), l, |lay| &mut lay.bias[i], 1e-5);
                    assert_rel_close(grads.layers[l].bias[i], numeric);
                }
            }
            checked_pairs += 1;
        }
    }

    #[test]
    fn relu_gradients_match_finite_differences_away_from_kinks() {
        let mut rng = ChaCha8Rng::seed_from_u64(4242);
        let spec = AeSpec::audio(4, 1, 5, 2);
        let mut checked = 0;
        'outer: while checked < 30 {
            let model = random_model(&spec, rng.random());
            let x = Array1::from_shape_fn(4, |_| rng.random_range(-1.5..1.5));
            // Skip draws with a pre-activation near zero anywhere; the
            // finite-difference stencil straddles the kink there.
            let (_, cache) = model.forward(x.view()).unwrap();
            for (act, layer) in cache.acts[1..].iter().zip(model.layers()) {
                if layer.spec.activation == Activation::Relu
                    && act.iter().any(|&a| a.abs() < 1e-3)
                {
                    continue 'outer;
                }
            }
            let grads = analytic_recon_grads(&model, x.view());
            for (l, layer) in model.layers().enumerate() {
                for i in 0..layer.spec.out_dim {
                    let numeric = fd_grad(&model, x.view(), l, |lay| &mut lay.bias[i], 1e-6);
                    assert_rel_close(grads.layers[l].bias[i], numeric);
                }
            }
            checked += 1;
        }
    }

    #[test]
    fn linear_single_layer_closed_form_gradient() {
        // For recon = Wx + b and loss ||recon - x||^2 the weight gradient is
        // 2(Wx + b - x) x^T and the bias gradient 2(Wx + b - x).
        let w = array![[1.3, -0.2], [0.5, 0.8]];
        let b = array![0.1, -0.4];
        let model = AeModel::from_layers(
            vec![Layer {
                spec: LayerSpec::new(2, 2, Activation::Identity),
                weights: w.clone(),
                bias: b.clone(),
            }],
            vec![identity_layer(2)],
        )
        .unwrap();
        let x = array![0.7, -1.1];
        let grads = analytic_recon_grads(&model, x.view());
        let resid = (w.dot(&x) + &b - &x).mapv(|v| 2.0 * v);
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(
                    grads.layers[0].weights[[i, j]],
                    resid[i] * x[j],
                    epsilon = 1e-12
                );
            }
            assert_abs_diff_eq!(grads.layers[0].bias[i], resid[i], epsilon = 1e-12);
        }
    }

    proptest! {
        #[test]
        fn forward_is_finite_for_bounded_inputs(
            seed in 0u64..1000,
            x0 in -10.0f64..10.0,
            x1 in -10.0f64..10.0,
        ) {
            let model = random_model(&AeSpec::verification(), seed);
            let (recon, _) = model.forward(array![x0, x1].view()).unwrap();
            prop_assert!(recon.iter().all(|v| v.is_finite()));
        }

        #[test]
        fn same_seed_same_forward(seed in 0u64..500, x0 in -3.0f64..3.0, x1 in -3.0f64..3.0) {
            let a = random_model(&AeSpec::verification(), seed);
            let b = random_model(&AeSpec::verification(), seed);
            let (ra, _) = a.forward(array![x0, x1].view()).unwrap();
            let (rb, _) = b.forward(array![x0, x1].view()).unwrap();
            prop_assert_eq!(ra, rb);
        }
    }
}
