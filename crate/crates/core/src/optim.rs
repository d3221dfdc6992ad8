//! AMSGrad optimizer and the two learning-rate schedules used by the
//! experiments.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::nn::{AeModel, GradientSet};
use crate::{Error, Result};

/// Learning rate as a function of the epoch index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LrSchedule {
    Constant { rate: f64 },
    /// Holds `base_rate` for `hold_epochs` epochs, then decreases linearly
    /// until `end_epoch`, where the rate reaches `base_rate / final_divisor`
    /// and stays there.
    WarmThenLinear {
        base_rate: f64,
        hold_epochs: u32,
        end_epoch: u32,
        final_divisor: f64,
    },
}

impl LrSchedule {
    pub fn validate(&self) -> Result<()> {
        match *self {
            LrSchedule::Constant { rate } => {
                if rate <= 0.0 {
                    return Err(Error::InvalidConfig("learning rate must be > 0".into()));
                }
            }
            LrSchedule::WarmThenLinear {
                base_rate,
                hold_epochs,
                end_epoch,
                final_divisor,
            } => {
                if base_rate <= 0.0 || final_divisor <= 0.0 {
                    return Err(Error::InvalidConfig(
                        "learning rate and divisor must be > 0".into(),
                    ));
                }
                if hold_epochs >= end_epoch {
                    return Err(Error::InvalidConfig(
                        "hold_epochs must be < end_epoch".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn lr_at(&self, epoch: u32) -> f64 {
        match *self {
            LrSchedule::Constant { rate } => rate,
            LrSchedule::WarmThenLinear {
                base_rate,
                hold_epochs,
                end_epoch,
                final_divisor,
            } => {
                let floor = base_rate / final_divisor;
                if epoch < hold_epochs {
                    base_rate
                } else if epoch >= end_epoch {
                    floor
                } else {
                    let frac = (epoch - hold_epochs) as f64 / (end_epoch - hold_epochs) as f64;
                    base_rate + frac * (floor - base_rate)
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
struct Moments {
    m_weights: Array2<f64>,
    v_weights: Array2<f64>,
    vhat_weights: Array2<f64>,
    m_bias: Array1<f64>,
    v_bias: Array1<f64>,
    vhat_bias: Array1<f64>,
}

/// AMSGrad state: exponential moving averages of the gradient and its
/// square, plus the running entry-wise maximum of the second moment.
///
/// The update is
///
/// ```text
/// m    <- b1 m + (1 - b1) g
/// v    <- b2 v + (1 - b2) g^2
/// vhat <- max(vhat, v)
/// p    <- p - lr * (m / (1 - b1^t)) / (sqrt(vhat) + delta)
/// ```
///
/// Bias correction is applied to the first moment only; `vhat` stays
/// uncorrected, matching the original formulation.
#[derive(Debug, Clone)]
pub struct AmsGrad {
    pub beta1: f64,
    pub beta2: f64,
    pub delta: f64,
    pub base_rate: f64,
    step_count: u64,
    moments: Vec<Moments>,
}

impl AmsGrad {
    pub fn new(base_rate: f64) -> Self {
        Self {
            beta1: 0.9,
            beta2: 0.999,
            delta: 1e-8,
            base_rate,
            step_count: 0,
            moments: Vec::new(),
        }
    }

    pub fn with_betas(mut self, beta1: f64, beta2: f64) -> Self {
        self.beta1 = beta1;
        self.beta2 = beta2;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    fn init_moments(&mut self, model: &AeModel) {
        self.moments = model
            .layers()
            .map(|l| Moments {
                m_weights: Array2::zeros(l.weights.raw_dim()),
                v_weights: Array2::zeros(l.weights.raw_dim()),
                vhat_weights: Array2::zeros(l.weights.raw_dim()),
                m_bias: Array1::zeros(l.bias.raw_dim()),
                v_bias: Array1::zeros(l.bias.raw_dim()),
                vhat_bias: Array1::zeros(l.bias.raw_dim()),
            })
            .collect();
    }

    /// One update at the optimizer's base step-size.
    pub fn step(&mut self, model: &mut AeModel, grads: &GradientSet) -> Result<()> {
        self.step_with_lr(model, grads, self.base_rate)
    }

    /// One update at an explicit step-size, for scheduled training.
    pub fn step_with_lr(&mut self, model: &mut AeModel, grads: &GradientSet, lr: f64) -> Result<()> {
        if !grads.shape_congruent(model) {
            return Err(Error::ShapeIncongruent);
        }
        if self.moments.is_empty() {
            self.init_moments(model);
        }
        if self.moments.len() != grads.layers.len()
            || self
                .moments
                .iter()
                .zip(&grads.layers)
                .any(|(m, g)| m.m_weights.dim() != g.weights.dim() || m.m_bias.dim() != g.bias.dim())
        {
            return Err(Error::ShapeIncongruent);
        }

        self.step_count += 1;
        let bias_corr = 1.0 - self.beta1.powi(self.step_count as i32);
        let (b1, b2, delta) = (self.beta1, self.beta2, self.delta);

        for ((layer, grad), mom) in model
            .layers_mut()
            .zip(&grads.layers)
            .zip(self.moments.iter_mut())
        {
            update_array(
                layer.weights.as_slice_mut().unwrap(),
                grad.weights.as_slice().unwrap(),
                mom.m_weights.as_slice_mut().unwrap(),
                mom.v_weights.as_slice_mut().unwrap(),
                mom.vhat_weights.as_slice_mut().unwrap(),
                b1,
                b2,
                delta,
                lr,
                bias_corr,
            );
            update_array(
                layer.bias.as_slice_mut().unwrap(),
                grad.bias.as_slice().unwrap(),
                mom.m_bias.as_slice_mut().unwrap(),
                mom.v_bias.as_slice_mut().unwrap(),
                mom.vhat_bias.as_slice_mut().unwrap(),
                b1,
                b2,
                delta,
                lr,
                bias_corr,
            );
        }
        Ok(())
    }

    /// Entry-wise copy of the running second-moment maxima, in layer order
    /// (weights then bias per layer). Used by invariant tests.
    pub fn vhat_snapshot(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for m in &self.moments {
            out.extend(m.vhat_weights.iter().copied());
            out.extend(m.vhat_bias.iter().copied());
        }
        out
    }
}

#[allow(clippy::too_many_arguments)]
fn update_array(
    params: &mut [f64],
    grads: &[f64],
    m: &mut [f64],
    v: &mut [f64],
    vhat: &mut [f64],
    b1: f64,
    b2: f64,
    delta: f64,
    lr: f64,
    bias_corr: f64,
) {
    for i in 0..params.len() {
        let g = grads[i];
        m[i] = b1 * m[i] + (1.0 - b1) * g;
        v[i] = b2 * v[i] + (1.0 - b2) * g * g;
        if v[i] > vhat[i] {
            vhat[i] = v[i];
        }
        let m_hat = m[i] / bias_corr;
        params[i] -= lr * m_hat / (vhat[i].sqrt() + delta);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{Activation, AeModel, AeSpec, GradientSet, Layer, LayerSpec};
    use approx::assert_abs_diff_eq;
    use ndarray::{array, Array1, Array2};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Model with a single trainable scalar: one 1x1 encoder weight. The
    /// decoder is pinned to identity by giving it zero gradients.
    fn scalar_model(w0: f64) -> AeModel {
        AeModel::from_layers(
            vec![Layer {
                spec: LayerSpec::new(1, 1, Activation::Identity),
                weights: array![[w0]],
                bias: Array1::zeros(1),
            }],
            vec![Layer {
                spec: LayerSpec::new(1, 1, Activation::Identity),
                weights: Array2::eye(1),
                bias: Array1::zeros(1),
            }],
        )
        .unwrap()
    }

    fn scalar_grads(model: &AeModel, g: f64) -> GradientSet {
        let mut grads = GradientSet::zeros_like(model);
        grads.layers[0].weights[[0, 0]] = g;
        grads
    }

    /// Reference scalar AMSGrad, written independently of the production
    /// code path.
    struct ScalarRef {
        m: f64,
        v: f64,
        vhat: f64,
        t: u32,
    }

    impl ScalarRef {
        fn new() -> Self {
            Self {
                m: 0.0,
                v: 0.0,
                vhat: 0.0,
                t: 0,
            }
        }

        fn step(&mut self, w: f64, g: f64, lr: f64) -> f64 {
            self.t += 1;
            self.m = 0.9 * self.m + 0.1 * g;
            self.v = 0.999 * self.v + 0.001 * g * g;
            self.vhat = self.vhat.max(self.v);
            let m_hat = self.m / (1.0 - 0.9f64.powi(self.t as i32));
            w - lr * m_hat / (self.vhat.sqrt() + 1e-8)
        }
    }

    #[test]
    fn zero_gradients_leave_params_unchanged() {
        let mut model = AeModel::glorot_init(&AeSpec::verification(), 1).unwrap();
        let before = model.clone();
        let grads = GradientSet::zeros_like(&model);
        let mut opt = AmsGrad::new(1e-3);
        opt.step(&mut model, &grads).unwrap();
        assert_eq!(model, before);
    }

    #[test]
    fn quadratic_converges_and_matches_reference() {
        let mut model = scalar_model(1.0);
        let mut opt = AmsGrad::new(1e-3);
        let mut reference = ScalarRef::new();
        let mut w_ref = 1.0;
        for _ in 0..5000 {
            let w = model.encoder[0].weights[[0, 0]];
            let grads = scalar_grads(&model, 2.0 * w);
            opt.step(&mut model, &grads).unwrap();
            w_ref = reference.step(w_ref, 2.0 * w_ref, 1e-3);
            assert_abs_diff_eq!(model.encoder[0].weights[[0, 0]], w_ref, epsilon = 1e-12);
        }
        assert!(
            model.encoder[0].weights[[0, 0]].abs() < 1e-2,
            "w = {} after 5000 steps",
            model.encoder[0].weights[[0, 0]]
        );
    }

    #[test]
    fn vhat_keeps_running_maximum() {
        let mut model = scalar_model(0.0);
        let mut opt = AmsGrad::new(1e-3);
        let g2 = scalar_grads(&model, 2.0);
        opt.step(&mut model, &g2).unwrap();
        let vhat_after_big = opt.vhat_snapshot()[0];
        let g1 = scalar_grads(&model, 1.0);
        opt.step(&mut model, &g1).unwrap();
        let vhat_after_small = opt.vhat_snapshot()[0];
        assert!(vhat_after_small >= vhat_after_big);
        assert_abs_diff_eq!(vhat_after_big, 0.001 * 4.0, epsilon = 1e-15);
    }

    #[test]
    fn degenerate_betas_reduce_to_sign_scaled_descent() {
        let mut model = scalar_model(0.5);
        let mut opt = AmsGrad::new(1e-3).with_betas(0.0, 0.0).with_delta(1e-12);
        let grads = scalar_grads(&model, -3.7);
        opt.step(&mut model, &grads).unwrap();
        // With b1 = b2 = 0: m = g, vhat = g^2, update = -lr * g / |g|.
        let moved = model.encoder[0].weights[[0, 0]] - 0.5;
        assert!((moved - 1e-3).abs() / 1e-3 < 1e-6, "moved {moved}");
    }

    #[test]
    fn rejects_shape_mismatch() {
        let mut model = AeModel::glorot_init(&AeSpec::verification(), 1).unwrap();
        let other = AeModel::glorot_init(&AeSpec::audio(4, 1, 3, 2), 1).unwrap();
        let grads = GradientSet::zeros_like(&other);
        let mut opt = AmsGrad::new(1e-3);
        assert!(opt.step(&mut model, &grads).is_err());
    }

    #[test]
    fn lr_schedule_paper_points() {
        let sched = LrSchedule::WarmThenLinear {
            base_rate: 1e-4,
            hold_epochs: 100,
            end_epoch: 200,
            final_divisor: 100.0,
        };
        assert_abs_diff_eq!(sched.lr_at(0), 1e-4, epsilon = 1e-18);
        assert_abs_diff_eq!(sched.lr_at(99), 1e-4, epsilon = 1e-18);
        assert_abs_diff_eq!(sched.lr_at(200), 1e-6, epsilon = 1e-18);
        assert_abs_diff_eq!(sched.lr_at(500), 1e-6, epsilon = 1e-18);
        assert_abs_diff_eq!(sched.lr_at(150), 5.05e-5, epsilon = 1e-12);
    }

    #[test]
    fn lr_schedule_validation() {
        assert!(LrSchedule::Constant { rate: 0.0 }.validate().is_err());
        assert!(LrSchedule::WarmThenLinear {
            base_rate: 1e-4,
            hold_epochs: 200,
            end_epoch: 100,
            final_divisor: 100.0
        }
        .validate()
        .is_err());
    }

    proptest! {
        #[test]
        fn vhat_is_entrywise_non_decreasing(grads_seq in proptest::collection::vec(-5.0f64..5.0, 1..40)) {
            let mut model = scalar_model(0.0);
            let mut opt = AmsGrad::new(1e-3);
            let mut last = 0.0;
            for g in grads_seq {
                let grads = scalar_grads(&model, g);
                opt.step(&mut model, &grads).unwrap();
                let vhat = opt.vhat_snapshot()[0];
                prop_assert!(vhat >= last);
                last = vhat;
            }
        }

        #[test]
        fn warm_then_linear_is_non_increasing(
            base in 1e-6f64..1e-2,
            hold in 1u32..50,
            extra in 1u32..100,
            div in 1.0f64..1000.0,
        ) {
            let sched = LrSchedule::WarmThenLinear {
                base_rate: base,
                hold_epochs: hold,
                end_epoch: hold + extra,
                final_divisor: div,
            };
            let mut last = f64::INFINITY;
            for epoch in 0..(hold + extra + 10) {
                let lr = sched.lr_at(epoch);
                prop_assert!(lr <= last + 1e-18);
                last = lr;
            }
        }

        #[test]
        fn quadratic_converges_from_any_start(w0 in -3.0f64..3.0) {
            let mut model = scalar_model(w0);
            let mut opt = AmsGrad::new(1e-2);
            for _ in 0..3000 {
                let w = model.encoder[0].weights[[0, 0]];
                let grads = scalar_grads(&model, 2.0 * w);
                opt.step(&mut model, &grads).unwrap();
            }
            prop_assert!(model.encoder[0].weights[[0, 0]].abs() < 5e-2);
        }

        #[test]
        fn batched_update_matches_reference_on_random_grads(seed in 0u64..200) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut model = scalar_model(rng.random_range(-1.0..1.0));
            let mut w_ref = model.encoder[0].weights[[0, 0]];
            let mut opt = AmsGrad::new(1e-3);
            let mut reference = ScalarRef::new();
            for _ in 0..50 {
                let g = rng.random_range(-2.0..2.0);
                let grads = scalar_grads(&model, g);
                opt.step(&mut model, &grads).unwrap();
                w_ref = reference.step(w_ref, g, 1e-3);
            }
            prop_assert!((model.encoder[0].weights[[0, 0]] - w_ref).abs() < 1e-12);
        }
    }
}
