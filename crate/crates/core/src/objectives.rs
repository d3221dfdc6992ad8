//! The three training costs and the frame anomaly score.
//!
//! * reconstruction error `J_RE`: mean squared reconstruction error over the
//!   normal mini-batch;
//! * simplified Neyman-Pearson `J_SNP`: `J_RE` minus a clipped term `L_a`
//!   that pushes anomaly scores up, `L_a = mean(lambda * tanh(A / lambda))`;
//! * batch uniformization `J_BU`: like `J_SNP` but the normal term is a
//!   KDE-weighted, self-normalized average instead of a plain mean.
//!
//! Gradients are exact and routed through [`AeModel::backward_batch`]. KDE
//! weights depend only on the inputs, never on the model, so they are
//! constants to the gradient.

use ndarray::{ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::kde::{kde_weights, KdeConfig};
use crate::nn::{AeModel, GradientSet};
use crate::{Error, Result};

/// Which cost function trains the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveKind {
    Re,
    Snp,
    Bu,
}

impl ObjectiveKind {
    pub fn uses_anomaly_batch(self) -> bool {
        !matches!(self, ObjectiveKind::Re)
    }
}

impl std::fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ObjectiveKind::Re => "re",
            ObjectiveKind::Snp => "snp",
            ObjectiveKind::Bu => "bu",
        };
        f.write_str(s)
    }
}

/// Objective selection plus the clipping parameter and KDE settings it needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveConfig {
    pub kind: ObjectiveKind,
    /// Clipping parameter `lambda` of the anomaly term; unused for RE.
    pub clip_lambda: f64,
    /// KDE settings; used by BU only.
    pub kde: KdeConfig,
}

impl ObjectiveConfig {
    pub fn re() -> Self {
        Self {
            kind: ObjectiveKind::Re,
            clip_lambda: 1.0,
            kde: KdeConfig::default(),
        }
    }

    pub fn snp(clip_lambda: f64) -> Self {
        Self {
            kind: ObjectiveKind::Snp,
            clip_lambda,
            kde: KdeConfig::default(),
        }
    }

    pub fn bu(clip_lambda: f64, kde: KdeConfig) -> Self {
        Self {
            kind: ObjectiveKind::Bu,
            clip_lambda,
            kde,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind.uses_anomaly_batch() && self.clip_lambda <= 0.0 {
            return Err(Error::InvalidConfig(
                "clip_lambda must be > 0 for SNP and BU".into(),
            ));
        }
        if self.kind == ObjectiveKind::Bu {
            self.kde.validate()?;
        }
        Ok(())
    }
}

/// Loss value with its pieces, per-sample scores and the weights used.
#[derive(Debug, Clone, PartialEq)]
pub struct LossReport {
    pub total: f64,
    pub normal_term: f64,
    /// Anomaly term `L_a`, already subtracted from `total`; 0 for RE.
    pub anomaly_term: f64,
    pub scores_normal: Vec<f64>,
    pub scores_anomaly: Vec<f64>,
    /// Per-sample weights of the normal term; all 1 for RE and SNP.
    pub weights: Vec<f64>,
}

/// Squared reconstruction error of one sample.
pub fn anomaly_score(model: &AeModel, x: ArrayView1<f64>) -> Result<f64> {
    let (recon, _) = model.forward(x)?;
    Ok((&recon - &x).mapv(|d| d * d).sum())
}

/// Per-sample squared reconstruction errors of a batch.
pub fn anomaly_scores(model: &AeModel, batch: ArrayView2<f64>) -> Result<Vec<f64>> {
    let (recon, _) = model.forward_batch(batch)?;
    Ok(row_scores(&recon.view(), &batch))
}

fn row_scores(recon: &ArrayView2<f64>, input: &ArrayView2<f64>) -> Vec<f64> {
    recon
        .rows()
        .into_iter()
        .zip(input.rows())
        .map(|(r, x)| r.iter().zip(x.iter()).map(|(a, b)| (a - b) * (a - b)).sum())
        .collect()
}

/// Self-normalized weighted mean `sum(w*s) / sum(w)`.
pub fn weighted_mean(scores: &[f64], weights: &[f64]) -> f64 {
    debug_assert_eq!(scores.len(), weights.len());
    let num: f64 = scores.iter().zip(weights).map(|(s, w)| s * w).sum();
    let den: f64 = weights.iter().sum();
    num / den
}

/// Clipped anomaly term `(1/M_a) sum(lambda * tanh(A_j / lambda))`,
/// bounded to `[0, lambda]`.
pub fn loss_la(model: &AeModel, anomaly_batch: ArrayView2<f64>, clip_lambda: f64) -> Result<f64> {
    if anomaly_batch.nrows() == 0 {
        return Err(Error::EmptyBatch("loss_la"));
    }
    let scores = anomaly_scores(model, anomaly_batch)?;
    Ok(la_from_scores(&scores, clip_lambda))
}

fn la_from_scores(scores: &[f64], clip_lambda: f64) -> f64 {
    let sum: f64 = scores
        .iter()
        .map(|&a| clip_lambda * (a / clip_lambda).tanh())
        .sum();
    sum / scores.len() as f64
}

/// Mean reconstruction error over the normal batch.
pub fn loss_re(model: &AeModel, normal_batch: ArrayView2<f64>) -> Result<LossReport> {
    loss(model, &ObjectiveConfig::re(), normal_batch, None)
}

/// Reconstruction loss minus the clipped anomaly term.
pub fn loss_snp(
    model: &AeModel,
    normal_batch: ArrayView2<f64>,
    anomaly_batch: ArrayView2<f64>,
    clip_lambda: f64,
) -> Result<LossReport> {
    loss(
        model,
        &ObjectiveConfig::snp(clip_lambda),
        normal_batch,
        Some(anomaly_batch),
    )
}

/// KDE-weighted reconstruction loss minus the clipped anomaly term.
pub fn loss_bu(
    model: &AeModel,
    normal_batch: ArrayView2<f64>,
    anomaly_batch: ArrayView2<f64>,
    cfg: &ObjectiveConfig,
) -> Result<LossReport> {
    let cfg = ObjectiveConfig {
        kind: ObjectiveKind::Bu,
        ..*cfg
    };
    loss(model, &cfg, normal_batch, Some(anomaly_batch))
}

fn normal_weights(cfg: &ObjectiveConfig, normal_batch: ArrayView2<f64>) -> Result<Vec<f64>> {
    match cfg.kind {
        ObjectiveKind::Re | ObjectiveKind::Snp => Ok(vec![1.0; normal_batch.nrows()]),
        ObjectiveKind::Bu => Ok(kde_weights(normal_batch, &cfg.kde)?.weights),
    }
}

/// Loss evaluation shared by all objectives.
pub fn loss(
    model: &AeModel,
    cfg: &ObjectiveConfig,
    normal_batch: ArrayView2<f64>,
    anomaly_batch: Option<ArrayView2<f64>>,
) -> Result<LossReport> {
    let (report, _) = evaluate(model, cfg, normal_batch, anomaly_batch, false)?;
    Ok(report)
}

/// Loss together with the exact gradient of every model parameter.
pub fn loss_and_grad(
    model: &AeModel,
    cfg: &ObjectiveConfig,
    normal_batch: ArrayView2<f64>,
    anomaly_batch: Option<ArrayView2<f64>>,
) -> Result<(LossReport, GradientSet)> {
    let (report, grads) = evaluate(model, cfg, normal_batch, anomaly_batch, true)?;
    Ok((report, grads.expect("gradients requested")))
}

fn evaluate(
    model: &AeModel,
    cfg: &ObjectiveConfig,
    normal_batch: ArrayView2<f64>,
    anomaly_batch: Option<ArrayView2<f64>>,
    with_grads: bool,
) -> Result<(LossReport, Option<GradientSet>)> {
    cfg.validate()?;
    if normal_batch.nrows() == 0 {
        return Err(Error::EmptyBatch("normal batch"));
    }
    let anomaly_batch = if cfg.kind.uses_anomaly_batch() {
        let batch = anomaly_batch.ok_or(Error::EmptyBatch("anomaly batch"))?;
        if batch.nrows() == 0 {
            return Err(Error::EmptyBatch("anomaly batch"));
        }
        Some(batch)
    } else {
        None
    };

    let weights = normal_weights(cfg, normal_batch)?;
    let weight_sum: f64 = weights.iter().sum();

    let (recon_n, cache_n) = model.forward_batch(normal_batch)?;
    let scores_normal = row_scores(&recon_n.view(), &normal_batch);
    let normal_term = weighted_mean(&scores_normal, &weights);

    let mut grads = None;
    if with_grads {
        // d(normal term)/d(recon_i) = 2 * (w_i / sum w) * (recon_i - x_i)
        let mut upstream = &recon_n - &normal_batch;
        for (mut row, &w) in upstream.rows_mut().into_iter().zip(&weights) {
            let c = 2.0 * w / weight_sum;
            row.mapv_inplace(|v| v * c);
        }
        grads = Some(model.backward_batch(&cache_n, upstream.view())?);
    }

    let mut anomaly_term = 0.0;
    let mut scores_anomaly = Vec::new();
    if let Some(batch) = anomaly_batch {
        let (recon_a, cache_a) = model.forward_batch(batch)?;
        scores_anomaly = row_scores(&recon_a.view(), &batch);
        anomaly_term = la_from_scores(&scores_anomaly, cfg.clip_lambda);

        if with_grads {
            // The term enters the total negatively:
            // d(-L_a)/d(recon_j) = -(1/M_a) sech^2(A_j/lambda) * 2(recon_j - x_j)
            let m_a = batch.nrows() as f64;
            let mut upstream = &recon_a - &batch;
            for (mut row, &a) in upstream.rows_mut().into_iter().zip(&scores_anomaly) {
                let t = (a / cfg.clip_lambda).tanh();
                let c = -2.0 / m_a * (1.0 - t * t);
                row.mapv_inplace(|v| v * c);
            }
            let anomaly_grads = model.backward_batch(&cache_a, upstream.view())?;
            grads
                .as_mut()
                .expect("normal gradients present")
                .add_assign(&anomaly_grads)?;
        }
    }

    let report = LossReport {
        total: normal_term - anomaly_term,
        normal_term,
        anomaly_term,
        scores_normal,
        scores_anomaly,
        weights,
    };
    Ok((report, grads))
}
