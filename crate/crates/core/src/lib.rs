//! Batch-uniformization training for autoencoder-based unsupervised anomaly
//! detection.
//!
//! An autoencoder is trained so that its reconstruction error works as an
//! anomaly score. The usual objective minimizes the mean score over a
//! mini-batch of normal samples, which favors frequent-normal data and leaves
//! rare-normal data with high scores. Batch uniformization instead minimizes
//! a weighted mean where each sample's weight is the reciprocal of its
//! density, estimated per mini-batch with a Gaussian-kernel KDE. The trained
//! score surface then flattens over the whole normal support.
//!
//! The crate provides the model and training machinery ([`nn`], [`optim`],
//! [`kde`], [`objectives`]), data synthesis ([`synth`], [`corpus`]), audio
//! feature extraction ([`audio`]), evaluation ([`eval`]) and experiment
//! orchestration ([`experiment`]).

pub mod audio;
pub mod corpus;
mod error;
pub mod eval;
pub mod experiment;
pub mod kde;
pub mod nn;
pub mod objectives;
pub mod optim;
pub mod synth;

pub use error::{Error, Result};
pub use eval::{DecisionConfig, DecisionMode, EvalGrid, GridPdf, OracleDensity};
pub use kde::{KdeConfig, WeightVector};
pub use nn::{Activation, AeModel, AeSpec, GradientSet, LayerSpec};
pub use objectives::{LossReport, ObjectiveConfig, ObjectiveKind};
pub use optim::{AmsGrad, LrSchedule};
pub use synth::{AnnulusClass, AnnulusConfig, MiniBatchPair};
