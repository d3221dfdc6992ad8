//! Evaluation: grid-based density of a trained model, KL divergence against
//! the annulus oracles, threshold decisions, and ROC/AUC.
//!
//! A 2-D model's anomaly scores are turned into a probability density on a
//! rectangular grid by treating `exp(-A(x))` as an unnormalized Boltzmann
//! density and normalizing with the Riemann sum over the grid cells. Both
//! arguments of every KL divergence are discretized the same way, so the
//! discretization error cancels out of the comparison.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use ndarray::Array2;

use crate::nn::AeModel;
use crate::objectives::anomaly_scores;
use crate::{Error, Result};

/// Floor applied to `q` inside `ln(p/q)` so empty cells stay finite.
const KLD_DENSITY_FLOOR: f64 = 1e-300;

/// Neumaier compensated summation; the grid sums must not depend on
/// accumulation order beyond ~1e-9.
fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Rectangular evaluation grid; cells are indexed row-major with `x1`
/// fastest, and evaluated at their centers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalGrid {
    pub x1_range: (f64, f64),
    pub x2_range: (f64, f64),
    /// Number of cells per axis.
    pub resolution: usize,
}

impl Default for EvalGrid {
    fn default() -> Self {
        Self {
            x1_range: (-3.0, 3.0),
            x2_range: (-3.0, 3.0),
            resolution: 201,
        }
    }
}

impl EvalGrid {
    pub fn new(x1_range: (f64, f64), x2_range: (f64, f64), resolution: usize) -> Result<Self> {
        let grid = Self {
            x1_range,
            x2_range,
            resolution,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolution < 2 {
            return Err(Error::InvalidConfig("grid resolution must be >= 2".into()));
        }
        if self.x1_range.1 <= self.x1_range.0 || self.x2_range.1 <= self.x2_range.0 {
            return Err(Error::InvalidConfig("grid ranges must be non-empty".into()));
        }
        Ok(())
    }

    pub fn num_cells(&self) -> usize {
        self.resolution * self.resolution
    }

    pub fn cell_width(&self) -> (f64, f64) {
        (
            (self.x1_range.1 - self.x1_range.0) / self.resolution as f64,
            (self.x2_range.1 - self.x2_range.0) / self.resolution as f64,
        )
    }

    pub fn cell_area(&self) -> f64 {
        let (w1, w2) = self.cell_width();
        w1 * w2
    }

    /// Center of cell `(i1, i2)`.
    pub fn center(&self, i1: usize, i2: usize) -> (f64, f64) {
        let (w1, w2) = self.cell_width();
        (
            self.x1_range.0 + (i1 as f64 + 0.5) * w1,
            self.x2_range.0 + (i2 as f64 + 0.5) * w2,
        )
    }

    /// Cell centers in index order (`x2` outer, `x1` inner).
    pub fn centers(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.num_cells());
        for i2 in 0..self.resolution {
            for i1 in 0..self.resolution {
                out.push(self.center(i1, i2));
            }
        }
        out
    }
}

/// A density evaluated on a grid, normalized so the Riemann sum is 1.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPdf {
    pub grid: EvalGrid,
    /// Per-cell density values in the grid's index order.
    pub density: Vec<f64>,
    /// The numeric normalization constant that was divided out.
    pub normalization: f64,
}

impl GridPdf {
    /// Riemann sum `sum(density) * cell_area`; 1 up to rounding by
    /// construction.
    pub fn riemann_sum(&self) -> f64 {
        compensated_sum(self.density.iter().copied()) * self.grid.cell_area()
    }
}

/// Anomaly score of the model at every cell center.
pub fn grid_scores(model: &AeModel, grid: &EvalGrid) -> Result<Vec<f64>> {
    grid.validate()?;
    if model.input_dim() != 2 {
        return Err(Error::DimMismatch {
            context: "grid evaluation input",
            expected: 2,
            actual: model.input_dim(),
        });
    }
    let centers = grid.centers();
    let mut points = Array2::zeros((centers.len(), 2));
    for (mut row, &(x1, x2)) in points.rows_mut().into_iter().zip(&centers) {
        row[0] = x1;
        row[1] = x2;
    }
    anomaly_scores(model, points.view())
}

/// Normalized Boltzmann density `exp(-A) / Z` over the grid, with `Z`
/// computed numerically as the Riemann sum of `exp(-A)`.
pub fn grid_pdf(model: &AeModel, grid: &EvalGrid) -> Result<GridPdf> {
    let scores = grid_scores(model, grid)?;
    Ok(grid_pdf_from_scores(&scores, grid))
}

/// Builds the normalized density from precomputed per-cell scores.
pub fn grid_pdf_from_scores(scores: &[f64], grid: &EvalGrid) -> GridPdf {
    let unnormalized: Vec<f64> = scores.iter().map(|&a| (-a).exp()).collect();
    let z = compensated_sum(unnormalized.iter().copied()) * grid.cell_area();
    let density = unnormalized.iter().map(|&v| v / z).collect();
    GridPdf {
        grid: *grid,
        density,
        normalization: z,
    }
}

/// Analytic reference densities of the annulus dataset, discretized on the
/// grid and normalized the same way as [`grid_pdf`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleDensity {
    /// The data density: proportional to `1/r` on `r <= 2`, zero outside.
    AnnulusP,
    /// The uniform target: constant on `r <= 2`, zero outside.
    AnnulusUniform,
}

impl OracleDensity {
    pub fn on_grid(self, grid: &EvalGrid) -> GridPdf {
        let (w1, w2) = grid.cell_width();
        // Cell whose center sits on the origin would evaluate 1/r at r = 0;
        // clamp the radius so that cell carries the exact mean of 1/r over an
        // origin-centered cell instead.
        let w = (w1 * w2).sqrt();
        let r_clamp = w / (4.0 * (1.0 + std::f64::consts::SQRT_2).ln());
        let values: Vec<f64> = grid
            .centers()
            .iter()
            .map(|&(x1, x2)| {
                let r = (x1 * x1 + x2 * x2).sqrt();
                if r > 2.0 {
                    0.0
                } else {
                    match self {
                        OracleDensity::AnnulusUniform => 1.0,
                        OracleDensity::AnnulusP => 1.0 / r.max(r_clamp),
                    }
                }
            })
            .collect();
        let z = compensated_sum(values.iter().copied()) * grid.cell_area();
        GridPdf {
            grid: *grid,
            density: values.iter().map(|&v| v / z).collect(),
            normalization: z,
        }
    }
}

/// KL divergence `sum p ln(p/q) * cell_area` between densities on the same
/// grid. Cells with `p = 0` contribute nothing; `q` is floored to keep the
/// logarithm finite.
pub fn grid_kld(p: &[f64], q: &[f64], cell_area: f64) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimMismatch {
            context: "grid_kld operands",
            expected: p.len(),
            actual: q.len(),
        });
    }
    let terms = p.iter().zip(q).map(|(&pi, &qi)| {
        if pi == 0.0 {
            0.0
        } else {
            pi * (pi / qi.max(KLD_DENSITY_FLOOR)).ln()
        }
    });
    Ok(compensated_sum(terms) * cell_area)
}

/// KL divergence between two [`GridPdf`]s over the same grid.
pub fn grid_pdf_kld(p: &GridPdf, q: &GridPdf) -> Result<f64> {
    if p.grid != q.grid {
        return Err(Error::DimMismatch {
            context: "grid_kld grids",
            expected: p.grid.num_cells(),
            actual: q.grid.num_cells(),
        });
    }
    grid_kld(&p.density, &q.density, p.grid.cell_area())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Normal,
    Anomaly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionMode {
    FrameWise,
    MaxOverSequence,
}

/// Threshold decision; a score equal to the threshold counts as anomalous.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecisionConfig {
    pub threshold: f64,
    pub mode: DecisionMode,
}

pub fn decide(score: f64, cfg: &DecisionConfig) -> Decision {
    if score >= cfg.threshold {
        Decision::Anomaly
    } else {
        Decision::Normal
    }
}

/// Sequence score: the maximum frame score. A sequence is anomalous as soon
/// as one frame crosses the threshold.
pub fn max_over_frames(scores: &[f64]) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::EmptyBatch("max_over_frames"));
    }
    Ok(scores.iter().copied().fold(f64::NEG_INFINITY, f64::max))
}

/// Decides a whole sequence: frame-wise this means "any frame anomalous",
/// which coincides with thresholding the max-over-frames score.
pub fn decide_sequence(scores: &[f64], cfg: &DecisionConfig) -> Result<Decision> {
    let score = max_over_frames(scores)?;
    Ok(decide(score, cfg))
}

/// Probability that a random anomaly score exceeds a random normal score,
/// ties counted one half (Mann-Whitney; equals the trapezoidal ROC area).
pub fn auc(normal_scores: &[f64], anomaly_scores: &[f64]) -> Result<f64> {
    if normal_scores.is_empty() || anomaly_scores.is_empty() {
        return Err(Error::EmptyBatch("auc"));
    }
    let n_u = normal_scores.len();
    let n_a = anomaly_scores.len();
    let mut all: Vec<(f64, bool)> = normal_scores
        .iter()
        .map(|&s| (s, false))
        .chain(anomaly_scores.iter().map(|&s| (s, true)))
        .collect();
    all.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("scores must not be NaN"));

    // Average ranks over tie groups, then the rank-sum statistic.
    let mut rank_sum_anomaly = 0.0;
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j < all.len() && all[j].0 == all[i].0 {
            j += 1;
        }
        // 1-based ranks i+1 ..= j averaged.
        let avg_rank = (i + 1 + j) as f64 / 2.0;
        let anomalies_in_group = all[i..j].iter().filter(|&&(_, a)| a).count();
        rank_sum_anomaly += avg_rank * anomalies_in_group as f64;
        i = j;
    }
    let u = rank_sum_anomaly - (n_a * (n_a + 1)) as f64 / 2.0;
    Ok(u / (n_a as f64 * n_u as f64))
}

/// ROC curve points `(threshold, tpr, fpr)`, thresholds descending from
/// `+inf` (0, 0) down to the smallest score (1, 1), one point per distinct
/// score. A score equal to the threshold is called anomalous.
pub fn roc_points(normal_scores: &[f64], anomaly_scores: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
    if normal_scores.is_empty() || anomaly_scores.is_empty() {
        return Err(Error::EmptyBatch("roc_points"));
    }
    let mut thresholds: Vec<f64> = normal_scores
        .iter()
        .chain(anomaly_scores.iter())
        .copied()
        .collect();
    thresholds.sort_by(|a, b| b.partial_cmp(a).expect("scores must not be NaN"));
    thresholds.dedup();

    let mut points = vec![(f64::INFINITY, 0.0, 0.0)];
    for &phi in &thresholds {
        let tpr = anomaly_scores.iter().filter(|&&s| s >= phi).count() as f64
            / anomaly_scores.len() as f64;
        let fpr =
            normal_scores.iter().filter(|&&s| s >= phi).count() as f64 / normal_scores.len() as f64;
        points.push((phi, tpr, fpr));
    }
    Ok(points)
}

/// Writes grid cells as CSV rows `x1,x2,density,score`.
pub fn write_grid_csv(path: &Path, pdf: &GridPdf, scores: &[f64]) -> Result<()> {
    if scores.len() != pdf.density.len() {
        return Err(Error::DimMismatch {
            context: "grid csv scores",
            expected: pdf.density.len(),
            actual: scores.len(),
        });
    }
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "x1,x2,density,score")?;
    for (idx, &(x1, x2)) in pdf.grid.centers().iter().enumerate() {
        writeln!(out, "{},{},{},{}", x1, x2, pdf.density[idx], scores[idx])?;
    }
    out.flush()?;
    Ok(())
}

/// Writes per-cell values as a binary 8-bit PGM heatmap, min-max scaled to
/// 0..=255. Image rows run from high `x2` at the top to low `x2` at the
/// bottom; columns from low `x1` to high `x1`.
pub fn write_grid_pgm(path: &Path, grid: &EvalGrid, values: &[f64]) -> Result<()> {
    if values.len() != grid.num_cells() {
        return Err(Error::DimMismatch {
            context: "grid pgm values",
            expected: grid.num_cells(),
            actual: values.len(),
        });
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scale = if hi > lo { 255.0 / (hi - lo) } else { 0.0 };
    let res = grid.resolution;
    let mut out = BufWriter::new(File::create(path)?);
    write!(out, "P5\n{res} {res}\n255\n")?;
    let mut row = Vec::with_capacity(res);
    for i2 in (0..res).rev() {
        row.clear();
        for i1 in 0..res {
            let v = values[i2 * res + i1];
            row.push(((v - lo) * scale).round() as u8);
        }
        out.write_all(&row)?;
    }
    out.flush()?;
    Ok(())
}

/// Writes ROC points as CSV rows `threshold,tpr,fpr`.
pub fn write_roc_csv(path: &Path, points: &[(f64, f64, f64)]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "threshold,tpr,fpr")?;
    for &(phi, tpr, fpr) in points {
        writeln!(out, "{},{},{}", phi, tpr, fpr)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{Activation, AeModel, AeSpec, Layer, LayerSpec};
    use crate::synth::{gen_annulus, AnnulusClass, AnnulusConfig};
    use approx::assert_abs_diff_eq;
    use ndarray::{Array1, Array2};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn identity_model_2d() -> AeModel {
        let layer = || Layer {
            spec: LayerSpec::new(2, 2, Activation::Identity),
            weights: Array2::eye(2),
            bias: Array1::zeros(2),
        };
        AeModel::from_layers(vec![layer()], vec![layer()]).unwrap()
    }

    #[test]
    fn constant_score_gives_uniform_density() {
        // The identity model scores 0 everywhere, so the density must be the
        // uniform 1/36 over the [-3,3]^2 square.
        let grid = EvalGrid::default();
        let pdf = grid_pdf(&identity_model_2d(), &grid).unwrap();
        for &d in &pdf.density {
            assert_abs_diff_eq!(d, 1.0 / 36.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn grid_pdf_riemann_sum_is_one() {
        for seed in 0..5 {
            let model = AeModel::glorot_init(&AeSpec::verification(), seed).unwrap();
            let pdf = grid_pdf(&model, &EvalGrid::default()).unwrap();
            assert!((pdf.riemann_sum() - 1.0).abs() < 1e-6);
            assert!(pdf.density.iter().all(|&d| d >= 0.0));
        }
    }

    #[test]
    fn density_order_follows_negative_score_order() {
        let model = AeModel::glorot_init(&AeSpec::verification(), 3).unwrap();
        let grid = EvalGrid::default();
        let scores = grid_scores(&model, &grid).unwrap();
        let pdf = grid_pdf_from_scores(&scores, &grid);
        for probe in [(0usize, 1000usize), (17, 40000), (12345, 23456)] {
            let (i, j) = probe;
            if scores[i] < scores[j] {
                assert!(pdf.density[i] > pdf.density[j]);
            }
        }
    }

    #[test]
    fn grid_pdf_rejects_non_2d_model() {
        let model = AeModel::glorot_init(&AeSpec::audio(4, 1, 3, 2), 0).unwrap();
        assert!(grid_pdf(&model, &EvalGrid::default()).is_err());
    }

    #[test]
    fn kld_of_identical_densities_is_zero() {
        let model = AeModel::glorot_init(&AeSpec::verification(), 9).unwrap();
        let pdf = grid_pdf(&model, &EvalGrid::default()).unwrap();
        let d = grid_pdf_kld(&pdf, &pdf).unwrap();
        assert!(d.abs() <= 1e-12, "D(p||p) = {d}");
    }

    #[test]
    fn kld_two_cell_hand_computation() {
        let area = 0.25;
        let p = [2.0, 2.0]; // each cell mass 0.5
        let q = [3.6, 0.4]; // masses 0.9 and 0.1
        let expected = 0.5 * (0.5f64 / 0.9).ln() + 0.5 * (0.5f64 / 0.1).ln();
        let d = grid_kld(&p, &q, area).unwrap();
        assert_abs_diff_eq!(d, expected, epsilon = 1e-12);
    }

    #[test]
    fn kld_non_negative_for_random_grid_pairs() {
        for seed in 0..8 {
            let a = AeModel::glorot_init(&AeSpec::verification(), seed).unwrap();
            let b = AeModel::glorot_init(&AeSpec::verification(), seed + 100).unwrap();
            let grid = EvalGrid::new((-3.0, 3.0), (-3.0, 3.0), 51).unwrap();
            let pa = grid_pdf(&a, &grid).unwrap();
            let pb = grid_pdf(&b, &grid).unwrap();
            assert!(grid_pdf_kld(&pa, &pb).unwrap() >= -1e-12);
        }
    }

    #[test]
    fn kld_rejects_mismatched_grids() {
        let model = identity_model_2d();
        let p = grid_pdf(&model, &EvalGrid::new((-3.0, 3.0), (-3.0, 3.0), 10).unwrap()).unwrap();
        let q = grid_pdf(&model, &EvalGrid::new((-3.0, 3.0), (-3.0, 3.0), 20).unwrap()).unwrap();
        assert!(grid_pdf_kld(&p, &q).is_err());
    }

    #[test]
    fn oracle_uniform_density_matches_disk_area() {
        let grid = EvalGrid::default();
        let u = OracleDensity::AnnulusUniform.on_grid(&grid);
        assert!((u.riemann_sum() - 1.0).abs() < 1e-9);
        // Inside the disk the value approaches 1/(4 pi).
        let centers = grid.centers();
        for (idx, &(x1, x2)) in centers.iter().enumerate() {
            let r = (x1 * x1 + x2 * x2).sqrt();
            if r < 1.5 {
                assert_abs_diff_eq!(u.density[idx], 1.0 / (4.0 * PI), epsilon = 2e-3);
            }
            if r > 2.1 {
                assert_eq!(u.density[idx], 0.0);
            }
        }
    }

    #[test]
    fn oracle_p_density_near_unit_radius() {
        let grid = EvalGrid::default();
        let p = OracleDensity::AnnulusP.on_grid(&grid);
        assert!((p.riemann_sum() - 1.0).abs() < 1e-9);
        // p(x) = 1/(4 pi r), so the value at r = 1 is 1/(4 pi).
        let centers = grid.centers();
        let (idx, _) = centers
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                let da = (a.0 - 1.0).abs() + a.1.abs();
                let db = (b.0 - 1.0).abs() + b.1.abs();
                da.partial_cmp(&db).unwrap()
            })
            .unwrap();
        assert_abs_diff_eq!(p.density[idx], 1.0 / (4.0 * PI), epsilon = 3e-3);
    }

    #[test]
    fn oracle_p_is_finite_with_a_center_cell_on_the_origin() {
        // 201 cells over [-3,3] put one cell center exactly on the origin;
        // the clamped radius keeps the 1/r singularity integrable.
        let grid = EvalGrid::default();
        let has_origin_center = grid
            .centers()
            .iter()
            .any(|&(x1, x2)| x1.abs() < 1e-9 && x2.abs() < 1e-9);
        assert!(has_origin_center);
        let p = OracleDensity::AnnulusP.on_grid(&grid);
        assert!(p.density.iter().all(|d| d.is_finite()));
        let max = p.density.iter().cloned().fold(0.0, f64::max);
        // The origin cell dominates but remains a small fraction of the mass.
        assert!(max * grid.cell_area() < 0.01);
    }

    /// Monte-Carlo cross-check: the sample histogram of the generated
    /// annulus data matches the analytic 1/(4 pi r) oracle.
    #[test]
    fn oracle_p_matches_annulus_monte_carlo() {
        let cfg = AnnulusConfig {
            count: 200_000,
            seed: 7,
            ..AnnulusConfig::default()
        };
        let samples = gen_annulus(&cfg, AnnulusClass::Normal);
        // Fraction of samples in the shell 0.95 <= r <= 1.05, divided by the
        // shell area, estimates the density at r = 1.
        let shell_area = PI * (1.05f64.powi(2) - 0.95f64.powi(2));
        let in_shell = samples
            .rows()
            .into_iter()
            .filter(|row| {
                let r = (row[0] * row[0] + row[1] * row[1]).sqrt();
                (0.95..=1.05).contains(&r)
            })
            .count();
        let mc_density = in_shell as f64 / cfg.count as f64 / shell_area;
        let analytic = 1.0 / (4.0 * PI);
        assert!(
            (mc_density - analytic).abs() / analytic < 0.05,
            "MC {mc_density} vs analytic {analytic}"
        );
    }

    #[test]
    fn decide_at_threshold_is_anomaly() {
        let cfg = DecisionConfig {
            threshold: 1.5,
            mode: DecisionMode::FrameWise,
        };
        assert_eq!(decide(1.5, &cfg), Decision::Anomaly);
        assert_eq!(decide(1.5 - 1e-12, &cfg), Decision::Normal);
        assert_eq!(decide(2.0, &cfg), Decision::Anomaly);
    }

    #[test]
    fn sequence_decision_uses_max() {
        let cfg = DecisionConfig {
            threshold: 1.0,
            mode: DecisionMode::MaxOverSequence,
        };
        assert_eq!(
            decide_sequence(&[0.1, 0.2, 1.0, 0.3], &cfg).unwrap(),
            Decision::Anomaly
        );
        assert_eq!(
            decide_sequence(&[0.1, 0.2, 0.99], &cfg).unwrap(),
            Decision::Normal
        );
        assert_abs_diff_eq!(max_over_frames(&[0.1, 0.9, 0.5]).unwrap(), 0.9);
    }

    #[test]
    fn auc_perfect_separation() {
        assert_abs_diff_eq!(auc(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn auc_identical_distributions_is_half() {
        assert_abs_diff_eq!(
            auc(&[0.3, 0.7, 0.5], &[0.3, 0.7, 0.5]).unwrap(),
            0.5,
            epsilon = 1e-15
        );
    }

    #[test]
    fn auc_mixed_case() {
        // Pairs: (0,1)+ (0,3)+ (2,1)- (2,3)+ -> 3/4.
        assert_abs_diff_eq!(
            auc(&[0.0, 2.0], &[1.0, 3.0]).unwrap(),
            0.75,
            epsilon = 1e-15
        );
    }

    #[test]
    fn auc_rejects_empty_inputs() {
        assert!(auc(&[], &[1.0]).is_err());
        assert!(auc(&[1.0], &[]).is_err());
    }

    /// Brute-force pairwise counting oracle for the rank-based AUC.
    fn auc_brute(normal: &[f64], anomaly: &[f64]) -> f64 {
        let mut total = 0.0;
        for &a in anomaly {
            for &n in normal {
                total += if a > n {
                    1.0
                } else if a == n {
                    0.5
                } else {
                    0.0
                };
            }
        }
        total / (normal.len() * anomaly.len()) as f64
    }

    fn trapezoid_area(points: &[(f64, f64, f64)]) -> f64 {
        points
            .windows(2)
            .map(|w| {
                let (_, tpr0, fpr0) = w[0];
                let (_, tpr1, fpr1) = w[1];
                (fpr1 - fpr0) * (tpr0 + tpr1) / 2.0
            })
            .sum()
    }

    proptest! {
        #[test]
        fn auc_matches_brute_force(
            normal in proptest::collection::vec(-5.0f64..5.0, 1..25),
            anomaly in proptest::collection::vec(-5.0f64..5.0, 1..25),
        ) {
            let fast = auc(&normal, &anomaly).unwrap();
            prop_assert!((fast - auc_brute(&normal, &anomaly)).abs() < 1e-12);
        }

        #[test]
        fn auc_invariant_under_increasing_transform(
            normal in proptest::collection::vec(-3.0f64..3.0, 1..15),
            anomaly in proptest::collection::vec(-3.0f64..3.0, 1..15),
        ) {
            let before = auc(&normal, &anomaly).unwrap();
            let t = |v: f64| (2.0 * v).exp() + 3.0 * v;
            let tn: Vec<f64> = normal.iter().map(|&v| t(v)).collect();
            let ta: Vec<f64> = anomaly.iter().map(|&v| t(v)).collect();
            let after = auc(&tn, &ta).unwrap();
            prop_assert!((before - after).abs() < 1e-12);
        }

        #[test]
        fn roc_trapezoid_equals_rank_auc(
            normal in proptest::collection::vec(0u8..6, 1..20),
            anomaly in proptest::collection::vec(0u8..6, 1..20),
        ) {
            // Integer-valued scores force plenty of ties.
            let normal: Vec<f64> = normal.into_iter().map(f64::from).collect();
            let anomaly: Vec<f64> = anomaly.into_iter().map(f64::from).collect();
            let points = roc_points(&normal, &anomaly).unwrap();
            prop_assert!((trapezoid_area(&points) - auc(&normal, &anomaly).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn roc_endpoints() {
        let points = roc_points(&[0.0, 1.0], &[0.5, 2.0]).unwrap();
        assert_eq!(points[0], (f64::INFINITY, 0.0, 0.0));
        let last = points.last().unwrap();
        assert_eq!((last.1, last.2), (1.0, 1.0));
    }

    #[test]
    fn pgm_export_shape_and_scaling() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("map.pgm");
        let grid = EvalGrid::new((-1.0, 1.0), (-1.0, 1.0), 3).unwrap();
        let values = vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0];
        write_grid_pgm(&path, &grid, &values).unwrap();
        let data = std::fs::read(&path).unwrap();
        let header = b"P5\n3 3\n255\n";
        assert_eq!(&data[..header.len()], header);
        let pixels = &data[header.len()..];
        assert_eq!(pixels.len(), 9);
        // Top-left pixel is the (low x1, high x2) cell = values[6].
        assert_eq!(pixels[0], ((6.0 / 8.0) * 255.0f64).round() as u8);
        assert_eq!(pixels[8], ((2.0 / 8.0) * 255.0f64).round() as u8);
        assert_eq!(pixels[6], 0); // minimum
    }

    #[test]
    fn grid_csv_layout() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("grid.csv");
        let grid = EvalGrid::new((0.0, 1.0), (0.0, 1.0), 2).unwrap();
        let scores = vec![0.0, 1.0, 2.0, 3.0];
        let pdf = grid_pdf_from_scores(&scores, &grid);
        write_grid_csv(&path, &pdf, &scores).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], "x1,x2,density,score");
        assert!(lines[1].starts_with("0.25,0.25,"));
        assert!(lines[4].starts_with("0.75,0.75,"));
    }
}
