//! One-vs-rest linear max-margin classifier trained by hinge-loss
//! subgradient descent with L2 regularization and per-dimension feature
//! standardization.

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::model::DemandVector;
use crate::rng::rng_from_seed;

use super::kmeans::ClusterModel;
use super::{demand_features, DemandDatabase};

pub const DEFAULT_SVM_EPOCHS: usize = 100;
pub const DEFAULT_SVM_LEARNING_RATE: f64 = 0.1;
pub const DEFAULT_SVM_REGULARIZATION: f64 = 1e-4;

/// Labeled demand features: one row per database row, label = cluster.
#[derive(Debug, Clone)]
pub struct TrainingMatrix {
    features: Vec<Vec<f64>>,
    labels: Vec<usize>,
}

impl TrainingMatrix {
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<usize>) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} feature rows vs {} labels",
                features.len(),
                labels.len()
            )));
        }
        if let Some(first) = features.first() {
            if features.iter().any(|f| f.len() != first.len()) {
                return Err(Error::DimensionMismatch("ragged feature rows".into()));
            }
        }
        Ok(Self { features, labels })
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }
}

/// Label every database row with its cluster from the fitted model.
pub fn build_training_matrix(db: &DemandDatabase, model: &ClusterModel) -> TrainingMatrix {
    let features = db.feature_matrix();
    let labels = features.iter().map(|f| model.nearest_centroid(f)).collect();
    TrainingMatrix { features, labels }
}

/// One linear decision function.
#[derive(Debug, Clone)]
pub struct LinearSeparator {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearSeparator {
    fn score(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias
    }
}

/// Trained one-vs-rest model plus the standardization it was fit under.
#[derive(Debug, Clone)]
pub struct ClassifierModel {
    separators: Vec<LinearSeparator>,
    feature_mean: Vec<f64>,
    feature_std: Vec<f64>,
}

impl ClassifierModel {
    pub fn class_count(&self) -> usize {
        self.separators.len()
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_mean.len()
    }

    pub fn separators(&self) -> &[LinearSeparator] {
        &self.separators
    }

    fn standardize(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.feature_mean.iter().zip(&self.feature_std))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }

    /// Argmax over one-vs-rest scores, ties to the lowest class index.
    pub fn decide(&self, features: &[f64]) -> Result<usize> {
        if features.len() != self.feature_dim() {
            return Err(Error::DimensionMismatch(format!(
                "classifier expects {} features, got {}",
                self.feature_dim(),
                features.len()
            )));
        }
        let x = self.standardize(features);
        let mut best = 0usize;
        let mut best_score = self.separators[0].score(&x);
        for (k, sep) in self.separators.iter().enumerate().skip(1) {
            let s = sep.score(&x);
            if s > best_score {
                best_score = s;
                best = k;
            }
        }
        Ok(best)
    }
}

/// Fit the one-vs-rest model. Deterministic per seed (the seed drives the
/// per-epoch example shuffling).
pub fn train_classifier(
    matrix: &TrainingMatrix,
    epochs: usize,
    learning_rate: f64,
    regularization: f64,
    seed: u64,
) -> Result<ClassifierModel> {
    if matrix.is_empty() {
        return Err(Error::InsufficientData("empty training matrix".into()));
    }
    let dim = matrix.features()[0].len();
    let n = matrix.len();
    let classes = matrix.labels().iter().copied().max().unwrap() + 1;

    // Standardization recorded in the model.
    let mut mean = vec![0.0; dim];
    for f in matrix.features() {
        for (m, v) in mean.iter_mut().zip(f) {
            *m += v;
        }
    }
    for m in mean.iter_mut() {
        *m /= n as f64;
    }
    let mut std = vec![0.0; dim];
    for f in matrix.features() {
        for (s, (v, m)) in std.iter_mut().zip(f.iter().zip(&mean)) {
            *s += (v - m) * (v - m);
        }
    }
    for s in std.iter_mut() {
        *s = (*s / n as f64).sqrt();
        if *s == 0.0 {
            *s = 1.0; // constant dimension carries no signal
        }
    }
    let standardized: Vec<Vec<f64>> = matrix
        .features()
        .iter()
        .map(|f| {
            f.iter()
                .zip(mean.iter().zip(&std))
                .map(|(v, (m, s))| (v - m) / s)
                .collect()
        })
        .collect();

    let mut rng = rng_from_seed(seed);
    let mut separators = Vec::with_capacity(classes);
    for class in 0..classes {
        let mut w = vec![0.0; dim];
        let mut b = 0.0;
        let mut order: Vec<usize> = (0..n).collect();
        for _ in 0..epochs.max(1) {
            order.shuffle(&mut rng);
            for &i in &order {
                let y = if matrix.labels()[i] == class {
                    1.0
                } else {
                    -1.0
                };
                let x = &standardized[i];
                let margin = y * (w.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + b);
                if margin < 1.0 {
                    for (wj, xj) in w.iter_mut().zip(x) {
                        *wj += learning_rate * (y * xj - regularization * *wj);
                    }
                    b += learning_rate * y;
                } else {
                    for wj in w.iter_mut() {
                        *wj -= learning_rate * regularization * *wj;
                    }
                }
            }
        }
        separators.push(LinearSeparator {
            weights: w,
            bias: b,
        });
    }

    Ok(ClassifierModel {
        separators,
        feature_mean: mean,
        feature_std: std,
    })
}

/// Classify a fresh demand vector to its demand cluster.
pub fn classify(model: &ClassifierModel, d: &DemandVector) -> Result<usize> {
    model.decide(&demand_features(d))
}
