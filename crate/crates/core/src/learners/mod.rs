//! Probabilistic base classifiers behind one training and prediction
//! interface: Gaussian naive Bayes, a multinomial logistic linear model, and a
//! one-hidden-layer MLP with softmax output. All probability math runs in the
//! log domain.

mod linear;
mod mlp;
mod naive_bayes;

pub use linear::SoftmaxRegression;
pub use mlp::{gradient_error, MlpNet};
pub use naive_bayes::GaussianNb;

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{Instance, Label};
use crate::{Error, Result};

/// Base classifier family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerFamily {
    NaiveBayes,
    Linear,
    Mlp,
}

impl LearnerFamily {
    pub fn name(self) -> &'static str {
        match self {
            LearnerFamily::NaiveBayes => "naive_bayes",
            LearnerFamily::Linear => "linear",
            LearnerFamily::Mlp => "mlp",
        }
    }
}

impl std::str::FromStr for LearnerFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive_bayes" => Ok(LearnerFamily::NaiveBayes),
            "linear" => Ok(LearnerFamily::Linear),
            "mlp" => Ok(LearnerFamily::Mlp),
            other => Err(Error::InvalidParameter(format!(
                "unknown learner family {other:?}"
            ))),
        }
    }
}

/// Hyperparameters for one classifier. Fields that a family does not use are
/// ignored by it but still validated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerSpec {
    pub family: LearnerFamily,
    /// Hidden layer width (mlp only).
    pub hidden_units: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2_penalty: f64,
    /// Added to per-class variances as a fraction of the largest feature
    /// variance (naive_bayes only).
    pub variance_smoothing: f64,
}

impl LearnerSpec {
    pub fn naive_bayes() -> Self {
        LearnerSpec {
            family: LearnerFamily::NaiveBayes,
            ..LearnerSpec::linear()
        }
    }

    pub fn linear() -> Self {
        LearnerSpec {
            family: LearnerFamily::Linear,
            hidden_units: 50,
            learning_rate: 0.3,
            epochs: 30,
            l2_penalty: 1e-4,
            variance_smoothing: 1e-9,
        }
    }

    pub fn mlp() -> Self {
        LearnerSpec {
            family: LearnerFamily::Mlp,
            learning_rate: 0.05,
            epochs: 120,
            ..LearnerSpec::linear()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.hidden_units == 0 {
            return Err(Error::InvalidParameter("hidden_units must be positive".into()));
        }
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return Err(Error::InvalidParameter("learning_rate must be positive".into()));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidParameter("epochs must be positive".into()));
        }
        if !self.l2_penalty.is_finite() || self.l2_penalty < 0.0 {
            return Err(Error::InvalidParameter("l2_penalty must be non-negative".into()));
        }
        if !self.variance_smoothing.is_finite() || self.variance_smoothing <= 0.0 {
            return Err(Error::InvalidParameter(
                "variance_smoothing must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Anything that emits a class distribution for a feature vector.
pub trait ProbabilisticClassifier {
    fn num_classes(&self) -> usize;
    fn feature_dim(&self) -> usize;

    /// Class probabilities for one instance: `num_classes` entries, each
    /// non-negative, summing to 1.
    fn predict_proba(&self, features: &[f64]) -> Result<Vec<f64>>;

    /// Argmax class and its probability, ties broken by lowest class index.
    fn predict_top(&self, features: &[f64]) -> Result<(Label, f64)> {
        let probs = self.predict_proba(features)?;
        let best = argmax_lowest(&probs);
        Ok((Label::new(best), probs[best]))
    }
}

/// A trained classifier of any family, together with the spec that made it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub spec: LearnerSpec,
    kind: ModelKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ModelKind {
    NaiveBayes(GaussianNb),
    Linear(SoftmaxRegression),
    Mlp(MlpNet),
}

impl Model {
    /// The MLP parameters when this model is an MLP, for gradient inspection.
    pub fn as_mlp(&self) -> Option<&MlpNet> {
        match &self.kind {
            ModelKind::Mlp(net) => Some(net),
            _ => None,
        }
    }
}

impl ProbabilisticClassifier for Model {
    fn num_classes(&self) -> usize {
        match &self.kind {
            ModelKind::NaiveBayes(m) => m.num_classes(),
            ModelKind::Linear(m) => m.num_classes(),
            ModelKind::Mlp(m) => m.num_classes(),
        }
    }

    fn feature_dim(&self) -> usize {
        match &self.kind {
            ModelKind::NaiveBayes(m) => m.feature_dim(),
            ModelKind::Linear(m) => m.feature_dim(),
            ModelKind::Mlp(m) => m.feature_dim(),
        }
    }

    fn predict_proba(&self, features: &[f64]) -> Result<Vec<f64>> {
        match &self.kind {
            ModelKind::NaiveBayes(m) => m.predict_proba(features),
            ModelKind::Linear(m) => m.predict_proba(features),
            ModelKind::Mlp(m) => m.predict_proba(features),
        }
    }
}

/// Checks training data shape and returns (feature views, labels, dimension).
fn prepare<'a>(
    data: &'a [(Instance, Label)],
    num_classes: usize,
) -> Result<(Vec<(&'a [f64], usize)>, usize)> {
    if data.is_empty() {
        return Err(Error::EmptyInput("training set is empty".into()));
    }
    if num_classes < 2 {
        return Err(Error::InvalidParameter(format!(
            "num_classes must be at least 2, got {num_classes}"
        )));
    }
    let dim = data[0].0.features.len();
    let mut present = vec![false; num_classes];
    let mut samples = Vec::with_capacity(data.len());
    for (instance, label) in data {
        if instance.features.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: instance.features.len(),
            });
        }
        if label.class_index >= num_classes {
            return Err(Error::InvalidParameter(format!(
                "label {} out of range for {num_classes} classes",
                label.class_index
            )));
        }
        present[label.class_index] = true;
        samples.push((instance.features.as_slice(), label.class_index));
    }
    if present.iter().filter(|p| **p).count() < 2 {
        return Err(Error::DegenerateTraining(
            "training set holds fewer than 2 distinct classes".into(),
        ));
    }
    Ok((samples, dim))
}

/// Trains a classifier from scratch. Deterministic given (spec, data order,
/// seed); no warm starts.
pub fn train_classifier(
    spec: &LearnerSpec,
    data: &[(Instance, Label)],
    num_classes: usize,
    seed: u64,
) -> Result<Model> {
    spec.validate()?;
    let (samples, dim) = prepare(data, num_classes)?;
    let kind = match spec.family {
        LearnerFamily::NaiveBayes => ModelKind::NaiveBayes(GaussianNb::fit(
            &samples,
            num_classes,
            dim,
            spec.variance_smoothing,
        )),
        LearnerFamily::Linear => {
            ModelKind::Linear(SoftmaxRegression::fit(&samples, num_classes, dim, spec, seed))
        }
        LearnerFamily::Mlp => ModelKind::Mlp(MlpNet::fit(&samples, num_classes, dim, spec, seed)),
    };
    Ok(Model { spec: spec.clone(), kind })
}

const MODEL_FILE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    version: u32,
    model: Model,
}

/// Writes a model as versioned JSON. The round trip is exact: floats are
/// emitted with enough digits to reparse to the same bits.
pub fn save_model(model: &Model, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let wrapper = ModelFile {
        version: MODEL_FILE_VERSION,
        model: model.clone(),
    };
    serde_json::to_writer_pretty(BufWriter::new(file), &wrapper)
        .map_err(|e| Error::io(path, std::io::Error::new(std::io::ErrorKind::Other, e)))
}

/// Loads a model written by [`save_model`].
pub fn load_model(path: &Path) -> Result<Model> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let wrapper: ModelFile = serde_json::from_reader(BufReader::new(file)).map_err(|e| {
        Error::Parse {
            path: path.display().to_string(),
            line: 0,
            message: e.to_string(),
        }
    })?;
    if wrapper.version != MODEL_FILE_VERSION {
        return Err(Error::UnsupportedModelVersion {
            path: path.display().to_string(),
            version: wrapper.version,
        });
    }
    Ok(wrapper.model)
}

/// Index of the largest value, lowest index on ties.
pub(crate) fn argmax_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// log(sum(exp(x))) without overflow; tolerates -inf entries.
pub(crate) fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

/// Normalizes log scores into a probability distribution.
pub(crate) fn softmax(log_scores: &[f64]) -> Vec<f64> {
    let norm = log_sum_exp(log_scores);
    log_scores.iter().map(|s| (s - norm).exp()).collect()
}
