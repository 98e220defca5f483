//! Experiment configuration: a JSON document naming the datasets, the method,
//! the learner family, and every knob the harness needs. Unknown fields are
//! rejected so typos fail loudly.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use tri_ts::learners::{LearnerFamily, LearnerSpec};
use tri_ts::selflabel::ThresholdSchedule;
use tri_ts::{Error, Result};

/// Self-labeling method to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    SelfTraining,
    Tri,
    TriD,
    TriTs,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::SelfTraining => "self_training",
            Method::Tri => "tri",
            Method::TriD => "tri_d",
            Method::TriTs => "tri_ts",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "self_training" => Ok(Method::SelfTraining),
            "tri" => Ok(Method::Tri),
            "tri_d" => Ok(Method::TriD),
            "tri_ts" => Ok(Method::TriTs),
            other => Err(Error::InvalidParameter(format!(
                "unknown method {other:?}; expected one of self_training, tri, tri_d, tri_ts"
            ))),
        }
    }
}

/// Where the train/validation/test TSV files live. When `embeddings` names a
/// GloVe-format vector file the TSV payloads are treated as raw text and
/// featurized by embedding averaging; otherwise they must already be
/// comma-separated feature vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    pub train: PathBuf,
    pub validation: PathBuf,
    pub test: PathBuf,
    #[serde(default)]
    pub embeddings: Option<PathBuf>,
    #[serde(default = "default_embedding_dimension")]
    pub embedding_dimension: usize,
}

fn default_embedding_dimension() -> usize {
    300
}

/// One experiment: a method evaluated over a grid of label rates, averaged
/// over seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: DatasetConfig,
    pub method: Method,
    #[serde(default = "default_learner")]
    pub learner: LearnerFamily,
    pub label_rates: Vec<f64>,
    pub seeds: Vec<u64>,
    #[serde(default = "ThresholdSchedule::standard")]
    pub schedule: ThresholdSchedule,
    #[serde(default = "default_confidence_threshold")]
    pub confidence_threshold: f64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    /// Optional overrides for the learner family's default hyperparameters.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hidden_units: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub learning_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epochs: Option<usize>,
    pub output_dir: PathBuf,
}

fn default_learner() -> LearnerFamily {
    LearnerFamily::Linear
}

fn default_confidence_threshold() -> f64 {
    0.9
}

fn default_max_iterations() -> usize {
    1000
}

impl ExperimentConfig {
    /// Reads and parses a config file. File and JSON problems both count as
    /// configuration errors, not runtime errors.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::InvalidParameter(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::from_json(&text).map_err(|e| {
            Error::InvalidParameter(format!("config {}: {e}", path.display()))
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::InvalidParameter(format!("invalid config JSON: {e}")))
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    /// Checks every invariant that can be checked without touching the
    /// filesystem. Runs before any data is loaded or any model is trained.
    pub fn validate(&self) -> Result<()> {
        if self.label_rates.is_empty() {
            return Err(Error::InvalidParameter(
                "label_rates must not be empty".into(),
            ));
        }
        for &rate in &self.label_rates {
            if !(rate > 0.0 && rate <= 1.0) || !rate.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "label rate must lie in (0, 1], got {rate}"
                )));
            }
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidParameter("seeds must not be empty".into()));
        }
        self.schedule.validate()?;
        if !self.confidence_threshold.is_finite()
            || !(0.0..=1.0).contains(&self.confidence_threshold)
        {
            return Err(Error::InvalidParameter(format!(
                "confidence_threshold must lie in [0, 1], got {}",
                self.confidence_threshold
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter(
                "max_iterations must be at least 1".into(),
            ));
        }
        self.learner_spec().validate()?;
        Ok(())
    }

    /// The learner hyperparameters implied by the configured family, with any
    /// per-config overrides applied.
    pub fn learner_spec(&self) -> LearnerSpec {
        let mut spec = spec_for(self.learner);
        if let Some(hidden_units) = self.hidden_units {
            spec.hidden_units = hidden_units;
        }
        if let Some(learning_rate) = self.learning_rate {
            spec.learning_rate = learning_rate;
        }
        if let Some(epochs) = self.epochs {
            spec.epochs = epochs;
        }
        spec
    }
}

/// Default hyperparameters for a learner family.
pub fn spec_for(family: LearnerFamily) -> LearnerSpec {
    match family {
        LearnerFamily::NaiveBayes => LearnerSpec::naive_bayes(),
        LearnerFamily::Linear => LearnerSpec::linear(),
        LearnerFamily::Mlp => LearnerSpec::mlp(),
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub method: Option<Method>,
    pub rate: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, config: &mut ExperimentConfig) {
        if let Some(out) = &self.out {
            config.output_dir = out.clone();
        }
        if let Some(seed) = self.seed {
            config.seeds = vec![seed];
        }
        if let Some(method) = self.method {
            config.method = method;
        }
        if let Some(rate) = self.rate {
            config.label_rates = vec![rate];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_config() -> ExperimentConfig {
        ExperimentConfig {
            dataset: DatasetConfig {
                train: PathBuf::from("data/train.tsv"),
                validation: PathBuf::from("data/validation.tsv"),
                test: PathBuf::from("data/test.tsv"),
                embeddings: None,
                embedding_dimension: 300,
            },
            method: Method::TriTs,
            learner: LearnerFamily::Linear,
            label_rates: vec![0.1, 0.2],
            seeds: vec![1, 2, 3],
            schedule: ThresholdSchedule::standard(),
            confidence_threshold: 0.9,
            max_iterations: 1000,
            hidden_units: None,
            learning_rate: None,
            epochs: None,
            output_dir: PathBuf::from("out"),
        }
    }

    #[test]
    fn round_trip_is_identity() {
        let config = sample_config();
        let text = config.to_json_string();
        let reparsed = ExperimentConfig::from_json(&text).unwrap();
        assert_eq!(reparsed, config);
        assert_eq!(reparsed.to_json_string(), text);
    }

    #[test]
    fn missing_optional_fields_take_defaults() {
        let text = r#"{
            "dataset": {
                "train": "a.tsv",
                "validation": "b.tsv",
                "test": "c.tsv"
            },
            "method": "tri_ts",
            "label_rates": [0.1],
            "seeds": [1],
            "output_dir": "out"
        }"#;
        let config = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(config.learner, LearnerFamily::Linear);
        assert_eq!(config.schedule, ThresholdSchedule::standard());
        assert_eq!(config.confidence_threshold, 0.9);
        assert_eq!(config.max_iterations, 1000);
        assert_eq!(config.dataset.embeddings, None);
    }

    #[test]
    fn unknown_field_is_rejected() {
        let text = r#"{
            "dataset": {"train": "a", "validation": "b", "test": "c"},
            "method": "tri",
            "label_rates": [0.1],
            "seeds": [1],
            "output_dir": "out",
            "labelrates": [0.5]
        }"#;
        assert!(ExperimentConfig::from_json(text).is_err());
    }

    #[test]
    fn student_threshold_above_teacher_threshold_fails_validation() {
        let mut config = sample_config();
        config.schedule.tau_s = 0.95;
        config.schedule.tau_t = 0.94;
        let err = config.validate().unwrap_err();
        assert!(err.is_invalid_input());
        assert!(err.to_string().contains("tau_s"));
    }

    #[test]
    fn bad_rates_and_seeds_fail_validation() {
        let mut config = sample_config();
        config.label_rates = vec![0.0];
        assert!(config.validate().is_err());

        let mut config = sample_config();
        config.label_rates = vec![1.5];
        assert!(config.validate().is_err());

        let mut config = sample_config();
        config.label_rates.clear();
        assert!(config.validate().is_err());

        let mut config = sample_config();
        config.seeds.clear();
        assert!(config.validate().is_err());

        let mut config = sample_config();
        config.confidence_threshold = 1.2;
        assert!(config.validate().is_err());

        let mut config = sample_config();
        config.max_iterations = 0;
        assert!(config.validate().is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for method in [Method::SelfTraining, Method::Tri, Method::TriD, Method::TriTs] {
            assert_eq!(method.name().parse::<Method>().unwrap(), method);
        }
        assert!("svm".parse::<Method>().is_err());
    }

    #[test]
    fn overrides_replace_config_fields() {
        let mut config = sample_config();
        let overrides = Overrides {
            out: Some(PathBuf::from("elsewhere")),
            seed: Some(7),
            method: Some(Method::Tri),
            rate: Some(0.4),
        };
        overrides.apply(&mut config);
        assert_eq!(config.output_dir, PathBuf::from("elsewhere"));
        assert_eq!(config.seeds, vec![7]);
        assert_eq!(config.method, Method::Tri);
        assert_eq!(config.label_rates, vec![0.4]);
    }
}
