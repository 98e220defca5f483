//! Dataset types, label-rate splitting with hidden ground truth, and
//! bootstrap resampling.

mod embeddings;
mod synth;
mod tsv;

pub use embeddings::{featurize_sentence, featurize_sentence_with, load_embeddings, CleaningOptions, EmbeddingTable};
pub use synth::{generate_blobs, SynthParams};
pub use tsv::{
    class_name, load_labeled_tsv, load_unlabeled_tsv, parse_label, write_hidden_labels_tsv,
    write_labeled_tsv, write_unlabeled_tsv, PayloadMode,
};

use std::collections::HashMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Dense feature vector for one sentence or synthetic point.
pub type FeatureVector = Vec<f64>;

/// One data point: a unique id, its features, and optionally the raw text the
/// features were computed from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub id: u64,
    pub features: FeatureVector,
    pub raw_text: Option<String>,
}

impl Instance {
    pub fn new(id: u64, features: FeatureVector) -> Self {
        Instance {
            id,
            features,
            raw_text: None,
        }
    }
}

/// Class label as an index in `[0, num_classes)`. For the 3-class sentiment
/// task the ordering is fixed: negative = 0, neutral = 1, positive = 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Label {
    pub class_index: usize,
}

impl Label {
    pub const fn new(class_index: usize) -> Self {
        Label { class_index }
    }
}

pub const NEGATIVE: Label = Label { class_index: 0 };
pub const NEUTRAL: Label = Label { class_index: 1 };
pub const POSITIVE: Label = Label { class_index: 2 };

/// A labeled/unlabeled split of a training set, with the ground truth of the
/// unlabeled pool hidden away for later quality checks. Hidden labels are
/// never visible to the self-labeling algorithms, which only receive
/// `labeled` and `unlabeled`; only the metrics read `hidden_labels`.
#[derive(Debug, Clone, Default)]
pub struct SplitSet {
    pub labeled: Vec<(Instance, Label)>,
    pub unlabeled: Vec<Instance>,
    pub hidden_labels: HashMap<u64, Label>,
    pub validation: Vec<(Instance, Label)>,
    pub test: Vec<(Instance, Label)>,
}

impl SplitSet {
    /// Attaches evaluation sets (they are not part of the labeled/unlabeled split).
    #[must_use]
    pub fn with_eval_sets(
        mut self,
        validation: Vec<(Instance, Label)>,
        test: Vec<(Instance, Label)>,
    ) -> Self {
        self.validation = validation;
        self.test = test;
        self
    }

    /// Requested-rate bookkeeping: |labeled| / (|labeled| + |unlabeled|).
    pub fn effective_label_rate(&self) -> f64 {
        let total = self.labeled.len() + self.unlabeled.len();
        self.labeled.len() as f64 / total as f64
    }
}

/// Rounds half away from zero.
fn round_half_away(x: f64) -> usize {
    (x + 0.5).floor() as usize
}

/// Selects `round(rate * |data|)` instances uniformly at random (without
/// replacement) as the labeled set; the rest become the unlabeled pool with
/// their labels moved to `hidden_labels`. Both halves keep the original data
/// order. Deterministic in `(data order, rate, seed)`.
pub fn make_label_rate_split(
    data: &[(Instance, Label)],
    rate: f64,
    seed: u64,
) -> Result<SplitSet> {
    if data.is_empty() {
        return Err(Error::EmptyInput("cannot split an empty dataset".into()));
    }
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "label rate must be in (0, 1], got {rate}"
        )));
    }
    let labeled_count = round_half_away(rate * data.len() as f64);
    if labeled_count == 0 {
        return Err(Error::InvalidParameter(format!(
            "label rate {rate} selects 0 of {} instances",
            data.len()
        )));
    }

    // Partial Fisher-Yates over the index set: the first `labeled_count`
    // shuffled positions are the labeled selection.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices: Vec<usize> = (0..data.len()).collect();
    for i in 0..labeled_count.min(data.len() - 1) {
        let j = rng.gen_range(i..data.len());
        indices.swap(i, j);
    }
    let mut selected = vec![false; data.len()];
    for &i in &indices[..labeled_count] {
        selected[i] = true;
    }

    let mut split = SplitSet::default();
    for (i, (instance, label)) in data.iter().enumerate() {
        if selected[i] {
            split.labeled.push((instance.clone(), *label));
        } else {
            split.hidden_labels.insert(instance.id, *label);
            split.unlabeled.push(instance.clone());
        }
    }
    Ok(split)
}

/// Uniform resample with replacement, same size as the input, seeded.
pub fn bootstrap_sample(labeled: &[(Instance, Label)], seed: u64) -> Result<Vec<(Instance, Label)>> {
    if labeled.is_empty() {
        return Err(Error::EmptyInput("cannot bootstrap an empty set".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..labeled.len())
        .map(|_| labeled[rng.gen_range(0..labeled.len())].clone())
        .collect())
}
