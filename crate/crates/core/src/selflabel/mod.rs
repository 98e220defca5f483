//! Self-labeling algorithms: teacher-student tri-training with adaptive
//! thresholds, plus self-training and tri-training baselines.
//!
//! The teacher-student scheme trains three classifiers on bootstrap resamples
//! of the labeled set. Each iteration every model takes the student role once:
//! the other two, as teachers, nominate pool instances they agree on with high
//! confidence and the student itself scores low, and the student retrains on
//! the labeled set plus those nominations. A teacher threshold falls and a
//! student threshold rises each iteration; the run graduates when they cross.

mod baselines;
mod trace;
mod tri_ts;

pub use baselines::{run_self_training, run_tri_training, TriVariant};
pub use trace::{IterationRecord, RunTrace, TerminalReason};
pub use tri_ts::{run_tri_ts, RunOptions, UpdateMode};

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{bootstrap_sample, Instance, Label};
use crate::learners::{argmax_lowest, train_classifier, LearnerSpec, Model, ProbabilisticClassifier};
use crate::seed::{mix, role};
use crate::{Error, Result};

/// Adaptive thresholds: `tau_t` gates teacher confidence from above, `tau_s`
/// gates student confidence from below, and the rates move them toward each
/// other every iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSchedule {
    pub tau_t: f64,
    pub tau_s: f64,
    pub lambda_t: f64,
    pub lambda_s: f64,
}

impl ThresholdSchedule {
    /// The empirically grounded defaults: thresholds 0.94/0.85, both rates
    /// 0.001.
    pub fn standard() -> Self {
        ThresholdSchedule {
            tau_t: 0.94,
            tau_s: 0.85,
            lambda_t: 0.001,
            lambda_s: 0.001,
        }
    }

    pub fn new(tau_t: f64, tau_s: f64, lambda_t: f64, lambda_s: f64) -> Result<Self> {
        let schedule = ThresholdSchedule { tau_t, tau_s, lambda_t, lambda_s };
        schedule.validate()?;
        Ok(schedule)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.tau_t.is_finite() || self.tau_t <= 0.0 || self.tau_t > 1.0 {
            return Err(Error::InvalidParameter(format!(
                "tau_t must lie in (0, 1], got {}",
                self.tau_t
            )));
        }
        if !self.tau_s.is_finite() || self.tau_s <= 0.0 || self.tau_s >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "tau_s must lie in (0, 1), got {}",
                self.tau_s
            )));
        }
        if self.tau_s > self.tau_t {
            return Err(Error::InvalidParameter(format!(
                "tau_s ({}) must not exceed tau_t ({}) at the start",
                self.tau_s, self.tau_t
            )));
        }
        if !self.lambda_t.is_finite() || self.lambda_t < 0.0 {
            return Err(Error::InvalidParameter("lambda_t must be non-negative".into()));
        }
        if !self.lambda_s.is_finite() || self.lambda_s < 0.0 {
            return Err(Error::InvalidParameter("lambda_s must be non-negative".into()));
        }
        Ok(())
    }
}

/// One threshold step: the teacher threshold drops by `lambda_t`, the student
/// threshold climbs by `lambda_s`.
pub fn advance_thresholds(s: &ThresholdSchedule) -> ThresholdSchedule {
    ThresholdSchedule {
        tau_t: s.tau_t - s.lambda_t,
        tau_s: s.tau_s + s.lambda_s,
        ..*s
    }
}

/// One nominated pool instance: the teachers' shared label, the weaker
/// teacher's confidence in it, and the student's.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProxyEntry {
    pub instance_id: u64,
    pub label: Label,
    pub teacher_confidence: f64,
    pub student_confidence: f64,
}

/// Everything selected for one student in one iteration. Selection fills
/// `entries`; the run loop stamps `student_index` and `iteration`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProxyBatch {
    pub student_index: usize,
    pub iteration: usize,
    pub entries: Vec<ProxyEntry>,
}

impl ProxyBatch {
    fn empty() -> Self {
        ProxyBatch { student_index: 0, iteration: 0, entries: Vec::new() }
    }
}

/// Picks the pool instances one student can learn from: both teachers predict
/// the same label, the weaker teacher is still confident above `tau_t`, and
/// the student's own probability for that label sits below `tau_s` (both
/// comparisons strict). Output follows pool order.
pub fn select_teachable_samples<M: ProbabilisticClassifier>(
    pool: &[Instance],
    student: &M,
    teacher_a: &M,
    teacher_b: &M,
    tau_t: f64,
    tau_s: f64,
) -> Result<ProxyBatch> {
    let mut batch = ProxyBatch::empty();
    for instance in pool {
        let (label_a, prob_a) = teacher_a.predict_top(&instance.features)?;
        let (label_b, prob_b) = teacher_b.predict_top(&instance.features)?;
        if label_a != label_b {
            continue;
        }
        let teacher_confidence = prob_a.min(prob_b);
        if teacher_confidence <= tau_t {
            continue;
        }
        let student_probs = student.predict_proba(&instance.features)?;
        let student_confidence = student_probs[label_a.class_index];
        if student_confidence >= tau_s {
            continue;
        }
        batch.entries.push(ProxyEntry {
            instance_id: instance.id,
            label: label_a,
            teacher_confidence,
            student_confidence,
        });
    }
    Ok(batch)
}

/// Three classifiers voting together.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ensemble<M = Model> {
    models: [M; 3],
}

impl<M: ProbabilisticClassifier> Ensemble<M> {
    pub fn new(models: [M; 3]) -> Result<Self> {
        let classes = models[0].num_classes();
        let dim = models[0].feature_dim();
        for m in &models[1..] {
            if m.num_classes() != classes {
                return Err(Error::InvalidParameter(
                    "ensemble members disagree on the number of classes".into(),
                ));
            }
            if m.feature_dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: m.feature_dim(),
                });
            }
        }
        Ok(Ensemble { models })
    }

    pub fn models(&self) -> &[M; 3] {
        &self.models
    }

    pub fn num_classes(&self) -> usize {
        self.models[0].num_classes()
    }
}

/// Majority vote over the three members; when all disagree, the label with
/// the highest mean probability wins (lowest index on ties).
pub fn majority_vote<M: ProbabilisticClassifier>(
    ensemble: &Ensemble<M>,
    x: &Instance,
) -> Result<Label> {
    vote_models(&ensemble.models, x)
}

fn vote_models<M: ProbabilisticClassifier>(models: &[M; 3], x: &Instance) -> Result<Label> {
    let mut tops = [Label::new(0); 3];
    let mut mean = vec![0.0; models[0].num_classes()];
    for (slot, model) in tops.iter_mut().zip(models) {
        let probs = model.predict_proba(&x.features)?;
        for (acc, p) in mean.iter_mut().zip(&probs) {
            *acc += p / 3.0;
        }
        *slot = Label::new(argmax_lowest(&probs));
    }
    if tops[0] == tops[1] || tops[0] == tops[2] {
        return Ok(tops[0]);
    }
    if tops[1] == tops[2] {
        return Ok(tops[1]);
    }
    Ok(Label::new(argmax_lowest(&mean)))
}

/// Majority-vote predictions for a whole evaluation set.
pub fn predict_all<M: ProbabilisticClassifier>(
    ensemble: &Ensemble<M>,
    instances: &[(Instance, Label)],
) -> Result<Vec<Label>> {
    instances
        .iter()
        .map(|(instance, _)| majority_vote(ensemble, instance))
        .collect()
}

fn eval_vote_f1pn(
    models: &[Model; 3],
    validation: &[(Instance, Label)],
    num_classes: usize,
) -> Result<f64> {
    let mut predictions = Vec::with_capacity(validation.len());
    let mut truths = Vec::with_capacity(validation.len());
    for (instance, label) in validation {
        predictions.push(vote_models(models, instance)?);
        truths.push(*label);
    }
    crate::metrics::f1_pn(&predictions, &truths, num_classes)
}

fn eval_single_f1pn(
    model: &Model,
    validation: &[(Instance, Label)],
    num_classes: usize,
) -> Result<f64> {
    let mut predictions = Vec::with_capacity(validation.len());
    let mut truths = Vec::with_capacity(validation.len());
    for (instance, label) in validation {
        predictions.push(model.predict_top(&instance.features)?.0);
        truths.push(*label);
    }
    crate::metrics::f1_pn(&predictions, &truths, num_classes)
}

/// Trains the three starting models on bootstrap resamples of the labeled set.
fn bootstrap_models(
    spec: &LearnerSpec,
    labeled: &[(Instance, Label)],
    num_classes: usize,
    seed: u64,
) -> Result<[Model; 3]> {
    let mut models = Vec::with_capacity(3);
    for i in 0..3 {
        let sample = bootstrap_sample(labeled, mix(seed, role::BOOTSTRAP + i as u64))?;
        models.push(train_classifier(
            spec,
            &sample,
            num_classes,
            mix(seed, train_salt(0, i)),
        )?);
    }
    Ok(models.try_into().expect("exactly three models"))
}

/// Labeled set plus one batch of proxy-labeled pool instances.
fn augment(
    labeled: &[(Instance, Label)],
    batch: &ProxyBatch,
    by_id: &HashMap<u64, &Instance>,
) -> Vec<(Instance, Label)> {
    let mut out = labeled.to_vec();
    out.reserve(batch.entries.len());
    for entry in &batch.entries {
        let instance = by_id
            .get(&entry.instance_id)
            .expect("selected ids come from the pool");
        out.push(((*instance).clone(), entry.label));
    }
    out
}

/// Retrain seed salt for one (iteration, student) slot; iteration 0 is the
/// bootstrap round.
fn train_salt(iteration: usize, student: usize) -> u64 {
    role::TRAIN + (iteration * 3 + student) as u64
}

#[cfg(test)]
pub(crate) struct StubModel {
    pub rows: Vec<Vec<f64>>,
}

#[cfg(test)]
impl ProbabilisticClassifier for StubModel {
    fn num_classes(&self) -> usize {
        self.rows[0].len()
    }

    fn feature_dim(&self) -> usize {
        1
    }

    fn predict_proba(&self, features: &[f64]) -> Result<Vec<f64>> {
        Ok(self.rows[features[0] as usize].clone())
    }
}
