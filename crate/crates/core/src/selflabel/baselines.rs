//! Baseline self-labeling algorithms: single-model self-training and the two
//! tri-training variants with a fixed confidence threshold.

use std::collections::{HashMap, HashSet};

use crate::corpus::{Instance, Label};
use crate::learners::{train_classifier, LearnerSpec, Model, ProbabilisticClassifier};
use crate::seed::mix;
use crate::{Error, Result};

use super::{
    augment, bootstrap_models, eval_single_f1pn, eval_vote_f1pn, train_salt, Ensemble,
    IterationRecord, ProxyBatch, ProxyEntry, RunOptions, RunTrace, TerminalReason,
};

fn check_threshold(confidence_threshold: f64) -> Result<()> {
    if !confidence_threshold.is_finite() || !(0.0..=1.0).contains(&confidence_threshold) {
        return Err(Error::InvalidParameter(format!(
            "confidence_threshold must lie in [0, 1], got {confidence_threshold}"
        )));
    }
    Ok(())
}

/// Classic self-training: one model, trained on the full labeled set, labels
/// every pool instance it scores above the threshold, keeps those labels
/// permanently, and retrains. Stops when nothing qualifies. Both trace
/// threshold columns carry the static threshold.
pub fn run_self_training(
    spec: &LearnerSpec,
    confidence_threshold: f64,
    labeled: &[(Instance, Label)],
    pool: &[Instance],
    validation: Option<&[(Instance, Label)]>,
    options: &RunOptions,
) -> Result<(Model, RunTrace)> {
    spec.validate()?;
    check_threshold(confidence_threshold)?;
    let mut model = train_classifier(
        spec,
        labeled,
        options.num_classes,
        mix(options.seed, train_salt(0, 0)),
    )?;
    let mut remaining: Vec<Instance> = pool.to_vec();
    let mut proxies: Vec<(Instance, Label)> = Vec::new();
    let mut records: Vec<IterationRecord> = Vec::new();
    let mut iteration = 0;

    let terminal_reason = loop {
        if iteration >= options.max_iterations {
            break TerminalReason::MaxIterations;
        }
        iteration += 1;

        let mut batch = ProxyBatch { student_index: 0, iteration, entries: Vec::new() };
        let mut keep = Vec::with_capacity(remaining.len());
        for instance in remaining.drain(..) {
            let (label, confidence) = model.predict_top(&instance.features)?;
            if confidence > confidence_threshold {
                batch.entries.push(ProxyEntry {
                    instance_id: instance.id,
                    label,
                    teacher_confidence: confidence,
                    student_confidence: confidence,
                });
                proxies.push((instance, label));
            } else {
                keep.push(instance);
            }
        }
        remaining = keep;

        let selected_nothing = batch.entries.is_empty();
        if !selected_nothing {
            let mut training = labeled.to_vec();
            training.extend(proxies.iter().cloned());
            model = train_classifier(
                spec,
                &training,
                options.num_classes,
                mix(options.seed, train_salt(iteration, 0)),
            )?;
        }
        let val_f1pn = match validation {
            Some(v) => Some(eval_single_f1pn(&model, v, options.num_classes)?),
            None => None,
        };
        records.push(IterationRecord {
            iteration,
            tau_t: confidence_threshold,
            tau_s: confidence_threshold,
            batches: vec![batch],
            cumulative_unique: proxies.len(),
            val_f1pn,
        });
        if selected_nothing {
            break TerminalReason::NoTeachableSamples;
        }
    };

    Ok((model, RunTrace { iterations: records, terminal_reason }))
}

/// Which tri-training rule gates the selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriVariant {
    /// Two agreeing, sufficiently confident teachers are enough.
    Classic,
    /// Additionally the student's own top prediction must differ from the
    /// teachers' label.
    Disagreement,
}

impl TriVariant {
    pub fn name(self) -> &'static str {
        match self {
            TriVariant::Classic => "classic",
            TriVariant::Disagreement => "disagreement",
        }
    }
}

fn select_agreed(
    pool: &[Instance],
    student: &Model,
    teacher_a: &Model,
    teacher_b: &Model,
    confidence_threshold: f64,
    variant: TriVariant,
) -> Result<ProxyBatch> {
    let mut batch = ProxyBatch { student_index: 0, iteration: 0, entries: Vec::new() };
    for instance in pool {
        let (label_a, prob_a) = teacher_a.predict_top(&instance.features)?;
        let (label_b, prob_b) = teacher_b.predict_top(&instance.features)?;
        if label_a != label_b {
            continue;
        }
        let teacher_confidence = prob_a.min(prob_b);
        if teacher_confidence <= confidence_threshold {
            continue;
        }
        let (student_top, _) = student.predict_top(&instance.features)?;
        if variant == TriVariant::Disagreement && student_top == label_a {
            continue;
        }
        let student_confidence = student.predict_proba(&instance.features)?[label_a.class_index];
        batch.entries.push(ProxyEntry {
            instance_id: instance.id,
            label: label_a,
            teacher_confidence,
            student_confidence,
        });
    }
    Ok(batch)
}

/// Threshold-based tri-training. Selection for all three students runs against
/// the models as the iteration found them; students with an empty selection
/// keep their current model. Selections are not accumulated across iterations;
/// the consumption count is the union of everything ever selected.
pub fn run_tri_training(
    spec: &LearnerSpec,
    variant: TriVariant,
    confidence_threshold: f64,
    labeled: &[(Instance, Label)],
    pool: &[Instance],
    validation: Option<&[(Instance, Label)]>,
    options: &RunOptions,
) -> Result<(Ensemble, RunTrace)> {
    spec.validate()?;
    check_threshold(confidence_threshold)?;
    let mut models = bootstrap_models(spec, labeled, options.num_classes, options.seed)?;
    let by_id: HashMap<u64, &Instance> = pool.iter().map(|p| (p.id, p)).collect();
    let mut seen: HashSet<u64> = HashSet::new();
    let mut records: Vec<IterationRecord> = Vec::new();
    let mut iteration = 0;

    let terminal_reason = loop {
        if iteration >= options.max_iterations {
            break TerminalReason::MaxIterations;
        }
        iteration += 1;

        let mut batches: Vec<ProxyBatch> = Vec::with_capacity(3);
        for i in 0..3 {
            let mut batch = select_agreed(
                pool,
                &models[i],
                &models[(i + 1) % 3],
                &models[(i + 2) % 3],
                confidence_threshold,
                variant,
            )?;
            batch.student_index = i;
            batch.iteration = iteration;
            batches.push(batch);
        }
        for (i, batch) in batches.iter().enumerate() {
            if batch.entries.is_empty() {
                continue;
            }
            models[i] = train_classifier(
                spec,
                &augment(labeled, batch, &by_id),
                options.num_classes,
                mix(options.seed, train_salt(iteration, i)),
            )?;
        }

        for batch in &batches {
            seen.extend(batch.entries.iter().map(|e| e.instance_id));
        }
        let all_empty = batches.iter().all(|b| b.entries.is_empty());
        let val_f1pn = match validation {
            Some(v) => Some(eval_vote_f1pn(&models, v, options.num_classes)?),
            None => None,
        };
        records.push(IterationRecord {
            iteration,
            tau_t: confidence_threshold,
            tau_s: confidence_threshold,
            batches,
            cumulative_unique: seen.len(),
            val_f1pn,
        });
        if all_empty {
            break TerminalReason::NoTeachableSamples;
        }
    };

    Ok((
        Ensemble::new(models)?,
        RunTrace { iterations: records, terminal_reason },
    ))
}
