//! Evaluation: F1 over the positive and negative classes, proxy-label quality
//! against hidden ground truth, and consumption curves.
//!
//! Class convention: index 0 is the negative class and the highest index is
//! the positive class, matching the three-way sentiment layout
//! negative/neutral/positive.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::selflabel::RunTrace;
use crate::{Error, Result};

/// Gold-by-predicted count matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionCounts {
    matrix: Vec<Vec<usize>>,
}

impl ConfusionCounts {
    pub fn from_pairs(
        predictions: &[Label],
        gold: &[Label],
        num_classes: usize,
    ) -> Result<Self> {
        if predictions.len() != gold.len() {
            return Err(Error::LengthMismatch {
                left: predictions.len(),
                right: gold.len(),
            });
        }
        if predictions.is_empty() {
            return Err(Error::EmptyInput("no prediction pairs to score".into()));
        }
        let mut matrix = vec![vec![0usize; num_classes]; num_classes];
        for (pred, truth) in predictions.iter().zip(gold) {
            if pred.class_index >= num_classes || truth.class_index >= num_classes {
                return Err(Error::InvalidParameter(format!(
                    "label out of range for {num_classes} classes"
                )));
            }
            matrix[truth.class_index][pred.class_index] += 1;
        }
        Ok(ConfusionCounts { matrix })
    }

    pub fn total(&self) -> usize {
        self.matrix.iter().flatten().sum()
    }

    fn true_positives(&self, class: usize) -> usize {
        self.matrix[class][class]
    }

    fn predicted(&self, class: usize) -> usize {
        self.matrix.iter().map(|row| row[class]).sum()
    }

    fn gold(&self, class: usize) -> usize {
        self.matrix[class].iter().sum()
    }

    /// 2PR/(P+R) with every zero denominator collapsing to 0.
    pub fn f1(&self, class: usize) -> f64 {
        let tp = self.true_positives(class) as f64;
        let predicted = self.predicted(class) as f64;
        let gold = self.gold(class) as f64;
        if predicted == 0.0 || gold == 0.0 {
            return 0.0;
        }
        let precision = tp / predicted;
        let recall = tp / gold;
        if precision + recall == 0.0 {
            return 0.0;
        }
        2.0 * precision * recall / (precision + recall)
    }
}

/// Mean of the F1 scores of the negative class (index 0) and the positive
/// class (highest index). Intermediate classes are excluded from the average
/// but still shape precision through their misclassifications.
pub fn f1_pn(predictions: &[Label], gold: &[Label], num_classes: usize) -> Result<f64> {
    if num_classes < 2 {
        return Err(Error::InvalidParameter(format!(
            "num_classes must be at least 2, got {num_classes}"
        )));
    }
    let counts = ConfusionCounts::from_pairs(predictions, gold, num_classes)?;
    Ok((counts.f1(0) + counts.f1(num_classes - 1)) / 2.0)
}

/// Share of proxy-label assignments that match the hidden ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProxyQuality {
    /// 100 · matches/total; 100 by convention when nothing was assigned.
    pub percent: f64,
    pub matches: usize,
    pub total: usize,
    /// True when the trace assigned no proxy labels at all.
    pub empty_trace: bool,
}

/// Scores every proxy-label assignment in the trace against the hidden
/// labels. An instance selected in several iterations (or for several
/// students) is counted once per assignment.
pub fn proxy_label_quality(
    trace: &RunTrace,
    hidden_labels: &HashMap<u64, Label>,
) -> Result<ProxyQuality> {
    let mut matches = 0usize;
    let mut total = 0usize;
    for batch in trace.batches() {
        for entry in &batch.entries {
            let truth = hidden_labels
                .get(&entry.instance_id)
                .ok_or(Error::MissingHiddenLabel(entry.instance_id))?;
            total += 1;
            if *truth == entry.label {
                matches += 1;
            }
        }
    }
    if total == 0 {
        return Ok(ProxyQuality { percent: 100.0, matches: 0, total: 0, empty_trace: true });
    }
    Ok(ProxyQuality {
        percent: 100.0 * matches as f64 / total as f64,
        matches,
        total,
        empty_trace: false,
    })
}

/// One consumption-curve point: how many unique pool instances had been
/// absorbed by the end of an iteration, and the validation score then.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub cumulative_unique_samples: usize,
    pub f1pn: f64,
}

/// Pairs each iteration's cumulative unique consumption with its validation
/// score. Requires a trace recorded with a validation set.
pub fn consumption_curve(trace: &RunTrace) -> Result<Vec<CurvePoint>> {
    trace
        .iterations
        .iter()
        .map(|rec| match rec.val_f1pn {
            Some(f1pn) => Ok(CurvePoint {
                cumulative_unique_samples: rec.cumulative_unique,
                f1pn,
            }),
            None => Err(Error::InvalidParameter(format!(
                "iteration {} carries no validation score; run with a validation set",
                rec.iteration
            ))),
        })
        .collect()
}

/// CSV rendering of a curve: `cumulative_samples,f1pn`.
pub fn curve_to_csv(points: &[CurvePoint]) -> String {
    let mut out = String::from("cumulative_samples,f1pn\n");
    for p in points {
        let _ = writeln!(out, "{},{}", p.cumulative_unique_samples, p.f1pn);
    }
    out
}

pub fn write_curve_csv(points: &[CurvePoint], path: &Path) -> Result<()> {
    let mut file = File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(curve_to_csv(points).as_bytes())
        .map_err(|e| Error::io(path, e))
}
