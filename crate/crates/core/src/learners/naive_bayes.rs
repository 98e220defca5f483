//! Gaussian naive Bayes with per-class diagonal variances.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

use super::{softmax, ProbabilisticClassifier};

/// Closed-form Gaussian naive Bayes. Priors are class frequencies; a class
/// absent from training keeps prior 0 and never wins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianNb {
    priors: Vec<f64>,
    means: Vec<Vec<f64>>,
    variances: Vec<Vec<f64>>,
}

impl GaussianNb {
    pub(super) fn fit(
        samples: &[(&[f64], usize)],
        num_classes: usize,
        dim: usize,
        variance_smoothing: f64,
    ) -> Self {
        let n = samples.len() as f64;
        let mut counts = vec![0usize; num_classes];
        let mut means = vec![vec![0.0; dim]; num_classes];
        for (features, class) in samples {
            counts[*class] += 1;
            for (m, x) in means[*class].iter_mut().zip(*features) {
                *m += x;
            }
        }
        for (class, count) in counts.iter().enumerate() {
            if *count > 0 {
                for m in &mut means[class] {
                    *m /= *count as f64;
                }
            }
        }
        let mut variances = vec![vec![0.0; dim]; num_classes];
        for (features, class) in samples {
            for (v, (x, m)) in variances[*class]
                .iter_mut()
                .zip(features.iter().zip(&means[*class]))
            {
                *v += (x - m) * (x - m);
            }
        }
        for (class, count) in counts.iter().enumerate() {
            if *count > 0 {
                for v in &mut variances[class] {
                    *v /= *count as f64;
                }
            }
        }

        // Smoothing scale: the largest per-feature variance of the whole
        // training set, so it adapts to the data's units.
        let mut global_mean = vec![0.0; dim];
        for (features, _) in samples {
            for (g, x) in global_mean.iter_mut().zip(*features) {
                *g += x;
            }
        }
        for g in &mut global_mean {
            *g /= n;
        }
        let mut max_var = 0.0f64;
        for d in 0..dim {
            let var: f64 = samples
                .iter()
                .map(|(features, _)| {
                    let diff = features[d] - global_mean[d];
                    diff * diff
                })
                .sum::<f64>()
                / n;
            max_var = max_var.max(var);
        }
        let eps = if max_var > 0.0 {
            variance_smoothing * max_var
        } else {
            variance_smoothing
        };
        for class_vars in &mut variances {
            for v in class_vars {
                *v += eps;
            }
        }

        let priors = counts.iter().map(|c| *c as f64 / n).collect();
        GaussianNb { priors, means, variances }
    }
}

impl ProbabilisticClassifier for GaussianNb {
    fn num_classes(&self) -> usize {
        self.priors.len()
    }

    fn feature_dim(&self) -> usize {
        self.means[0].len()
    }

    fn predict_proba(&self, features: &[f64]) -> Result<Vec<f64>> {
        if features.len() != self.feature_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.feature_dim(),
                actual: features.len(),
            });
        }
        const LN_2PI: f64 = 1.8378770664093453;
        let log_scores: Vec<f64> = (0..self.num_classes())
            .map(|class| {
                let mut score = self.priors[class].ln();
                for ((x, m), v) in features
                    .iter()
                    .zip(&self.means[class])
                    .zip(&self.variances[class])
                {
                    score -= 0.5 * (LN_2PI + v.ln() + (x - m) * (x - m) / v);
                }
                score
            })
            .collect();
        Ok(softmax(&log_scores))
    }
}
