//! Multinomial logistic regression trained with mini-batch gradient descent.
//! Serves as the probability-emitting linear family.

use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

use super::{softmax, LearnerSpec, ProbabilisticClassifier};

const BATCH: usize = 32;

/// Linear softmax classifier: one weight row and bias per class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoftmaxRegression {
    weights: Vec<Vec<f64>>,
    bias: Vec<f64>,
}

impl SoftmaxRegression {
    pub(super) fn fit(
        samples: &[(&[f64], usize)],
        num_classes: usize,
        dim: usize,
        spec: &LearnerSpec,
        seed: u64,
    ) -> Self {
        let mut model = SoftmaxRegression {
            weights: vec![vec![0.0; dim]; num_classes],
            bias: vec![0.0; num_classes],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (0..samples.len()).collect();
        let mut grad_w = vec![vec![0.0; dim]; num_classes];
        let mut grad_b = vec![0.0; num_classes];
        for _ in 0..spec.epochs {
            order.shuffle(&mut rng);
            for batch in order.chunks(BATCH) {
                for row in &mut grad_w {
                    row.iter_mut().for_each(|g| *g = 0.0);
                }
                grad_b.iter_mut().for_each(|g| *g = 0.0);
                for &idx in batch {
                    let (features, class) = samples[idx];
                    let probs = softmax(&model.logits(features));
                    for c in 0..num_classes {
                        let coeff = probs[c] - if c == class { 1.0 } else { 0.0 };
                        for (g, x) in grad_w[c].iter_mut().zip(features) {
                            *g += coeff * x;
                        }
                        grad_b[c] += coeff;
                    }
                }
                let scale = 1.0 / batch.len() as f64;
                for c in 0..num_classes {
                    for (w, g) in model.weights[c].iter_mut().zip(&grad_w[c]) {
                        *w -= spec.learning_rate * (g * scale + spec.l2_penalty * *w);
                    }
                    model.bias[c] -= spec.learning_rate * grad_b[c] * scale;
                }
            }
        }
        model
    }

    fn logits(&self, features: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.bias)
            .map(|(row, b)| b + row.iter().zip(features).map(|(w, x)| w * x).sum::<f64>())
            .collect()
    }
}

impl ProbabilisticClassifier for SoftmaxRegression {
    fn num_classes(&self) -> usize {
        self.bias.len()
    }

    fn feature_dim(&self) -> usize {
        self.weights[0].len()
    }

    fn predict_proba(&self, features: &[f64]) -> Result<Vec<f64>> {
        if features.len() != self.feature_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.feature_dim(),
                actual: features.len(),
            });
        }
        Ok(softmax(&self.logits(features)))
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::training_accuracy;
    use super::super::{train_classifier, LearnerSpec};
    use super::*;
    use crate::corpus::{Instance, Label};
    use rand_distr::{Distribution, StandardNormal};

    fn tight_blobs(n_per_class: usize, seed: u64) -> Vec<(Instance, Label)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut data = Vec::new();
        for class in 0..2usize {
            let center = if class == 0 { [-2.0, -2.0] } else { [2.0, 2.0] };
            for i in 0..n_per_class {
                let features: Vec<f64> = center
                    .iter()
                    .map(|c| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        c + 0.3 * z
                    })
                    .collect();
                data.push((
                    Instance::new((class * n_per_class + i) as u64, features),
                    Label::new(class),
                ));
            }
        }
        data
    }

    /// Sweeps 1-degree directions looking for a projection that splits the
    /// two classes with a clean gap.
    fn linearly_separable(data: &[(Instance, Label)]) -> bool {
        (0..360).any(|deg| {
            let theta = f64::from(deg).to_radians();
            let (wx, wy) = (theta.cos(), theta.sin());
            let mut max0 = f64::NEG_INFINITY;
            let mut min1 = f64::INFINITY;
            for (instance, label) in data {
                let proj = wx * instance.features[0] + wy * instance.features[1];
                if label.class_index == 0 {
                    max0 = max0.max(proj);
                } else {
                    min1 = min1.min(proj);
                }
            }
            max0 < min1
        })
    }

    #[test]
    fn zero_weights_emit_a_uniform_distribution() {
        let model = SoftmaxRegression {
            weights: vec![vec![0.0; 4]; 3],
            bias: vec![0.0; 3],
        };
        let probs = model.predict_proba(&[1.0, -2.0, 0.5, 3.0]).unwrap();
        for p in &probs {
            assert!((p - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn separable_data_reaches_perfect_training_accuracy() {
        let data = tight_blobs(40, 23);
        assert!(linearly_separable(&data), "fixture data must be separable");
        let spec = LearnerSpec { epochs: 200, ..LearnerSpec::linear() };
        let model = train_classifier(&spec, &data, 2, 11).unwrap();
        assert_eq!(training_accuracy(&model, &data), 1.0);
    }

    #[test]
    fn training_is_deterministic_per_seed() {
        let data = tight_blobs(30, 5);
        let spec = LearnerSpec { epochs: 40, ..LearnerSpec::linear() };
        use crate::learners::ProbabilisticClassifier as _;
        let a = train_classifier(&spec, &data, 2, 77).unwrap();
        let b = train_classifier(&spec, &data, 2, 77).unwrap();
        let c = train_classifier(&spec, &data, 2, 78).unwrap();
        let probe = [0.4, -1.3];
        assert_eq!(
            a.predict_proba(&probe).unwrap(),
            b.predict_proba(&probe).unwrap()
        );
        assert_ne!(
            a.predict_proba(&probe).unwrap(),
            c.predict_proba(&probe).unwrap()
        );
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let data = tight_blobs(10, 1);
        let spec = LearnerSpec { epochs: 5, ..LearnerSpec::linear() };
        let model = train_classifier(&spec, &data, 2, 0).unwrap();
        use crate::learners::ProbabilisticClassifier as _;
        assert!(model.predict_proba(&[1.0, 2.0, 3.0]).is_err());
    }
}
