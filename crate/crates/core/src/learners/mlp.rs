//! One-hidden-layer MLP: ReLU hidden activation, softmax output, full-batch
//! gradient descent. Parameters are exposed as a flat vector so gradients can
//! be checked against finite differences.

use rand::distributions::{Distribution, Uniform};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

use super::{log_sum_exp, softmax, LearnerSpec, ProbabilisticClassifier};

/// Feed-forward network with one hidden layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpNet {
    w1: Vec<Vec<f64>>,
    b1: Vec<f64>,
    w2: Vec<Vec<f64>>,
    b2: Vec<f64>,
    l2_penalty: f64,
}

struct Grads {
    w1: Vec<Vec<f64>>,
    b1: Vec<f64>,
    w2: Vec<Vec<f64>>,
    b2: Vec<f64>,
}

impl MlpNet {
    /// Glorot-uniform initialized, untrained network.
    pub fn glorot_init(
        num_classes: usize,
        dim: usize,
        hidden_units: usize,
        l2_penalty: f64,
        seed: u64,
    ) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut layer = |rows: usize, cols: usize| -> Vec<Vec<f64>> {
            let limit = (6.0 / (rows + cols) as f64).sqrt();
            let dist = Uniform::new_inclusive(-limit, limit);
            (0..rows)
                .map(|_| (0..cols).map(|_| dist.sample(&mut rng)).collect())
                .collect()
        };
        let w1 = layer(hidden_units, dim);
        let w2 = layer(num_classes, hidden_units);
        MlpNet {
            w1,
            b1: vec![0.0; hidden_units],
            w2,
            b2: vec![0.0; num_classes],
            l2_penalty,
        }
    }

    pub(super) fn fit(
        samples: &[(&[f64], usize)],
        num_classes: usize,
        dim: usize,
        spec: &LearnerSpec,
        seed: u64,
    ) -> Self {
        let mut net =
            MlpNet::glorot_init(num_classes, dim, spec.hidden_units, spec.l2_penalty, seed);
        for _ in 0..spec.epochs {
            let grads = net.grads(samples);
            net.apply(&grads, spec.learning_rate);
        }
        net
    }

    fn apply(&mut self, grads: &Grads, learning_rate: f64) {
        let step = |w: &mut Vec<Vec<f64>>, g: &Vec<Vec<f64>>| {
            for (row, grow) in w.iter_mut().zip(g) {
                for (v, gv) in row.iter_mut().zip(grow) {
                    *v -= learning_rate * gv;
                }
            }
        };
        step(&mut self.w1, &grads.w1);
        step(&mut self.w2, &grads.w2);
        for (v, g) in self.b1.iter_mut().zip(&grads.b1) {
            *v -= learning_rate * g;
        }
        for (v, g) in self.b2.iter_mut().zip(&grads.b2) {
            *v -= learning_rate * g;
        }
    }

    fn hidden(&self, features: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let pre: Vec<f64> = self
            .w1
            .iter()
            .zip(&self.b1)
            .map(|(row, b)| b + row.iter().zip(features).map(|(w, x)| w * x).sum::<f64>())
            .collect();
        let act = pre.iter().map(|z| z.max(0.0)).collect();
        (pre, act)
    }

    fn logits_from_hidden(&self, act: &[f64]) -> Vec<f64> {
        self.w2
            .iter()
            .zip(&self.b2)
            .map(|(row, b)| b + row.iter().zip(act).map(|(w, h)| w * h).sum::<f64>())
            .collect()
    }

    fn grads<S: AsRef<[f64]>>(&self, samples: &[(S, usize)]) -> Grads {
        let hidden_units = self.b1.len();
        let num_classes = self.b2.len();
        let dim = self.w1[0].len();
        let mut g = Grads {
            w1: vec![vec![0.0; dim]; hidden_units],
            b1: vec![0.0; hidden_units],
            w2: vec![vec![0.0; hidden_units]; num_classes],
            b2: vec![0.0; num_classes],
        };
        let n = samples.len() as f64;
        for (features, class) in samples {
            let x = features.as_ref();
            let (pre, act) = self.hidden(x);
            let mut dlogits = softmax(&self.logits_from_hidden(&act));
            dlogits[*class] -= 1.0;
            for (c, dl) in dlogits.iter().enumerate() {
                for (gw, h) in g.w2[c].iter_mut().zip(&act) {
                    *gw += dl * h;
                }
                g.b2[c] += dl;
            }
            for h in 0..hidden_units {
                if pre[h] <= 0.0 {
                    continue;
                }
                let dz: f64 = dlogits.iter().zip(&self.w2).map(|(dl, row)| dl * row[h]).sum();
                for (gw, xv) in g.w1[h].iter_mut().zip(x) {
                    *gw += dz * xv;
                }
                g.b1[h] += dz;
            }
        }
        for (grow, wrow) in g.w1.iter_mut().zip(&self.w1) {
            for (gv, wv) in grow.iter_mut().zip(wrow) {
                *gv = *gv / n + self.l2_penalty * wv;
            }
        }
        for (grow, wrow) in g.w2.iter_mut().zip(&self.w2) {
            for (gv, wv) in grow.iter_mut().zip(wrow) {
                *gv = *gv / n + self.l2_penalty * wv;
            }
        }
        for gv in g.b1.iter_mut().chain(g.b2.iter_mut()) {
            *gv /= n;
        }
        g
    }

    /// Mean cross-entropy over `samples` plus the L2 term on the weights,
    /// matching the objective the gradients descend.
    pub fn loss<S: AsRef<[f64]>>(&self, samples: &[(S, usize)]) -> f64 {
        let mut total = 0.0;
        for (features, class) in samples {
            let (_, act) = self.hidden(features.as_ref());
            let logits = self.logits_from_hidden(&act);
            total += log_sum_exp(&logits) - logits[*class];
        }
        let sq = |w: &Vec<Vec<f64>>| -> f64 {
            w.iter().flat_map(|row| row.iter().map(|v| v * v)).sum()
        };
        total / samples.len() as f64 + 0.5 * self.l2_penalty * (sq(&self.w1) + sq(&self.w2))
    }

    /// Analytic gradient of [`MlpNet::loss`], flattened in [`MlpNet::param_vector`] order.
    pub fn loss_gradient<S: AsRef<[f64]>>(&self, samples: &[(S, usize)]) -> Vec<f64> {
        let g = self.grads(samples);
        flatten(&g.w1, &g.b1, &g.w2, &g.b2)
    }

    /// All parameters as one vector: w1 rows, b1, w2 rows, b2.
    pub fn param_vector(&self) -> Vec<f64> {
        flatten(&self.w1, &self.b1, &self.w2, &self.b2)
    }

    /// Replaces all parameters from a vector laid out as [`MlpNet::param_vector`].
    pub fn set_param_vector(&mut self, params: &[f64]) -> Result<()> {
        let expected = self.param_vector().len();
        if params.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: params.len(),
            });
        }
        let mut it = params.iter().copied();
        for row in self.w1.iter_mut() {
            for v in row.iter_mut() {
                *v = it.next().unwrap();
            }
        }
        for v in self.b1.iter_mut() {
            *v = it.next().unwrap();
        }
        for row in self.w2.iter_mut() {
            for v in row.iter_mut() {
                *v = it.next().unwrap();
            }
        }
        for v in self.b2.iter_mut() {
            *v = it.next().unwrap();
        }
        Ok(())
    }
}

fn flatten(w1: &[Vec<f64>], b1: &[f64], w2: &[Vec<f64>], b2: &[f64]) -> Vec<f64> {
    w1.iter()
        .flatten()
        .chain(b1.iter())
        .chain(w2.iter().flatten())
        .chain(b2.iter())
        .copied()
        .collect()
}

impl ProbabilisticClassifier for MlpNet {
    fn num_classes(&self) -> usize {
        self.b2.len()
    }

    fn feature_dim(&self) -> usize {
        self.w1[0].len()
    }

    fn predict_proba(&self, features: &[f64]) -> Result<Vec<f64>> {
        if features.len() != self.feature_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.feature_dim(),
                actual: features.len(),
            });
        }
        let (_, act) = self.hidden(features);
        Ok(softmax(&self.logits_from_hidden(&act)))
    }
}

/// Largest relative difference between analytic and central finite-difference
/// gradients over every parameter.
pub fn gradient_error(net: &MlpNet, samples: &[(Vec<f64>, usize)]) -> f64 {
    const STEP: f64 = 1e-5;
    let analytic = net.loss_gradient(samples);
    let base = net.param_vector();
    let mut probe = net.clone();
    let mut worst = 0.0f64;
    for i in 0..base.len() {
        let mut params = base.clone();
        params[i] = base[i] + STEP;
        probe.set_param_vector(&params).unwrap();
        let plus = probe.loss(samples);
        params[i] = base[i] - STEP;
        probe.set_param_vector(&params).unwrap();
        let minus = probe.loss(samples);
        let numeric = (plus - minus) / (2.0 * STEP);
        let denom = 1.0f64.max(analytic[i].abs()).max(numeric.abs());
        worst = worst.max((analytic[i] - numeric).abs() / denom);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::super::tests::training_accuracy;
    use super::super::{train_classifier, LearnerSpec};
    use super::*;
    use crate::corpus::{Instance, Label};
    use rand_distr::StandardNormal;

    fn xor_data() -> Vec<(Instance, Label)> {
        vec![
            (Instance::new(0, vec![0.0, 0.0]), Label::new(0)),
            (Instance::new(1, vec![0.0, 1.0]), Label::new(1)),
            (Instance::new(2, vec![1.0, 0.0]), Label::new(1)),
            (Instance::new(3, vec![1.0, 1.0]), Label::new(0)),
        ]
    }

    #[test]
    fn a_two_unit_network_solving_xor_exists() {
        let net = MlpNet {
            w1: vec![vec![1.0, 1.0], vec![1.0, 1.0]],
            b1: vec![-0.5, -1.5],
            w2: vec![vec![0.0, 0.0], vec![1.0, -3.0]],
            b2: vec![0.0, 0.0],
            l2_penalty: 0.0,
        };
        for (instance, label) in xor_data() {
            let (top, _) = net.predict_top(&instance.features).unwrap();
            assert_eq!(top, label);
        }
    }

    #[test]
    fn training_solves_xor_within_the_epoch_budget() {
        let spec = LearnerSpec {
            epochs: 2000,
            learning_rate: 0.5,
            l2_penalty: 0.0,
            ..LearnerSpec::mlp()
        };
        let data = xor_data();
        let model = train_classifier(&spec, &data, 2, 4).unwrap();
        assert_eq!(training_accuracy(&model, &data), 1.0);
    }

    #[test]
    fn analytic_gradients_match_finite_differences() {
        use rand_distr::Distribution as _;
        for seed in 0..5u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let dim = 1 + (seed as usize % 5);
            let hidden = 2 + (seed as usize % 7);
            let classes = 2 + (seed as usize % 3);
            let l2 = if seed % 2 == 0 { 0.0 } else { 0.01 };
            let net = MlpNet::glorot_init(classes, dim, hidden, l2, seed.wrapping_add(99));
            let samples: Vec<(Vec<f64>, usize)> = (0..12)
                .map(|i| {
                    let x: Vec<f64> =
                        (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
                    (x, i % classes)
                })
                .collect();
            let err = gradient_error(&net, &samples);
            assert!(err <= 1e-4, "seed {seed}: gradient error {err}");
        }
    }

    #[test]
    fn param_vector_round_trips() {
        let mut net = MlpNet::glorot_init(3, 4, 5, 0.0, 8);
        let params = net.param_vector();
        assert_eq!(params.len(), 5 * 4 + 5 + 3 * 5 + 3);
        let doubled: Vec<f64> = params.iter().map(|v| v * 2.0).collect();
        net.set_param_vector(&doubled).unwrap();
        assert_eq!(net.param_vector(), doubled);
        assert!(net.set_param_vector(&params[1..]).is_err());
    }

    #[test]
    fn training_is_deterministic_per_seed() {
        let data = xor_data();
        let spec = LearnerSpec { epochs: 50, ..LearnerSpec::mlp() };
        use crate::learners::ProbabilisticClassifier as _;
        let a = train_classifier(&spec, &data, 2, 3).unwrap();
        let b = train_classifier(&spec, &data, 2, 3).unwrap();
        let c = train_classifier(&spec, &data, 2, 4).unwrap();
        let probe = [0.25, 0.75];
        assert_eq!(a.predict_proba(&probe).unwrap(), b.predict_proba(&probe).unwrap());
        assert_ne!(a.predict_proba(&probe).unwrap(), c.predict_proba(&probe).unwrap());
    }
}
