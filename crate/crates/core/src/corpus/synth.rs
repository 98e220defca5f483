//! Gaussian blob generator for self-contained benchmarks.
//!
//! Classes are isotropic Gaussians whose means sit equally spaced on a circle
//! in the first two feature dimensions, so class overlap is controlled by a
//! single separation knob.

use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{Error, Result};

use super::{Instance, Label};

/// Shape of a synthetic blob dataset.
#[derive(Debug, Clone)]
pub struct SynthParams {
    /// Total number of points across all classes.
    pub num_points: usize,
    /// Feature dimension, at least 2 (the means live in the first two).
    pub dimension: usize,
    /// Relative class priors; length fixes the number of classes.
    pub class_weights: Vec<f64>,
    /// Radius of the circle the class means are placed on.
    pub separation: f64,
    /// Per-coordinate standard deviation of each blob.
    pub noise: f64,
}

impl SynthParams {
    fn validate(&self) -> Result<()> {
        if self.num_points == 0 {
            return Err(Error::InvalidParameter("num_points must be positive".into()));
        }
        if self.dimension < 2 {
            return Err(Error::InvalidParameter(format!(
                "dimension must be at least 2, got {}",
                self.dimension
            )));
        }
        if self.class_weights.len() < 2 {
            return Err(Error::InvalidParameter(
                "at least 2 class weights are required".into(),
            ));
        }
        if self.class_weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::InvalidParameter(
                "class weights must be positive and finite".into(),
            ));
        }
        if !self.separation.is_finite() || self.separation < 0.0 {
            return Err(Error::InvalidParameter(
                "separation must be non-negative".into(),
            ));
        }
        if !self.noise.is_finite() || self.noise <= 0.0 {
            return Err(Error::InvalidParameter("noise must be positive".into()));
        }
        Ok(())
    }
}

/// Splits `total` across classes proportionally to `weights` using largest
/// remainders, so the counts are exact and sum to `total`. Ties go to the
/// lower class index.
fn allocate_counts(total: usize, weights: &[f64]) -> Vec<usize> {
    let weight_sum: f64 = weights.iter().sum();
    let quotas: Vec<f64> = weights
        .iter()
        .map(|w| total as f64 * w / weight_sum)
        .collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = quotas[a] - quotas[a].floor();
        let fb = quotas[b] - quotas[b].floor();
        fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
    });
    for &class in order.iter().take(total - assigned) {
        counts[class] += 1;
    }
    counts
}

fn class_mean(class: usize, num_classes: usize, dimension: usize, separation: f64) -> Vec<f64> {
    let angle = 2.0 * std::f64::consts::PI * class as f64 / num_classes as f64;
    let mut mean = vec![0.0; dimension];
    mean[0] = separation * angle.cos();
    mean[1] = separation * angle.sin();
    mean
}

/// Generates a labeled blob dataset. Points are shuffled so classes interleave
/// and ids run 0..n in output order. Identical inputs produce identical output.
pub fn generate_blobs(params: &SynthParams, seed: u64) -> Result<Vec<(Instance, Label)>> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let num_classes = params.class_weights.len();
    let counts = allocate_counts(params.num_points, &params.class_weights);
    let mut points: Vec<(Vec<f64>, Label)> = Vec::with_capacity(params.num_points);
    for (class, &count) in counts.iter().enumerate() {
        let mean = class_mean(class, num_classes, params.dimension, params.separation);
        for _ in 0..count {
            let features: Vec<f64> = mean
                .iter()
                .map(|m| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    m + params.noise * z
                })
                .collect();
            points.push((features, Label::new(class)));
        }
    }
    points.shuffle(&mut rng);
    Ok(points
        .into_iter()
        .enumerate()
        .map(|(id, (features, label))| (Instance::new(id as u64, features), label))
        .collect())
}
