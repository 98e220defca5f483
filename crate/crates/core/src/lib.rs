//! Teacher-student tri-training (Tri-TS) for semi-supervised classification,
//! together with the self-labeling baselines it is usually compared against.
//!
//! The crate is organized around four pieces:
//!
//! - [`corpus`]: dataset ingestion (TSV + GloVe-format embeddings), sentence
//!   featurization by embedding averaging, reproducible label-rate splits with
//!   hidden ground truth, bootstrap resampling, and a synthetic Gaussian-blob
//!   generator for self-contained benchmarks.
//! - [`learners`]: three from-scratch probabilistic classifiers behind one
//!   interface — Gaussian naive Bayes, a multinomial logistic (softmax) linear
//!   classifier, and a one-hidden-layer MLP.
//! - [`selflabel`]: the Tri-TS loop with adaptive teacher/student thresholds
//!   and graduation-point stopping, plus self-training and classic/disagreement
//!   tri-training baselines. Every run produces a [`selflabel::RunTrace`].
//! - [`metrics`]: F1 over the positive and negative classes (F1PN), proxy-label
//!   quality against hidden ground truth, and unlabeled-data consumption curves.
//!
//! Everything is a deterministic function of its inputs and a seed.

pub mod corpus;
pub mod error;
pub mod learners;
pub mod metrics;
pub mod seed;
pub mod selflabel;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
