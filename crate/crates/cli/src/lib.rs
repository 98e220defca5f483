//! Experiment harness around the `tri-ts` library: configuration, the bundled
//! synthetic benchmark, the run/sweep drivers, and report assembly.

pub mod benchmark;
pub mod config;
pub mod harness;
pub mod report;
