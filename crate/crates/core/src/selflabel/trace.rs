//! Run traces: what every iteration selected, under which thresholds, and why
//! the run stopped.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs::File;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

use super::ProxyBatch;

/// Why a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalReason {
    /// The student threshold crossed above the teacher threshold.
    Graduated,
    /// An iteration selected nothing for any student.
    NoTeachableSamples,
    /// The safety cap was reached first.
    MaxIterations,
}

impl TerminalReason {
    pub fn as_str(self) -> &'static str {
        match self {
            TerminalReason::Graduated => "graduated",
            TerminalReason::NoTeachableSamples => "no_teachable_samples",
            TerminalReason::MaxIterations => "max_iterations",
        }
    }
}

/// One outer-loop iteration: the thresholds in effect while selecting (before
/// that iteration's advance), each student's batch, the unique-instance count
/// consumed so far, and the validation score if a validation set was given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub tau_t: f64,
    pub tau_s: f64,
    pub batches: Vec<ProxyBatch>,
    pub cumulative_unique: usize,
    pub val_f1pn: Option<f64>,
}

/// Full history of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub iterations: Vec<IterationRecord>,
    pub terminal_reason: TerminalReason,
}

impl RunTrace {
    /// All proxy-label batches in selection order.
    pub fn batches(&self) -> impl Iterator<Item = &ProxyBatch> {
        self.iterations.iter().flat_map(|rec| rec.batches.iter())
    }

    /// Count of distinct pool instances ever selected.
    pub fn total_unique_consumed(&self) -> usize {
        self.iterations.last().map_or(0, |rec| rec.cumulative_unique)
    }

    /// CSV rendering: one row per (iteration, student) and a footer row naming
    /// the terminal reason. The cumulative column counts unique instance ids
    /// through each batch in order.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("iteration,student,tau_t,tau_s,batch_size,cumulative_unique,val_f1pn\n");
        let mut seen: HashSet<u64> = HashSet::new();
        for rec in &self.iterations {
            for batch in &rec.batches {
                seen.extend(batch.entries.iter().map(|e| e.instance_id));
                let val = rec.val_f1pn.map_or(String::new(), |v| v.to_string());
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    rec.iteration,
                    batch.student_index,
                    rec.tau_t,
                    rec.tau_s,
                    batch.entries.len(),
                    seen.len(),
                    val
                );
            }
        }
        let _ = writeln!(out, "terminal_reason,{}", self.terminal_reason.as_str());
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut file = File::create(path).map_err(|e| Error::io(path, e))?;
        file.write_all(self.to_csv_string().as_bytes())
            .map_err(|e| Error::io(path, e))
    }
}
