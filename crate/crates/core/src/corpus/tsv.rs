//! TSV dataset files.
//!
//! Labeled records are `id<TAB>label<TAB>payload` where the payload is either
//! raw text (featurized at load time through an embedding table) or a
//! comma-separated feature vector for pre-featurized data. Labels are the
//! sentiment names `negative`/`neutral`/`positive`, a `class_<k>` name, or a
//! bare class index.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::{Error, Result};

use super::{featurize_sentence_with, CleaningOptions, EmbeddingTable, Instance, Label};

/// How the payload column of a labeled TSV is interpreted.
pub enum PayloadMode<'a> {
    /// Comma-separated decimals of a fixed dimension.
    Featurized,
    /// Raw text to be averaged over the embedding table.
    Text {
        table: &'a EmbeddingTable,
        cleaning: &'a CleaningOptions,
    },
}

/// Parses a label token.
pub fn parse_label(token: &str) -> Option<Label> {
    match token {
        "negative" => Some(Label::new(0)),
        "neutral" => Some(Label::new(1)),
        "positive" => Some(Label::new(2)),
        other => {
            let digits = other.strip_prefix("class_").unwrap_or(other);
            digits.parse::<usize>().ok().map(Label::new)
        }
    }
}

/// Canonical name for a class index: the sentiment names when there are three
/// classes, `class_<k>` otherwise.
pub fn class_name(label: Label, num_classes: usize) -> String {
    if num_classes == 3 {
        match label.class_index {
            0 => "negative".to_string(),
            1 => "neutral".to_string(),
            _ => "positive".to_string(),
        }
    } else {
        format!("class_{}", label.class_index)
    }
}

fn parse_features(path: &Path, line: usize, payload: &str) -> Result<Vec<f64>> {
    payload
        .split(',')
        .map(|v| {
            v.trim().parse::<f64>().map_err(|_| Error::Parse {
                path: path.display().to_string(),
                line,
                message: format!("invalid feature value {v:?}"),
            })
        })
        .collect()
}

/// Loads a labeled dataset file. Checks id uniqueness and that the feature
/// dimension is constant across the file.
pub fn load_labeled_tsv(path: &Path, mode: &PayloadMode<'_>) -> Result<Vec<(Instance, Label)>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut records = Vec::new();
    let mut seen_ids = HashSet::new();
    let mut dim: Option<usize> = None;
    for (idx, line) in reader.lines().enumerate() {
        let line_number = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            path: path.display().to_string(),
            line: line_number,
            message,
        };
        let mut cols = line.splitn(3, '\t');
        let id: u64 = cols
            .next()
            .and_then(|c| c.parse().ok())
            .ok_or_else(|| parse_err("missing or invalid id column".into()))?;
        let label = cols
            .next()
            .and_then(parse_label)
            .ok_or_else(|| parse_err("missing or invalid label column".into()))?;
        let payload = cols
            .next()
            .ok_or_else(|| parse_err("missing payload column".into()))?;
        if !seen_ids.insert(id) {
            return Err(parse_err(format!("duplicate id {id}")));
        }
        let instance = match mode {
            PayloadMode::Featurized => Instance::new(id, parse_features(path, line_number, payload)?),
            PayloadMode::Text { table, cleaning } => {
                let mut inst = Instance::new(id, featurize_sentence_with(payload, table, cleaning));
                inst.raw_text = Some(payload.to_string());
                inst
            }
        };
        match dim {
            None => dim = Some(instance.features.len()),
            Some(d) if d != instance.features.len() => {
                return Err(parse_err(format!(
                    "feature dimension {} differs from {d}",
                    instance.features.len()
                )));
            }
            _ => {}
        }
        records.push((instance, label));
    }
    if records.is_empty() {
        return Err(Error::EmptyInput(format!(
            "dataset file {} has no records",
            path.display()
        )));
    }
    Ok(records)
}

/// Loads an unlabeled file: `id<TAB>payload` per line.
pub fn load_unlabeled_tsv(path: &Path, mode: &PayloadMode<'_>) -> Result<Vec<Instance>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut records = Vec::new();
    let mut seen_ids = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_number = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            path: path.display().to_string(),
            line: line_number,
            message,
        };
        let mut cols = line.splitn(2, '\t');
        let id: u64 = cols
            .next()
            .and_then(|c| c.parse().ok())
            .ok_or_else(|| parse_err("missing or invalid id column".into()))?;
        let payload = cols
            .next()
            .ok_or_else(|| parse_err("missing payload column".into()))?;
        if !seen_ids.insert(id) {
            return Err(parse_err(format!("duplicate id {id}")));
        }
        let instance = match mode {
            PayloadMode::Featurized => Instance::new(id, parse_features(path, line_number, payload)?),
            PayloadMode::Text { table, cleaning } => {
                let mut inst = Instance::new(id, featurize_sentence_with(payload, table, cleaning));
                inst.raw_text = Some(payload.to_string());
                inst
            }
        };
        records.push(instance);
    }
    Ok(records)
}

fn format_features(features: &[f64]) -> String {
    features
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn payload_of(instance: &Instance) -> String {
    match &instance.raw_text {
        Some(text) => text.clone(),
        None => format_features(&instance.features),
    }
}

/// Writes a labeled dataset file (`id<TAB>label<TAB>payload`, LF endings).
pub fn write_labeled_tsv(
    path: &Path,
    records: &[(Instance, Label)],
    num_classes: usize,
) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for (instance, label) in records {
        writeln!(
            w,
            "{}\t{}\t{}",
            instance.id,
            class_name(*label, num_classes),
            payload_of(instance)
        )
        .map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes an unlabeled pool file (`id<TAB>payload`).
pub fn write_unlabeled_tsv(path: &Path, records: &[Instance]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for instance in records {
        writeln!(w, "{}\t{}", instance.id, payload_of(instance)).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes the hidden ground truth of a split (`id<TAB>label`), sorted by id.
pub fn write_hidden_labels_tsv(
    path: &Path,
    hidden: &std::collections::HashMap<u64, Label>,
    num_classes: usize,
) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut ids: Vec<u64> = hidden.keys().copied().collect();
    ids.sort_unstable();
    for id in ids {
        writeln!(w, "{}\t{}", id, class_name(hidden[&id], num_classes))
            .map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_parsing_covers_names_indices_and_class_prefix() {
        assert_eq!(parse_label("negative"), Some(Label::new(0)));
        assert_eq!(parse_label("neutral"), Some(Label::new(1)));
        assert_eq!(parse_label("positive"), Some(Label::new(2)));
        assert_eq!(parse_label("class_4"), Some(Label::new(4)));
        assert_eq!(parse_label("1"), Some(Label::new(1)));
        assert_eq!(parse_label("bogus"), None);
    }

    #[test]
    fn featurized_roundtrip_is_exact() {
        let records = vec![
            (Instance::new(0, vec![0.1, -2.5]), Label::new(0)),
            (Instance::new(1, vec![1.0 / 3.0, 7.25]), Label::new(2)),
        ];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.tsv");
        write_labeled_tsv(&path, &records, 3).unwrap();
        let loaded = load_labeled_tsv(&path, &PayloadMode::Featurized).unwrap();
        assert_eq!(loaded, records);
    }

    #[test]
    fn load_rejects_duplicate_ids_and_ragged_dimensions() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "0\tnegative\t1.0,2.0").unwrap();
        writeln!(f, "0\tpositive\t3.0,4.0").unwrap();
        assert!(load_labeled_tsv(f.path(), &PayloadMode::Featurized).is_err());

        let mut g = tempfile::NamedTempFile::new().unwrap();
        writeln!(g, "0\tnegative\t1.0,2.0").unwrap();
        writeln!(g, "1\tpositive\t3.0").unwrap();
        assert!(load_labeled_tsv(g.path(), &PayloadMode::Featurized).is_err());
    }

    #[test]
    fn text_mode_featurizes_through_the_table() {
        let table = EmbeddingTable::from_entries(
            2,
            vec![
                ("good".to_string(), vec![0.1, 0.2]),
                ("bad".to_string(), vec![-0.1, 0.0]),
            ],
        )
        .unwrap();
        let cleaning = CleaningOptions::default();
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "7\tpositive\tGOOD bad").unwrap();
        let records = load_labeled_tsv(
            f.path(),
            &PayloadMode::Text {
                table: &table,
                cleaning: &cleaning,
            },
        )
        .unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].1, Label::new(2));
        assert!((records[0].0.features[1] - 0.1).abs() < 1e-15);
        assert_eq!(records[0].0.raw_text.as_deref(), Some("GOOD bad"));
    }
}
