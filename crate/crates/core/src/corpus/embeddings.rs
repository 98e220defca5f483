//! GloVe-format embedding tables and sentence featurization.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

use super::FeatureVector;

/// Token -> vector lookup table. Immutable after load; every vector has
/// length `dimension`.
#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    dimension: usize,
    entries: HashMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    /// Builds a table from (token, vector) pairs. Later duplicates overwrite
    /// earlier ones.
    pub fn from_entries<I>(dimension: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, Vec<f64>)>,
    {
        let mut map = HashMap::new();
        for (token, vector) in entries {
            if vector.len() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    actual: vector.len(),
                });
            }
            map.insert(token, vector);
        }
        Ok(EmbeddingTable {
            dimension,
            entries: map,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.entries.get(token).map(Vec::as_slice)
    }
}

/// Text cleaning applied before tokenization. The defaults are standard tweet
/// preprocessing: lowercase, drop URL tokens (prefix "http") and user
/// mentions (prefix "@"), split on Unicode whitespace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CleaningOptions {
    pub lowercase: bool,
    pub strip_urls: bool,
    pub strip_mentions: bool,
}

impl Default for CleaningOptions {
    fn default() -> Self {
        CleaningOptions {
            lowercase: true,
            strip_urls: true,
            strip_mentions: true,
        }
    }
}

impl CleaningOptions {
    /// Cleans and tokenizes a sentence.
    pub fn tokenize(&self, text: &str) -> Vec<String> {
        text.split_whitespace()
            .filter(|t| !(self.strip_urls && t.starts_with("http")))
            .filter(|t| !(self.strip_mentions && t.starts_with('@')))
            .map(|t| {
                if self.lowercase {
                    t.to_lowercase()
                } else {
                    t.to_string()
                }
            })
            .collect()
    }
}

/// Loads a GloVe text-format file: one `token v1 v2 ... vd` per line,
/// whitespace separated. Every vector must have length `expected_dimension`.
pub fn load_embeddings(path: &Path, expected_dimension: usize) -> Result<EmbeddingTable> {
    if expected_dimension == 0 {
        return Err(Error::InvalidParameter(
            "embedding dimension must be positive".into(),
        ));
    }
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut entries = HashMap::new();
    let mut line_number = 0usize;
    for line in reader.lines() {
        line_number += 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let token = fields.next().expect("non-empty line has a first field");
        let vector: Vec<f64> = fields
            .map(|v| {
                v.parse::<f64>().map_err(|_| Error::Parse {
                    path: path.display().to_string(),
                    line: line_number,
                    message: format!("invalid number {v:?}"),
                })
            })
            .collect::<Result<_>>()?;
        if vector.len() != expected_dimension {
            return Err(Error::Parse {
                path: path.display().to_string(),
                line: line_number,
                message: format!(
                    "expected {expected_dimension} values, found {}",
                    vector.len()
                ),
            });
        }
        entries.insert(token.to_string(), vector);
    }
    if entries.is_empty() {
        return Err(Error::EmptyInput(format!(
            "embedding file {} has no entries",
            path.display()
        )));
    }
    Ok(EmbeddingTable {
        dimension: expected_dimension,
        entries,
    })
}

/// Featurizes a sentence as the element-wise mean of the embeddings of its
/// tokens, using the default cleaning rules. Tokens missing from the table
/// are skipped; a sentence with no known token maps to the zero vector.
pub fn featurize_sentence(text: &str, table: &EmbeddingTable) -> FeatureVector {
    featurize_sentence_with(text, table, &CleaningOptions::default())
}

/// [`featurize_sentence`] with explicit cleaning rules.
pub fn featurize_sentence_with(
    text: &str,
    table: &EmbeddingTable,
    cleaning: &CleaningOptions,
) -> FeatureVector {
    let mut sum = vec![0.0; table.dimension()];
    let mut found = 0usize;
    for token in cleaning.tokenize(text) {
        if let Some(vector) = table.get(&token) {
            for (s, v) in sum.iter_mut().zip(vector) {
                *s += v;
            }
            found += 1;
        }
    }
    if found > 0 {
        for s in &mut sum {
            *s /= found as f64;
        }
    }
    sum
}
