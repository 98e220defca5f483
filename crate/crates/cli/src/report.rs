//! Merges per-experiment result CSVs into comparison tables: one row per
//! method/learner pairing, one column per label rate, cells holding the mean
//! over seeds. Three tables come out: test F1 over the positive and negative
//! classes, proxy-label quality, and unique pool instances consumed.

use std::collections::BTreeMap;
use std::path::Path;

use tri_ts::{Error, Result};

pub const RESULTS_HEADER: &str =
    "method,learner,label_rate,seed,test_f1pn,proxy_quality,unique_consumed,iterations,terminal_reason";

/// One parsed line of a results CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub method: String,
    pub learner: String,
    pub label_rate: f64,
    pub seed: u64,
    pub test_f1pn: f64,
    pub proxy_quality: f64,
    pub unique_consumed: f64,
    pub iterations: usize,
    pub terminal_reason: String,
}

fn parse_error(path: &Path, line: usize, message: String) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        message,
    }
}

pub fn read_results_csv(path: &Path) -> Result<Vec<ResultRow>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == RESULTS_HEADER => {}
        Some((_, header)) => {
            return Err(parse_error(
                path,
                1,
                format!("unexpected results header {header:?}"),
            ))
        }
        None => return Err(Error::EmptyInput(path.display().to_string())),
    }

    let mut rows = Vec::new();
    for (index, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(parse_error(
                path,
                index + 1,
                format!("expected 9 fields, got {}", fields.len()),
            ));
        }
        let num = |i: usize| -> Result<f64> {
            fields[i].parse().map_err(|_| {
                parse_error(path, index + 1, format!("bad number {:?}", fields[i]))
            })
        };
        rows.push(ResultRow {
            method: fields[0].to_string(),
            learner: fields[1].to_string(),
            label_rate: num(2)?,
            seed: fields[3].parse().map_err(|_| {
                parse_error(path, index + 1, format!("bad seed {:?}", fields[3]))
            })?,
            test_f1pn: num(4)?,
            proxy_quality: num(5)?,
            unique_consumed: num(6)?,
            iterations: fields[7].parse().map_err(|_| {
                parse_error(path, index + 1, format!("bad iteration count {:?}", fields[7]))
            })?,
            terminal_reason: fields[8].to_string(),
        });
    }
    Ok(rows)
}

/// One comparison table: methods down, label rates across.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTable {
    pub rates: Vec<f64>,
    /// (method, learner, one optional mean per rate), sorted by method then
    /// learner; a `None` cell means that pairing never ran at that rate.
    pub rows: Vec<(String, String, Vec<Option<f64>>)>,
}

impl MetricTable {
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("method,learner");
        for rate in &self.rates {
            out.push_str(&format!(",rate_{rate}"));
        }
        out.push('\n');
        for (method, learner, cells) in &self.rows {
            out.push_str(&format!("{method},{learner}"));
            for cell in cells {
                match cell {
                    Some(value) => out.push_str(&format!(",{value}")),
                    None => out.push(','),
                }
            }
            out.push('\n');
        }
        out
    }
}

/// The three tables built from merged result rows.
#[derive(Debug, Clone)]
pub struct ReportTables {
    pub f1pn: MetricTable,
    pub proxy_quality: MetricTable,
    pub consumed: MetricTable,
}

fn build_table<F: Fn(&ResultRow) -> f64>(rows: &[ResultRow], metric: F) -> MetricTable {
    let mut rates: Vec<f64> = rows.iter().map(|r| r.label_rate).collect();
    rates.sort_by(f64::total_cmp);
    rates.dedup();

    let mut groups: BTreeMap<(String, String), BTreeMap<u64, (f64, usize)>> = BTreeMap::new();
    for row in rows {
        let cell = groups
            .entry((row.method.clone(), row.learner.clone()))
            .or_default()
            .entry(row.label_rate.to_bits())
            .or_insert((0.0, 0));
        cell.0 += metric(row);
        cell.1 += 1;
    }

    let table_rows = groups
        .into_iter()
        .map(|((method, learner), cells)| {
            let means = rates
                .iter()
                .map(|rate| {
                    cells
                        .get(&rate.to_bits())
                        .map(|&(sum, count)| sum / count as f64)
                })
                .collect();
            (method, learner, means)
        })
        .collect();

    MetricTable {
        rates,
        rows: table_rows,
    }
}

pub fn build_report(rows: &[ResultRow]) -> ReportTables {
    ReportTables {
        f1pn: build_table(rows, |r| r.test_f1pn),
        proxy_quality: build_table(rows, |r| r.proxy_quality),
        consumed: build_table(rows, |r| r.unique_consumed),
    }
}

/// Reads every input results CSV, merges the rows, and writes the three
/// tables under `out_dir`.
pub fn write_report(inputs: &[std::path::PathBuf], out_dir: &Path) -> Result<ReportTables> {
    if inputs.is_empty() {
        return Err(Error::InvalidParameter(
            "report needs at least one results CSV".into(),
        ));
    }
    let mut rows = Vec::new();
    for path in inputs {
        rows.extend(read_results_csv(path)?);
    }
    let tables = build_report(&rows);
    std::fs::create_dir_all(out_dir).map_err(|e| Error::Io {
        path: out_dir.display().to_string(),
        source: e,
    })?;
    let write = |name: &str, table: &MetricTable| -> Result<()> {
        let path = out_dir.join(name);
        std::fs::write(&path, table.to_csv_string()).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })
    };
    write("report_f1pn.csv", &tables.f1pn)?;
    write("report_proxy_quality.csv", &tables.proxy_quality)?;
    write("report_consumed.csv", &tables.consumed)?;
    Ok(tables)
}
