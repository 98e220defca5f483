//! Experiment driver: loads the datasets once, fans (label rate, seed) jobs
//! out in parallel, and writes every output in a sorted, reproducible order so
//! identical configs yield byte-identical files.

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use tri_ts::corpus::{
    load_embeddings, load_labeled_tsv, make_label_rate_split, CleaningOptions, Instance, Label,
    PayloadMode,
};
use tri_ts::learners::{LearnerFamily, Model, ProbabilisticClassifier};
use tri_ts::metrics::{consumption_curve, f1_pn, proxy_label_quality, write_curve_csv};
use tri_ts::seed::{mix, role};
use tri_ts::selflabel::{
    predict_all, run_self_training, run_tri_training, run_tri_ts, RunOptions, RunTrace,
    TerminalReason, TriVariant, UpdateMode,
};
use tri_ts::{Error, Result};

use crate::config::{ExperimentConfig, Method};

/// The six method/learner pairings the benchmark comparison covers:
/// self-training with each learner family, both tri-training variants, and
/// teacher-student tri-training.
pub const BENCHMARK_METHODS: [(Method, LearnerFamily); 6] = [
    (Method::SelfTraining, LearnerFamily::NaiveBayes),
    (Method::SelfTraining, LearnerFamily::Linear),
    (Method::SelfTraining, LearnerFamily::Mlp),
    (Method::Tri, LearnerFamily::Mlp),
    (Method::TriD, LearnerFamily::Mlp),
    (Method::TriTs, LearnerFamily::Mlp),
];

/// Network size used for every MLP entry in the benchmark grid. The compact
/// network trains an order of magnitude faster than the default while scoring
/// within a point of it on the bundled benchmark, which keeps the full grid
/// inside its runtime budget.
pub const BENCHMARK_MLP_HIDDEN_UNITS: usize = 16;
pub const BENCHMARK_MLP_LEARNING_RATE: f64 = 0.3;
pub const BENCHMARK_MLP_EPOCHS: usize = 60;

/// In-memory train/validation/test sets.
#[derive(Debug, Clone)]
pub struct LoadedData {
    pub train: Vec<(Instance, Label)>,
    pub validation: Vec<(Instance, Label)>,
    pub test: Vec<(Instance, Label)>,
}

impl LoadedData {
    pub fn num_classes(&self) -> usize {
        let max = self
            .train
            .iter()
            .chain(&self.validation)
            .chain(&self.test)
            .map(|&(_, label)| label.class_index)
            .max()
            .unwrap_or(0);
        (max + 1).max(2)
    }
}

/// Reads the three dataset files named by the config, featurizing raw text
/// through the embedding table when one is configured.
pub fn load_datasets(config: &ExperimentConfig) -> Result<LoadedData> {
    let dataset = &config.dataset;
    let load_all = |mode: &PayloadMode| -> Result<LoadedData> {
        Ok(LoadedData {
            train: load_labeled_tsv(&dataset.train, mode)?,
            validation: load_labeled_tsv(&dataset.validation, mode)?,
            test: load_labeled_tsv(&dataset.test, mode)?,
        })
    };
    match &dataset.embeddings {
        None => load_all(&PayloadMode::Featurized),
        Some(path) => {
            let table = load_embeddings(path, dataset.embedding_dimension)?;
            let cleaning = CleaningOptions::default();
            load_all(&PayloadMode::Text {
                table: &table,
                cleaning: &cleaning,
            })
        }
    }
}

/// Metrics from one (label rate, seed) run.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedOutcome {
    pub label_rate: f64,
    pub seed: u64,
    pub test_f1pn: f64,
    pub proxy_quality_percent: f64,
    pub unique_consumed: usize,
    pub iterations: usize,
    pub terminal_reason: TerminalReason,
}

/// Per-rate arithmetic means over seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct RateMean {
    pub label_rate: f64,
    pub test_f1pn: f64,
    pub proxy_quality_percent: f64,
    pub unique_consumed: f64,
}

/// Everything one experiment produced, with per-seed rows sorted by
/// (label rate, seed).
#[derive(Debug, Clone)]
pub struct RunResult {
    pub config: ExperimentConfig,
    pub per_seed: Vec<SeedOutcome>,
    pub means: Vec<RateMean>,
}

impl RunResult {
    pub fn mean_for_rate(&self, rate: f64) -> Option<&RateMean> {
        self.means.iter().find(|m| m.label_rate == rate)
    }

    pub fn results_csv(&self) -> String {
        let mut out = String::from(
            "method,learner,label_rate,seed,test_f1pn,proxy_quality,unique_consumed,iterations,terminal_reason\n",
        );
        for row in &self.per_seed {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                self.config.method.name(),
                self.config.learner.name(),
                row.label_rate,
                row.seed,
                row.test_f1pn,
                row.proxy_quality_percent,
                row.unique_consumed,
                row.iterations,
                row.terminal_reason.as_str(),
            ));
        }
        out
    }

    pub fn summary_csv(&self) -> String {
        let mut out = String::from(
            "method,learner,label_rate,mean_test_f1pn,mean_proxy_quality,mean_unique_consumed\n",
        );
        for mean in &self.means {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                self.config.method.name(),
                self.config.learner.name(),
                mean.label_rate,
                mean.test_f1pn,
                mean.proxy_quality_percent,
                mean.unique_consumed,
            ));
        }
        out
    }
}

struct SingleRun {
    outcome: SeedOutcome,
    trace: RunTrace,
}

/// Runs the configured experiment end to end: validate, load, run every
/// (rate, seed) pair, and write results, summary, trace, and curve CSVs under
/// the configured output directory.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunResult> {
    config.validate()?;
    let data = load_datasets(config)?;
    run_on_data(config, &data)
}

/// Same as [`run_experiment`] but with the datasets already in memory, so
/// sweeps and comparisons load files once.
pub fn run_on_data(config: &ExperimentConfig, data: &LoadedData) -> Result<RunResult> {
    config.validate()?;
    let num_classes = data.num_classes();

    let mut jobs: Vec<(f64, u64)> = Vec::new();
    for &rate in &config.label_rates {
        for &seed in &config.seeds {
            jobs.push((rate, seed));
        }
    }

    let runs: Result<Vec<SingleRun>> = jobs
        .par_iter()
        .map(|&(rate, seed)| run_single(config, data, num_classes, rate, seed))
        .collect();
    let mut runs = runs?;
    runs.sort_by(|a, b| {
        a.outcome
            .label_rate
            .total_cmp(&b.outcome.label_rate)
            .then(a.outcome.seed.cmp(&b.outcome.seed))
    });

    let per_seed: Vec<SeedOutcome> = runs.iter().map(|r| r.outcome.clone()).collect();
    let result = RunResult {
        config: config.clone(),
        means: rate_means(&per_seed),
        per_seed,
    };
    write_outputs(&result, &runs)?;
    Ok(result)
}

fn run_single(
    config: &ExperimentConfig,
    data: &LoadedData,
    num_classes: usize,
    rate: f64,
    seed: u64,
) -> Result<SingleRun> {
    let split = make_label_rate_split(&data.train, rate, mix(seed, role::SPLIT))?;
    let options = RunOptions {
        seed: mix(seed, role::RUN),
        max_iterations: config.max_iterations,
        num_classes,
        update_mode: UpdateMode::Sequential,
    };
    let spec = config.learner_spec();
    let validation = Some(data.validation.as_slice());

    let (predictions, trace) = match config.method {
        Method::SelfTraining => {
            let (model, trace) = run_self_training(
                &spec,
                config.confidence_threshold,
                &split.labeled,
                &split.unlabeled,
                validation,
                &options,
            )?;
            (predict_single(&model, &data.test)?, trace)
        }
        Method::Tri => {
            let (ensemble, trace) = run_tri_training(
                &spec,
                TriVariant::Classic,
                config.confidence_threshold,
                &split.labeled,
                &split.unlabeled,
                validation,
                &options,
            )?;
            (predict_ensemble(&ensemble, &data.test)?, trace)
        }
        Method::TriD => {
            let (ensemble, trace) = run_tri_training(
                &spec,
                TriVariant::Disagreement,
                config.confidence_threshold,
                &split.labeled,
                &split.unlabeled,
                validation,
                &options,
            )?;
            (predict_ensemble(&ensemble, &data.test)?, trace)
        }
        Method::TriTs => {
            let (ensemble, trace) = run_tri_ts(
                &spec,
                &config.schedule,
                &split.labeled,
                &split.unlabeled,
                validation,
                &options,
            )?;
            (predict_ensemble(&ensemble, &data.test)?, trace)
        }
    };

    let gold: Vec<Label> = data.test.iter().map(|&(_, label)| label).collect();
    let test_f1pn = f1_pn(&predictions, &gold, num_classes)?;
    let quality = proxy_label_quality(&trace, &split.hidden_labels)?;
    let outcome = SeedOutcome {
        label_rate: rate,
        seed,
        test_f1pn,
        proxy_quality_percent: quality.percent,
        unique_consumed: trace.total_unique_consumed(),
        iterations: trace.iterations.len(),
        terminal_reason: trace.terminal_reason,
    };
    Ok(SingleRun { outcome, trace })
}

fn predict_single(model: &Model, test: &[(Instance, Label)]) -> Result<Vec<Label>> {
    test.iter()
        .map(|(instance, _)| Ok(model.predict_top(&instance.features)?.0))
        .collect()
}

fn predict_ensemble(
    ensemble: &tri_ts::selflabel::Ensemble,
    test: &[(Instance, Label)],
) -> Result<Vec<Label>> {
    predict_all(ensemble, test)
}

fn rate_means(per_seed: &[SeedOutcome]) -> Vec<RateMean> {
    let mut means: Vec<RateMean> = Vec::new();
    let mut i = 0;
    while i < per_seed.len() {
        let rate = per_seed[i].label_rate;
        let mut j = i;
        let (mut f1, mut quality, mut consumed) = (0.0, 0.0, 0.0);
        while j < per_seed.len() && per_seed[j].label_rate == rate {
            f1 += per_seed[j].test_f1pn;
            quality += per_seed[j].proxy_quality_percent;
            consumed += per_seed[j].unique_consumed as f64;
            j += 1;
        }
        let n = (j - i) as f64;
        means.push(RateMean {
            label_rate: rate,
            test_f1pn: f1 / n,
            proxy_quality_percent: quality / n,
            unique_consumed: consumed / n,
        });
        i = j;
    }
    means
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

/// File stem identifying one run: `<method>_<learner>_r<rate>_s<seed>`.
fn run_stem(config: &ExperimentConfig, rate: f64, seed: u64) -> String {
    format!(
        "{}_{}_r{}_s{}",
        config.method.name(),
        config.learner.name(),
        rate,
        seed
    )
}

fn write_outputs(result: &RunResult, runs: &[SingleRun]) -> Result<()> {
    let config = &result.config;
    let dir = &config.output_dir;
    let traces_dir = dir.join("traces");
    let curves_dir = dir.join("curves");
    create_dir(&traces_dir)?;
    create_dir(&curves_dir)?;

    write_text(&dir.join("results.csv"), &result.results_csv())?;
    write_text(&dir.join("summary.csv"), &result.summary_csv())?;

    for run in runs {
        let stem = run_stem(config, run.outcome.label_rate, run.outcome.seed);
        run.trace
            .write_csv(&traces_dir.join(format!("{stem}.csv")))?;
        let curve = consumption_curve(&run.trace)?;
        write_curve_csv(&curve, &curves_dir.join(format!("{stem}.csv")))?;
    }
    Ok(())
}

/// Runs all six benchmark method/learner pairings on shared data, each into
/// its own subdirectory of the base config's output directory.
pub fn run_benchmark_grid(base: &ExperimentConfig, data: &LoadedData) -> Result<Vec<RunResult>> {
    let mut results = Vec::with_capacity(BENCHMARK_METHODS.len());
    for &(method, learner) in &BENCHMARK_METHODS {
        let mut config = base.clone();
        config.method = method;
        config.learner = learner;
        if learner == LearnerFamily::Mlp {
            config.hidden_units = base.hidden_units.or(Some(BENCHMARK_MLP_HIDDEN_UNITS));
            config.learning_rate = base.learning_rate.or(Some(BENCHMARK_MLP_LEARNING_RATE));
            config.epochs = base.epochs.or(Some(BENCHMARK_MLP_EPOCHS));
        } else {
            config.hidden_units = None;
            config.learning_rate = None;
            config.epochs = None;
        }
        config.output_dir = base
            .output_dir
            .join(format!("{}_{}", method.name(), learner.name()));
        results.push(run_on_data(&config, data)?);
    }
    Ok(results)
}

/// What a sweep varies: the label-rate grid itself, or one of the two
/// thresholds with label rates held at the config's list.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepAxis {
    LabelRates(Vec<f64>),
    TauT(Vec<f64>),
    TauS(Vec<f64>),
}

impl SweepAxis {
    pub fn from_name(name: &str, grid: Vec<f64>) -> Result<Self> {
        match name {
            "label_rates" => Ok(SweepAxis::LabelRates(grid)),
            "tau_t" => Ok(SweepAxis::TauT(grid)),
            "tau_s" => Ok(SweepAxis::TauS(grid)),
            other => Err(Error::InvalidParameter(format!(
                "unknown sweep axis {other:?}; expected label_rates, tau_t, or tau_s"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::LabelRates(_) => "label_rates",
            SweepAxis::TauT(_) => "tau_t",
            SweepAxis::TauS(_) => "tau_s",
        }
    }

    pub fn grid(&self) -> &[f64] {
        match self {
            SweepAxis::LabelRates(g) | SweepAxis::TauT(g) | SweepAxis::TauS(g) => g,
        }
    }

    /// True for the threshold axes, where the sweep also reports the max−min
    /// spread of the mean scores.
    pub fn is_sensitivity(&self) -> bool {
        !matches!(self, SweepAxis::LabelRates(_))
    }
}

/// One row of a sweep matrix: a grid point and its mean F1 over the positive
/// and negative classes at each label rate.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub label: String,
    pub mean_f1pn: Vec<f64>,
}

/// Mean-score matrix over (grid value × label rate), plus the per-rate
/// max−min spread in sensitivity mode.
#[derive(Debug, Clone)]
pub struct SweepTable {
    pub axis: String,
    pub rates: Vec<f64>,
    pub rows: Vec<SweepRow>,
    pub spread: Option<Vec<f64>>,
}

impl SweepTable {
    pub fn to_csv_string(&self) -> String {
        let mut out = self.axis.clone();
        for rate in &self.rates {
            out.push_str(&format!(",rate_{rate}"));
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.label);
            for value in &row.mean_f1pn {
                out.push_str(&format!(",{value}"));
            }
            out.push('\n');
        }
        if let Some(spread) = &self.spread {
            out.push_str("spread");
            for value in spread {
                out.push_str(&format!(",{value}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Sweep output plus any tuning-range warnings (grids outside the usual
/// tau_t ∈ [0.7, 1.0] / tau_s ∈ [0.6, 0.95] bands are allowed but flagged).
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub table: SweepTable,
    pub warnings: Vec<String>,
}

fn tuning_warnings(axis: &SweepAxis) -> Vec<String> {
    let (low, high) = match axis {
        SweepAxis::LabelRates(_) => return Vec::new(),
        SweepAxis::TauT(_) => (0.7, 1.0),
        SweepAxis::TauS(_) => (0.6, 0.95),
    };
    axis.grid()
        .iter()
        .filter(|v| !(low..=high).contains(*v))
        .map(|v| {
            format!(
                "{} = {v} lies outside the usual tuning range [{low}, {high}]",
                axis.name()
            )
        })
        .collect()
}

/// Runs one experiment per grid point and assembles the mean-score matrix.
/// The matrix CSV lands at `<output_dir>/sweep_<axis>.csv`; each grid point's
/// full experiment output lands under `<output_dir>/grid/`.
pub fn run_sweep(config: &ExperimentConfig, axis: &SweepAxis) -> Result<SweepOutcome> {
    if axis.grid().is_empty() {
        return Err(Error::InvalidParameter("sweep grid must not be empty".into()));
    }
    let warnings = tuning_warnings(axis);
    config.validate()?;
    let data = load_datasets(config)?;

    let (rates, rows) = match axis {
        SweepAxis::LabelRates(grid) => {
            let mut point = config.clone();
            point.label_rates = grid.clone();
            point.output_dir = config.output_dir.join("grid").join("label_rates");
            let result = run_on_data(&point, &data)?;
            let rates: Vec<f64> = result.means.iter().map(|m| m.label_rate).collect();
            let row = SweepRow {
                label: config.method.name().to_string(),
                mean_f1pn: result.means.iter().map(|m| m.test_f1pn).collect(),
            };
            (rates, vec![row])
        }
        SweepAxis::TauT(grid) | SweepAxis::TauS(grid) => {
            let mut rates: Vec<f64> = config.label_rates.clone();
            rates.sort_by(f64::total_cmp);
            let mut rows = Vec::with_capacity(grid.len());
            for &value in grid {
                let mut point = config.clone();
                match axis {
                    SweepAxis::TauT(_) => point.schedule.tau_t = value,
                    SweepAxis::TauS(_) => point.schedule.tau_s = value,
                    SweepAxis::LabelRates(_) => unreachable!(),
                }
                point.output_dir = config
                    .output_dir
                    .join("grid")
                    .join(format!("{}_{value}", axis.name()));
                let result = run_on_data(&point, &data)?;
                rows.push(SweepRow {
                    label: format!("{value}"),
                    mean_f1pn: rates
                        .iter()
                        .map(|&rate| {
                            result
                                .mean_for_rate(rate)
                                .map(|m| m.test_f1pn)
                                .expect("every configured rate has a mean")
                        })
                        .collect(),
                });
            }
            (rates, rows)
        }
    };

    let spread = axis.is_sensitivity().then(|| {
        (0..rates.len())
            .map(|j| {
                let column = rows.iter().map(|row| row.mean_f1pn[j]);
                let max = column.clone().fold(f64::NEG_INFINITY, f64::max);
                let min = column.fold(f64::INFINITY, f64::min);
                max - min
            })
            .collect()
    });

    let table = SweepTable {
        axis: axis.name().to_string(),
        rates,
        rows,
        spread,
    };
    create_dir(&config.output_dir)?;
    write_text(
        &config.output_dir.join(format!("sweep_{}.csv", axis.name())),
        &table.to_csv_string(),
    )?;
    Ok(SweepOutcome { table, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::DatasetConfig;
    use std::path::PathBuf;
    use tri_ts::corpus::{generate_blobs, SynthParams};

    fn tiny_data() -> LoadedData {
        let params = SynthParams {
            num_points: 240,
            dimension: 4,
            class_weights: vec![1.0, 1.0, 1.0],
            separation: 3.0,
            noise: 0.7,
        };
        let train = generate_blobs(&params, 11).unwrap();
        let mut eval_params = params.clone();
        eval_params.num_points = 90;
        let validation = generate_blobs(&eval_params, 12).unwrap();
        let test = generate_blobs(&eval_params, 13).unwrap();
        LoadedData {
            train,
            validation,
            test,
        }
    }

    fn tiny_config(dir: &Path, method: Method) -> ExperimentConfig {
        ExperimentConfig {
            dataset: DatasetConfig {
                train: PathBuf::from("unused.tsv"),
                validation: PathBuf::from("unused.tsv"),
                test: PathBuf::from("unused.tsv"),
                embeddings: None,
                embedding_dimension: 300,
            },
            method,
            learner: LearnerFamily::NaiveBayes,
            label_rates: vec![0.2, 0.4],
            seeds: vec![1, 2],
            schedule: tri_ts::selflabel::ThresholdSchedule::new(0.9, 0.85, 0.002, 0.002).unwrap(),
            confidence_threshold: 0.9,
            max_iterations: 12,
            hidden_units: None,
            learning_rate: None,
            epochs: None,
            output_dir: dir.to_path_buf(),
        }
    }

    #[test]
    fn experiment_produces_sorted_rows_and_exact_means() {
        let dir = tempfile::tempdir().unwrap();
        let data = tiny_data();
        let config = tiny_config(dir.path(), Method::TriTs);
        let result = run_on_data(&config, &data).unwrap();

        assert_eq!(result.per_seed.len(), 4);
        let keys: Vec<(f64, u64)> = result
            .per_seed
            .iter()
            .map(|r| (r.label_rate, r.seed))
            .collect();
        assert_eq!(keys, vec![(0.2, 1), (0.2, 2), (0.4, 1), (0.4, 2)]);

        assert_eq!(result.means.len(), 2);
        let expected = (result.per_seed[0].test_f1pn + result.per_seed[1].test_f1pn) / 2.0;
        assert_eq!(result.means[0].test_f1pn, expected);

        assert!(dir.path().join("results.csv").is_file());
        assert!(dir.path().join("summary.csv").is_file());
        assert!(dir
            .path()
            .join("traces")
            .join("tri_ts_naive_bayes_r0.2_s1.csv")
            .is_file());
        assert!(dir
            .path()
            .join("curves")
            .join("tri_ts_naive_bayes_r0.4_s2.csv")
            .is_file());
    }

    #[test]
    fn identical_configs_yield_identical_csv_bytes() {
        let data = tiny_data();
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        for method in [Method::SelfTraining, Method::Tri] {
            run_on_data(&tiny_config(dir_a.path(), method), &data).unwrap();
            run_on_data(&tiny_config(dir_b.path(), method), &data).unwrap();
            let a = std::fs::read(dir_a.path().join("results.csv")).unwrap();
            let b = std::fs::read(dir_b.path().join("results.csv")).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn results_csv_has_stable_schema() {
        let dir = tempfile::tempdir().unwrap();
        let data = tiny_data();
        let mut config = tiny_config(dir.path(), Method::SelfTraining);
        config.label_rates = vec![0.3];
        config.seeds = vec![5];
        let result = run_on_data(&config, &data).unwrap();
        let csv = result.results_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "method,learner,label_rate,seed,test_f1pn,proxy_quality,unique_consumed,iterations,terminal_reason"
        );
        let row = lines.next().unwrap();
        assert!(row.starts_with("self_training,naive_bayes,0.3,5,"));
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn sweep_single_point_matches_run_experiment() {
        let data = tiny_data();
        let dir = tempfile::tempdir().unwrap();
        let mut config = tiny_config(dir.path(), Method::TriTs);
        config.label_rates = vec![0.4];

        let single = run_on_data(&config, &data).unwrap();

        let grid_dir = tempfile::tempdir().unwrap();
        let mut sweep_config = config.clone();
        sweep_config.output_dir = grid_dir.path().to_path_buf();
        sweep_config.dataset = write_tiny_dataset(grid_dir.path(), &data);
        let outcome = run_sweep(&sweep_config, &SweepAxis::TauT(vec![0.9])).unwrap();

        assert_eq!(outcome.table.rows.len(), 1);
        assert_eq!(
            outcome.table.rows[0].mean_f1pn[0],
            single.means[0].test_f1pn
        );
        assert_eq!(outcome.table.spread.as_deref(), Some(&[0.0][..]));
        assert!(outcome.warnings.is_empty());
    }

    fn write_tiny_dataset(dir: &Path, data: &LoadedData) -> DatasetConfig {
        use tri_ts::corpus::write_labeled_tsv;
        let train = dir.join("train.tsv");
        let validation = dir.join("validation.tsv");
        let test = dir.join("test.tsv");
        write_labeled_tsv(&train, &data.train, 3).unwrap();
        write_labeled_tsv(&validation, &data.validation, 3).unwrap();
        write_labeled_tsv(&test, &data.test, 3).unwrap();
        DatasetConfig {
            train,
            validation,
            test,
            embeddings: None,
            embedding_dimension: 300,
        }
    }

    #[test]
    fn sweep_warns_outside_tuning_range_and_rejects_empty_grid() {
        let warnings = tuning_warnings(&SweepAxis::TauT(vec![0.5, 0.94]));
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("0.5"));
        assert!(tuning_warnings(&SweepAxis::TauS(vec![0.6, 0.95])).is_empty());

        let dir = tempfile::tempdir().unwrap();
        let config = tiny_config(dir.path(), Method::TriTs);
        let err = run_sweep(&config, &SweepAxis::TauT(Vec::new())).unwrap_err();
        assert!(err.is_invalid_input());
    }

    #[test]
    fn sweep_axis_names_round_trip() {
        for name in ["label_rates", "tau_t", "tau_s"] {
            let axis = SweepAxis::from_name(name, vec![0.9]).unwrap();
            assert_eq!(axis.name(), name);
        }
        assert!(SweepAxis::from_name("lambda_t", vec![0.1]).is_err());
    }

    #[test]
    #[ignore]
    fn pilot_benchmark_grid() {
        use crate::benchmark;
        let started = std::time::Instant::now();
        let bench = benchmark::generate(benchmark::DEFAULT_SEED).unwrap();
        let data = LoadedData {
            train: bench.train,
            validation: bench.validation,
            test: bench.test,
        };
        let threshold: f64 = std::env::var("PILOT_THRESHOLD")
            .map(|v| v.parse().unwrap())
            .unwrap_or(0.9);
        let lambda: f64 = std::env::var("PILOT_LAMBDA")
            .map(|v| v.parse().unwrap())
            .unwrap_or(0.01);
        let max_iterations: usize = std::env::var("PILOT_MAXITER")
            .map(|v| v.parse().unwrap())
            .unwrap_or(8);
        let hidden: Option<usize> = std::env::var("PILOT_HIDDEN")
            .ok()
            .map(|v| v.parse().unwrap());
        println!("threshold {threshold}, lambda {lambda}, max_iter {max_iterations}, hidden {hidden:?}");
        let dir = tempfile::tempdir().unwrap();
        let mut base = tiny_config(dir.path(), Method::TriTs);
        base.learner = LearnerFamily::Linear;
        base.schedule =
            tri_ts::selflabel::ThresholdSchedule::new(0.94, 0.85, lambda, lambda).unwrap();
        base.label_rates = vec![0.1, 0.2, 0.3, 0.4];
        base.seeds = vec![1, 2, 3, 4, 5];
        base.confidence_threshold = threshold;
        base.max_iterations = max_iterations;
        base.hidden_units = hidden;
        base.output_dir = dir.path().to_path_buf();

        let results = run_benchmark_grid(&base, &data).unwrap();
        println!("grid wall time: {:.1}s", started.elapsed().as_secs_f64());
        for result in &results {
            for mean in &result.means {
                println!(
                    "{:<13} {:<11} rate {}: F1PN {:.4}, quality {:.2}%, consumed {:.1}",
                    result.config.method.name(),
                    result.config.learner.name(),
                    mean.label_rate,
                    mean.test_f1pn,
                    mean.proxy_quality_percent,
                    mean.unique_consumed
                );
            }
            let reasons: Vec<&str> = result
                .per_seed
                .iter()
                .map(|r| r.terminal_reason.as_str())
                .collect();
            let iters: Vec<usize> = result.per_seed.iter().map(|r| r.iterations).collect();
            println!("  reasons: {reasons:?}");
            println!("  iterations: {iters:?}");
            for mean in &result.means {
                let f1s: Vec<String> = result
                    .per_seed
                    .iter()
                    .filter(|r| r.label_rate == mean.label_rate)
                    .map(|r| format!("{:.4}", r.test_f1pn))
                    .collect();
                println!("  rate {} per-seed f1: {}", mean.label_rate, f1s.join(" "));
            }
        }
    }

    #[test]
    #[ignore]
    fn pilot_graduation_fixture() {
        use rand_chacha::rand_core::SeedableRng;
        use rand_chacha::ChaCha8Rng;
        use rand_distr::{Distribution, StandardNormal};
        use tri_ts::corpus::{Instance, Label};
        use tri_ts::learners::LearnerSpec;
        use tri_ts::selflabel::{run_tri_ts, RunOptions, ThresholdSchedule, UpdateMode};

        let make = |offset: f64, n_labeled: usize, n_pool: usize, seed: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut labeled = Vec::new();
            let mut id = 0u64;
            for class in 0..2usize {
                let center = if class == 0 { -offset } else { offset };
                for _ in 0..n_labeled {
                    let x: f64 = StandardNormal.sample(&mut rng);
                    let y: f64 = StandardNormal.sample(&mut rng);
                    labeled.push((Instance::new(id, vec![center + x, y]), Label::new(class)));
                    id += 1;
                }
            }
            let pool: Vec<Instance> = (0..n_pool)
                .map(|i| {
                    let center = if i % 2 == 0 { -offset } else { offset };
                    let x: f64 = StandardNormal.sample(&mut rng);
                    let y: f64 = StandardNormal.sample(&mut rng);
                    let inst = Instance::new(id, vec![center + x, y]);
                    id += 1;
                    inst
                })
                .collect();
            (labeled, pool)
        };

        let mut spec = LearnerSpec::mlp();
        spec.hidden_units = 8;
        spec.learning_rate = 0.3;
        spec.epochs = 40;

        for offset in [1.0, 1.5, 2.0] {
            for seed in [1u64, 7, 42] {
                let started = std::time::Instant::now();
                let (labeled, pool) = make(offset, 20, 2000, seed);
                let options = RunOptions {
                    seed,
                    max_iterations: 1000,
                    num_classes: 2,
                    update_mode: UpdateMode::Sequential,
                };
                let (_, trace) = run_tri_ts(
                    &spec,
                    &ThresholdSchedule::standard(),
                    &labeled,
                    &pool,
                    None,
                    &options,
                )
                .unwrap();
                let sizes: Vec<usize> = trace
                    .iterations
                    .iter()
                    .map(|r| r.batches.iter().map(|b| b.entries.len()).sum())
                    .collect();
                let smallest = sizes.iter().copied().min().unwrap_or(0);
                println!(
                    "offset {offset} seed {seed}: {} iterations, {:?}, min batch total {smallest}, unique {}, {:.1}s",
                    trace.iterations.len(),
                    trace.terminal_reason,
                    trace.total_unique_consumed(),
                    started.elapsed().as_secs_f64()
                );
            }
        }
    }

    #[test]
    #[ignore]
    fn pilot_tri_anatomy() {
        use crate::benchmark;
        use tri_ts::learners::{train_classifier, LearnerSpec};
        use tri_ts::selflabel::Ensemble;

        let hidden: usize = std::env::var("PILOT_HIDDEN")
            .map(|v| v.parse().unwrap())
            .unwrap_or(32);
        let threshold: f64 = std::env::var("PILOT_THRESHOLD")
            .map(|v| v.parse().unwrap())
            .unwrap_or(0.5);
        let bench = benchmark::generate(benchmark::DEFAULT_SEED).unwrap();
        let seed = 1u64;
        let split = make_label_rate_split(&bench.train, 0.1, mix(seed, role::SPLIT)).unwrap();
        let mut spec = LearnerSpec::mlp();
        spec.hidden_units = hidden;
        spec.learning_rate = 0.3;
        spec.epochs = 60;
        let options = RunOptions {
            seed: mix(seed, role::RUN),
            max_iterations: 5,
            num_classes: 3,
            update_mode: UpdateMode::Sequential,
        };
        let gold: Vec<Label> = bench.test.iter().map(|&(_, l)| l).collect();

        let sup = train_classifier(&spec, &split.labeled, 3, mix(seed, 901)).unwrap();
        let sup_preds = predict_single(&sup, &bench.test).unwrap();
        println!("supervised single:        {:.4}", f1_pn(&sup_preds, &gold, 3).unwrap());
        let pool_hits = split
            .unlabeled
            .iter()
            .filter(|inst| {
                sup.predict_top(&inst.features).unwrap().0 == split.hidden_labels[&inst.id]
            })
            .count();
        println!(
            "supervised pool accuracy: {:.4}",
            pool_hits as f64 / split.unlabeled.len() as f64
        );
        let trio = [
            train_classifier(&spec, &split.labeled, 3, mix(seed, 902)).unwrap(),
            train_classifier(&spec, &split.labeled, 3, mix(seed, 903)).unwrap(),
            train_classifier(&spec, &split.labeled, 3, mix(seed, 904)).unwrap(),
        ];
        let ens = Ensemble::new(trio).unwrap();
        let vote_preds = predict_all(&ens, &bench.test).unwrap();
        println!("supervised 3-vote:        {:.4}", f1_pn(&vote_preds, &gold, 3).unwrap());

        let describe = |name: &str, trace: &RunTrace| {
            for rec in &trace.iterations {
                let total: usize = rec.batches.iter().map(|b| b.entries.len()).sum();
                let correct = rec
                    .batches
                    .iter()
                    .flat_map(|b| &b.entries)
                    .filter(|e| split.hidden_labels.get(&e.instance_id) == Some(&e.label))
                    .count();
                println!(
                    "  {name} iter {}: batch {total}, quality {:.1}%, val {:?}",
                    rec.iteration,
                    100.0 * correct as f64 / total.max(1) as f64,
                    rec.val_f1pn.map(|v| (v * 1e4).round() / 1e4)
                );
            }
        };

        let (model, trace) = run_self_training(
            &spec,
            threshold,
            &split.labeled,
            &split.unlabeled,
            Some(&bench.validation),
            &options,
        )
        .unwrap();
        describe("self", &trace);
        let preds = predict_single(&model, &bench.test).unwrap();
        println!("self_mlp final:           {:.4}", f1_pn(&preds, &gold, 3).unwrap());

        for (variant, name) in [(TriVariant::Classic, "tri"), (TriVariant::Disagreement, "tri_d")] {
            let (ensemble, trace) = run_tri_training(
                &spec,
                variant,
                threshold,
                &split.labeled,
                &split.unlabeled,
                Some(&bench.validation),
                &options,
            )
            .unwrap();
            describe(name, &trace);
            for (i, member) in ensemble.models().iter().enumerate() {
                let preds = predict_single(member, &bench.test).unwrap();
                println!(
                    "{name} member {i}:             {:.4}",
                    f1_pn(&preds, &gold, 3).unwrap()
                );
            }
            let preds = predict_all(&ensemble, &bench.test).unwrap();
            println!("{name} vote:                 {:.4}", f1_pn(&preds, &gold, 3).unwrap());
        }
    }

    #[test]
    fn loading_missing_dataset_is_a_runtime_error() {
        let dir = tempfile::tempdir().unwrap();
        let config = tiny_config(dir.path(), Method::Tri);
        let err = run_experiment(&config).unwrap_err();
        assert!(!err.is_invalid_input());
    }

    #[test]
    fn invalid_schedule_fails_before_loading_data() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = tiny_config(dir.path(), Method::TriTs);
        config.schedule.tau_s = 0.95;
        config.schedule.tau_t = 0.94;
        let err = run_experiment(&config).unwrap_err();
        assert!(err.is_invalid_input());
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
    }
}
