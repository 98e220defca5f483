//! Command-line entry point. Exit codes: 0 on success, 1 for configuration or
//! validation problems, 2 for runtime and data errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use tri_ts::corpus::{
    make_label_rate_split, write_hidden_labels_tsv, write_labeled_tsv, write_unlabeled_tsv,
};
use tri_ts::seed::{mix, role};
use tri_ts::{Error, Result};
use tri_ts_cli::config::{ExperimentConfig, Method, Overrides};
use tri_ts_cli::harness::{run_experiment, run_sweep, SweepAxis};
use tri_ts_cli::report::write_report;
use tri_ts_cli::{benchmark, harness};

#[derive(Parser)]
#[command(
    name = "tri-ts",
    version,
    about = "Semi-supervised self-labeling experiments: teacher-student tri-training and baselines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the bundled synthetic benchmark as TSV files.
    Synth {
        /// Directory for train.tsv, validation.tsv, and test.tsv.
        #[arg(long)]
        out: PathBuf,
        /// Master seed for the generator.
        #[arg(long, default_value_t = benchmark::DEFAULT_SEED)]
        seed: u64,
    },
    /// Materialize one labeled/unlabeled split of the configured training set.
    Split {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (defaults to the config's output_dir).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Master seed (defaults to the config's first seed).
        #[arg(long)]
        seed: Option<u64>,
        /// Label rate (defaults to the config's first rate).
        #[arg(long)]
        rate: Option<f64>,
    },
    /// Run one experiment: every configured (label rate, seed) pair.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Replace the config's seed list with this single seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Replace the config's method.
        #[arg(long, value_parser = Method::from_str)]
        method: Option<Method>,
        /// Replace the config's label-rate list with this single rate.
        #[arg(long)]
        rate: Option<f64>,
    },
    /// Sweep a grid over label rates or one of the thresholds.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Axis to vary: label_rates, tau_t, or tau_s.
        #[arg(long)]
        axis: String,
        /// Comma-separated grid values.
        #[arg(long, value_delimiter = ',', required = true)]
        grid: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_parser = Method::from_str)]
        method: Option<Method>,
        #[arg(long)]
        rate: Option<f64>,
    },
    /// Merge results.csv files into method-by-rate comparison tables.
    Report {
        /// Directory for the three report CSVs.
        #[arg(long)]
        out: PathBuf,
        /// results.csv files to merge.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
}

fn load_config(path: &Path, overrides: &Overrides) -> Result<ExperimentConfig> {
    let mut config = ExperimentConfig::from_path(path)?;
    overrides.apply(&mut config);
    config.validate()?;
    Ok(config)
}

fn cmd_synth(out: &Path, seed: u64) -> Result<()> {
    let bench = benchmark::generate(seed)?;
    bench.write_tsv_files(out)?;
    println!(
        "wrote {} train / {} validation / {} test instances to {}",
        bench.train.len(),
        bench.validation.len(),
        bench.test.len(),
        out.display()
    );
    Ok(())
}

fn cmd_split(config: &ExperimentConfig, out: &Path, seed: u64, rate: f64) -> Result<()> {
    let data = harness::load_datasets(config)?;
    let num_classes = data.num_classes();
    let split = make_label_rate_split(&data.train, rate, mix(seed, role::SPLIT))?;
    std::fs::create_dir_all(out).map_err(|e| Error::Io {
        path: out.display().to_string(),
        source: e,
    })?;
    write_labeled_tsv(&out.join("labeled.tsv"), &split.labeled, num_classes)?;
    write_unlabeled_tsv(&out.join("unlabeled.tsv"), &split.unlabeled)?;
    write_hidden_labels_tsv(&out.join("hidden_labels.tsv"), &split.hidden_labels, num_classes)?;
    println!(
        "split rate {rate} seed {seed}: {} labeled, {} unlabeled -> {}",
        split.labeled.len(),
        split.unlabeled.len(),
        out.display()
    );
    Ok(())
}

fn cmd_run(config: &ExperimentConfig) -> Result<()> {
    let result = run_experiment(config)?;
    println!(
        "method {} ({}), {} runs",
        config.method.name(),
        config.learner.name(),
        result.per_seed.len()
    );
    for mean in &result.means {
        println!(
            "rate {}: mean F1PN {:.4}, proxy quality {:.2}%, consumed {:.1}",
            mean.label_rate, mean.test_f1pn, mean.proxy_quality_percent, mean.unique_consumed
        );
    }
    println!("results: {}", config.output_dir.join("results.csv").display());
    Ok(())
}

fn cmd_sweep(config: &ExperimentConfig, axis_name: &str, grid: Vec<f64>) -> Result<()> {
    let axis = SweepAxis::from_name(axis_name, grid)?;
    let outcome = run_sweep(config, &axis)?;
    for warning in &outcome.warnings {
        eprintln!("warning: {warning}");
    }
    print!("{}", outcome.table.to_csv_string());
    println!(
        "sweep table: {}",
        config
            .output_dir
            .join(format!("sweep_{}.csv", axis.name()))
            .display()
    );
    Ok(())
}

fn cmd_report(inputs: &[PathBuf], out: &Path) -> Result<()> {
    let tables = write_report(inputs, out)?;
    println!(
        "merged {} method/learner rows over {} rates -> {}",
        tables.f1pn.rows.len(),
        tables.f1pn.rates.len(),
        out.display()
    );
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth { out, seed } => cmd_synth(&out, seed),
        Command::Split {
            config,
            out,
            seed,
            rate,
        } => {
            let overrides = Overrides {
                out: out.clone(),
                seed,
                rate,
                method: None,
            };
            let config = load_config(&config, &overrides)?;
            let out = out.unwrap_or_else(|| config.output_dir.clone());
            let seed = seed.unwrap_or(config.seeds[0]);
            let rate = rate.unwrap_or(config.label_rates[0]);
            cmd_split(&config, &out, seed, rate)
        }
        Command::Run {
            config,
            out,
            seed,
            method,
            rate,
        } => {
            let overrides = Overrides {
                out,
                seed,
                method,
                rate,
            };
            let config = load_config(&config, &overrides)?;
            cmd_run(&config)
        }
        Command::Sweep {
            config,
            axis,
            grid,
            out,
            seed,
            method,
            rate,
        } => {
            let overrides = Overrides {
                out,
                seed,
                method,
                rate,
            };
            let config = load_config(&config, &overrides)?;
            cmd_sweep(&config, &axis, grid)
        }
        Command::Report { out, inputs } => cmd_report(&inputs, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_invalid_input() { 1 } else { 2 })
        }
    }
}
