//! `vistat`: visibility-graph forecasting pipeline and statistical
//! comparison toolkit.
//!
//! Exit codes: 0 success, 2 input/schema error, 3 domain/degenerate-math
//! error, 4 internal invariant violation.

mod commands;
mod config;
mod errors;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vistat_core::tgmodel::{tape::Act, ModelKind, TimeCell};

use config::RunConfig;
use errors::CliError;

#[derive(Parser)]
#[command(name = "vistat", version, about = "Time-series forecasting with visibility graphs and significance testing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the natural visibility graph of a series column.
    Vg {
        /// OHLCV CSV input.
        input: PathBuf,
        #[arg(long, default_value = "close")]
        column: String,
        /// Use only the trailing N observations.
        #[arg(long)]
        last: Option<usize>,
        /// Orient edges left-to-right.
        #[arg(long)]
        directed: bool,
        #[arg(long, default_value = ".")]
        output_dir: PathBuf,
    },
    /// Rolling-window normalization of a series column.
    Normalize {
        input: PathBuf,
        #[arg(long, default_value = "close")]
        column: String,
        #[arg(long, default_value_t = 30)]
        window: usize,
        #[arg(long, default_value = "normalized.csv")]
        output: PathBuf,
        /// Also dump model-ready windows to this CSV.
        #[arg(long)]
        dump_windows: Option<PathBuf>,
        /// Window length for --dump-windows.
        #[arg(long, default_value_t = 16)]
        m: usize,
        /// Horizon for --dump-windows.
        #[arg(long, default_value_t = 1)]
        q: usize,
    },
    /// Train a forecaster and write checkpoint, log, and run metadata.
    Train(TrainArgs),
    /// Score a checkpoint on the test partition.
    Evaluate {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "close")]
        column: String,
        #[arg(long, default_value_t = 30)]
        window: usize,
        /// Dataset label for the report row (defaults to the instrument id).
        #[arg(long)]
        dataset: Option<String>,
        /// Algorithm label for the report row.
        #[arg(long)]
        algorithm: Option<String>,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Pairwise significance tests over a metrics matrix.
    Compare {
        /// Metrics-matrix CSV: header `dataset,<algo_1>,...,<algo_K>`.
        input: PathBuf,
        #[arg(long, default_value = "rmse")]
        metric: String,
        #[arg(long, default_value_t = 1)]
        horizon: usize,
        /// Comma-separated subset of {t, wilcoxon, sign}.
        #[arg(long, value_delimiter = ',', default_values_t = ["t".to_string(), "wilcoxon".to_string(), "sign".to_string()])]
        tests: Vec<String>,
        /// Column pairs BASELINE:VARIANT (repeatable).
        #[arg(long = "pair")]
        pairs: Vec<String>,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Average ranks, Friedman test, and Nemenyi matrix over a metrics matrix.
    Rank {
        input: PathBuf,
        #[arg(long, default_value = "rmse")]
        metric: String,
        #[arg(long, default_value_t = 1)]
        horizon: usize,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Override the built-in studentized-range constant.
        #[arg(long)]
        q_alpha: Option<f64>,
        #[arg(long, default_value = ".")]
        output_dir: PathBuf,
    },
}

#[derive(Args)]
struct TrainArgs {
    /// JSON run configuration; every key can be overridden by a flag.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    input: Option<PathBuf>,
    /// Train every input listed in this manifest (one path per line).
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Parallel instrument runs for --manifest.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    column: Option<String>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    #[arg(long, value_enum)]
    cell: Option<CellArg>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    l2: Option<f64>,
    #[arg(long)]
    max_epochs: Option<usize>,
    #[arg(long)]
    patience: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    skip_layer: Option<bool>,
    #[arg(long)]
    directed_graph: Option<bool>,
    #[arg(long)]
    dropout_rate: Option<f64>,
    #[arg(long, value_enum)]
    phi: Option<ActArg>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ModelArg {
    Baseline,
    Tg,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum CellArg {
    Rnn,
    Lstm,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ActArg {
    Identity,
    Relu,
    Elu,
    Selu,
    LeakyRelu,
    Tanh,
    Sigmoid,
}

impl TrainArgs {
    fn run_config(&self) -> Result<RunConfig, CliError> {
        let base = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let overrides = RunConfig {
            input: self.input.clone(),
            column: self.column.clone(),
            window: self.window,
            preset: self.preset.clone(),
            model: self.model.map(|m| match m {
                ModelArg::Baseline => ModelKind::Baseline,
                ModelArg::Tg => ModelKind::TimeGeometric,
            }),
            cell: self.cell.map(|c| match c {
                CellArg::Rnn => TimeCell::Rnn,
                CellArg::Lstm => TimeCell::Lstm,
            }),
            m: self.m,
            q: self.q,
            seed: self.seed,
            output_dir: self.output_dir.clone(),
            learning_rate: self.learning_rate,
            l2: self.l2,
            max_epochs: self.max_epochs,
            patience: self.patience,
            batch_size: self.batch_size,
            skip_layer: self.skip_layer,
            directed_graph: self.directed_graph,
            dropout: self.dropout_rate.map(|r| r > 0.0),
            dropout_rate: self.dropout_rate,
            time_layers: None,
            time_hidden: None,
            gcn_layers: None,
            gcn_hidden: None,
            lstm_hidden: None,
            phi: self.phi.map(|a| match a {
                ActArg::Identity => Act::Identity,
                ActArg::Relu => Act::Relu,
                ActArg::Elu => Act::Elu,
                ActArg::Selu => Act::Selu,
                ActArg::LeakyRelu => Act::LeakyRelu,
                ActArg::Tanh => Act::Tanh,
                ActArg::Sigmoid => Act::Sigmoid,
            }),
            rho: None,
        };
        Ok(base.overridden_by(&overrides))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Vg {
            input,
            column,
            last,
            directed,
            output_dir,
        } => commands::cmd_vg(&input, &column, last, directed, &output_dir),
        Command::Normalize {
            input,
            column,
            window,
            output,
            dump_windows,
            m,
            q,
        } => commands::cmd_normalize(
            &input,
            &column,
            window,
            &output,
            dump_windows.as_deref().map(|p| (p, m, q)),
        ),
        Command::Train(args) => {
            let run = args.run_config()?;
            match &args.manifest {
                Some(manifest) => commands::cmd_train_manifest(&run, manifest, args.jobs),
                None => commands::cmd_train(&run).map(|_| ()),
            }
        }
        Command::Evaluate {
            checkpoint,
            input,
            column,
            window,
            dataset,
            algorithm,
            output,
        } => commands::cmd_evaluate(
            &checkpoint,
            &input,
            &column,
            window,
            dataset.as_deref(),
            algorithm.as_deref(),
            output.as_deref(),
        ),
        Command::Compare {
            input,
            metric,
            horizon,
            tests,
            pairs,
            alpha,
            output,
        } => commands::cmd_compare(
            &input,
            &metric,
            horizon,
            &tests,
            &pairs,
            alpha,
            output.as_deref(),
        ),
        Command::Rank {
            input,
            metric,
            horizon,
            alpha,
            q_alpha,
            output_dir,
        } => commands::cmd_rank(&input, &metric, horizon, alpha, q_alpha, &output_dir),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
