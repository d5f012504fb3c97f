//! Implementations of the six subcommands.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use vistat_core::metrics::MetricReport;
use vistat_core::series::{
    self, denormalize, load_ohlcv, make_windows, rolling_normalize, split, NormalizationState,
    SeriesTable, SplitSpec, WindowSample,
};
use vistat_core::statcompare::{
    friedman, nemenyi, paired_t, q_alpha_05, rank_matrix, sign_test, wilcoxon, Decision,
    MetricsMatrix, StatError, TestResult,
};
use vistat_core::tgmodel::{
    baseline_forward, checkpoint::Checkpoint, tg_forward, train as train_model, ModelKind,
    TgConfig,
};
use vistat_core::visgraph::build_vg;

use crate::config::RunConfig;
use crate::errors::CliError;

/// Tracks written files so a failed run leaves nothing behind.
struct OutputGuard {
    written: Vec<PathBuf>,
    armed: bool,
}

impl OutputGuard {
    fn new() -> Self {
        Self {
            written: Vec::new(),
            armed: true,
        }
    }

    fn write(&mut self, path: &Path, contents: &str) -> Result<(), CliError> {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir)?;
            }
        }
        std::fs::write(path, contents)?;
        self.written.push(path.to_path_buf());
        Ok(())
    }

    fn disarm(mut self) {
        self.armed = false;
    }
}

impl Drop for OutputGuard {
    fn drop(&mut self) {
        if self.armed {
            for path in &self.written {
                let _ = std::fs::remove_file(path);
            }
        }
    }
}

/// Loaded series with its normalized view and feature matrix.
struct Prepared {
    table: SeriesTable,
    norm: Vec<f64>,
    state: NormalizationState,
    /// Raw values aligned with the normalized timeline.
    raw_tail: Vec<f64>,
    features: Array2<f64>,
}

fn prepare(input: &Path, column: &str, window: usize) -> Result<Prepared, CliError> {
    let table = load_ohlcv(input)?;
    let raw = table
        .column(column)
        .ok_or_else(|| CliError::Input(format!("unknown column `{column}`")))?
        .to_vec();
    let (norm, state) = rolling_normalize(&raw, window)?;
    let raw_tail = raw[window - 1..].to_vec();
    let features = Array2::from_shape_vec((norm.len(), 1), norm.clone())
        .expect("normalized series forms a column");
    Ok(Prepared {
        table,
        norm,
        state,
        raw_tail,
        features,
    })
}

fn partition_windows(
    prep: &Prepared,
    cfg: &TgConfig,
    partition: usize,
) -> Result<Vec<WindowSample>, CliError> {
    let parts = split(prep.norm.len(), SplitSpec::default())?;
    let (samples, _) = make_windows(
        &prep.features,
        &prep.norm,
        &prep.raw_tail,
        cfg.m,
        cfg.q,
        parts[partition].clone(),
    );
    if samples.is_empty() {
        return Err(CliError::Input(format!(
            "partition {partition} too short for m = {}, q = {}",
            cfg.m, cfg.q
        )));
    }
    Ok(samples)
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "series".to_string())
}

// ---------------------------------------------------------------- vg

pub fn cmd_vg(
    input: &Path,
    column: &str,
    last: Option<usize>,
    directed: bool,
    output_dir: &Path,
) -> Result<(), CliError> {
    let table = load_ohlcv(input)?;
    let values = table
        .column(column)
        .ok_or_else(|| CliError::Input(format!("unknown column `{column}`")))?;
    let values = match last {
        Some(m) if m < values.len() => &values[values.len() - m..],
        _ => values,
    };
    let graph = build_vg(values, directed)?;
    let stem = file_stem(input);
    let mut guard = OutputGuard::new();
    guard.write(
        &output_dir.join(format!("{stem}.edges.csv")),
        &graph.to_edge_list_csv(),
    )?;
    guard.write(
        &output_dir.join(format!("{stem}.matrix.csv")),
        &graph.to_matrix_csv(),
    )?;
    guard.disarm();
    println!(
        "visibility graph: {} nodes, {} edges{}",
        graph.node_count(),
        graph.edge_count(),
        if directed { " (directed)" } else { "" }
    );
    Ok(())
}

// ---------------------------------------------------------- normalize

pub fn cmd_normalize(
    input: &Path,
    column: &str,
    window: usize,
    output: &Path,
    dump_windows: Option<(&Path, usize, usize)>,
) -> Result<(), CliError> {
    let prep = prepare(input, column, window)?;
    let mut csv = String::from("timestamp,raw,normalized,mean,std\n");
    for (i, norm) in prep.norm.iter().enumerate() {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            prep.table.timestamps[window - 1 + i],
            prep.raw_tail[i],
            norm,
            prep.state.means[i],
            prep.state.stds[i]
        );
    }
    let mut guard = OutputGuard::new();
    guard.write(output, &csv)?;
    if let Some((path, m, q)) = dump_windows {
        let (samples, truncated) = make_windows(
            &prep.features,
            &prep.norm,
            &prep.raw_tail,
            m,
            q,
            0..prep.norm.len(),
        );
        if truncated {
            eprintln!("warning: series shorter than m + q, no windows emitted");
        }
        guard.write(path, &series::windows_to_csv(&samples))?;
    }
    guard.disarm();
    println!(
        "normalized {} observations (window {window}), wrote {}",
        prep.norm.len(),
        output.display()
    );
    Ok(())
}

// -------------------------------------------------------------- train

pub struct TrainOutputs {
    pub checkpoint: PathBuf,
    pub log: PathBuf,
    pub metadata: PathBuf,
}

pub fn cmd_train(run: &RunConfig) -> Result<TrainOutputs, CliError> {
    let input = run
        .input
        .clone()
        .ok_or_else(|| CliError::Input("train needs an input CSV (flag or config)".into()))?;
    let cfg = run.tg_config()?;
    let prep = prepare(&input, run.column_or_default(), run.window_or_default())?;
    let train_w = partition_windows(&prep, &cfg, 0)?;
    let val_w = partition_windows(&prep, &cfg, 1)?;
    let outcome = train_model(&train_w, &val_w, &cfg)?;

    let out_dir = run
        .output_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("."));
    let stem = file_stem(&input);
    let outputs = TrainOutputs {
        checkpoint: out_dir.join(format!("{stem}.checkpoint.json")),
        log: out_dir.join(format!("{stem}.training_log.csv")),
        metadata: out_dir.join(format!("{stem}.run.json")),
    };

    let metadata = serde_json::json!({
        "input": input.display().to_string(),
        "instrument": prep.table.instrument_id,
        "column": run.column_or_default(),
        "window": run.window_or_default(),
        "seed": cfg.seed,
        "preset": run.preset.clone().unwrap_or_else(|| "none".into()),
        "config_hash": run.content_hash(),
        "best_epoch": outcome.best_epoch,
        "best_val_loss": outcome.best_val_loss,
        "epochs_run": outcome.log.len(),
        "stopped_early": outcome.stopped_early,
    });

    let mut guard = OutputGuard::new();
    guard.write(
        &outputs.checkpoint,
        &Checkpoint::new(&cfg, &outcome.params).to_json()?,
    )?;
    guard.write(&outputs.log, &outcome.log_csv())?;
    guard.write(
        &outputs.metadata,
        &serde_json::to_string_pretty(&metadata).expect("metadata serializes"),
    )?;
    guard.disarm();
    println!(
        "trained {:?} on {}: best epoch {} (val loss {:.6}), {} epochs{}",
        cfg.model,
        prep.table.instrument_id,
        outcome.best_epoch,
        outcome.best_val_loss,
        outcome.log.len(),
        if outcome.stopped_early {
            ", stopped early"
        } else {
            ""
        }
    );
    Ok(outputs)
}

/// Batch training: one input per manifest line, per-run seeds `seed + index`.
pub fn cmd_train_manifest(run: &RunConfig, manifest: &Path, jobs: usize) -> Result<(), CliError> {
    let text = std::fs::read_to_string(manifest)
        .map_err(|e| CliError::Input(format!("cannot read manifest {}: {e}", manifest.display())))?;
    let inputs: Vec<PathBuf> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(PathBuf::from)
        .collect();
    if inputs.is_empty() {
        return Err(CliError::Input("manifest lists no inputs".into()));
    }
    let base_seed = run.resolve_seed()?;
    let runs: Vec<RunConfig> = inputs
        .iter()
        .enumerate()
        .map(|(i, input)| {
            let mut r = run.clone();
            r.input = Some(input.clone());
            r.seed = Some(base_seed + i as u64);
            r
        })
        .collect();
    if jobs <= 1 {
        for r in &runs {
            cmd_train(r)?;
        }
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| CliError::Internal(e.to_string()))?;
        pool.install(|| {
            use rayon::prelude::*;
            runs.par_iter().try_for_each(|r| cmd_train(r).map(|_| ()))
        })?;
    }
    Ok(())
}

// ----------------------------------------------------------- evaluate

pub fn cmd_evaluate(
    checkpoint_path: &Path,
    input: &Path,
    column: &str,
    window: usize,
    dataset: Option<&str>,
    algorithm: Option<&str>,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let (cfg, params) = Checkpoint::load(checkpoint_path)?.into_parts();
    let prep = prepare(input, column, window)?;
    let test_w = partition_windows(&prep, &cfg, 2)?;

    let mut y_true = Vec::new();
    let mut y_pred = Vec::new();
    for sample in &test_w {
        let pred = match cfg.model {
            ModelKind::TimeGeometric => tg_forward(sample, &params, &cfg)?,
            ModelKind::Baseline => baseline_forward(sample, &params, &cfg)?,
        };
        for (h, p) in pred.iter().enumerate() {
            let idx = sample.t_index + h + 1;
            y_pred.push(denormalize(*p, prep.state.means[idx], prep.state.stds[idx])?);
            y_true.push(sample.raw_y[h]);
        }
    }
    let report = MetricReport::compute(&y_true, &y_pred)?;
    let dataset = dataset.unwrap_or(&prep.table.instrument_id);
    let algorithm = algorithm
        .map(str::to_string)
        .unwrap_or_else(|| format!("{:?}", cfg.model).to_lowercase());
    let csv = format!(
        "{}\n{}\n",
        MetricReport::csv_header(),
        report.to_csv_row(dataset, &algorithm, cfg.q)
    );
    match output {
        Some(path) => {
            let mut guard = OutputGuard::new();
            guard.write(path, &csv)?;
            guard.disarm();
        }
        None => print!("{csv}"),
    }
    Ok(())
}

// ------------------------------------------------------------ compare

fn report_row(test: &str, metric: &str, horizon: usize, family: &str, r: &TestResult) -> String {
    format!(
        "{test},{metric},{horizon},{family},{},{},{},{}\n",
        r.statistic,
        r.critical,
        r.decision,
        r.warnings.join("; ")
    )
}

pub const REPORT_HEADER: &str = "test,metric,horizon,pair_or_family,statistic,critical,decision,warnings";

pub fn cmd_compare(
    matrix_path: &Path,
    metric: &str,
    horizon: usize,
    tests: &[String],
    pairs: &[String],
    alpha: f64,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let text = std::fs::read_to_string(matrix_path)?;
    let matrix = MetricsMatrix::from_csv(&text, metric, horizon)?;
    if pairs.is_empty() {
        return Err(CliError::Input(
            "compare needs at least one --pair BASELINE:VARIANT".into(),
        ));
    }
    let mut csv = format!("{REPORT_HEADER}\n");
    for pair in pairs {
        let (bl_name, tg_name) = pair
            .split_once(':')
            .ok_or_else(|| CliError::Input(format!("bad pair `{pair}`, expected BASELINE:VARIANT")))?;
        let bl = matrix.column(bl_name)?;
        let tg = matrix.column(tg_name)?;
        for test in tests {
            let result = match test.as_str() {
                "t" => paired_t(&bl, &tg, alpha),
                "wilcoxon" => wilcoxon(&bl, &tg, alpha),
                "sign" => sign_test(&bl, &tg, alpha),
                other => {
                    return Err(CliError::Input(format!(
                        "unknown test `{other}` (available: t, wilcoxon, sign)"
                    )))
                }
            };
            let result = match result {
                Ok(r) => r,
                // a degenerate sample (e.g. identical columns) cannot reject
                Err(StatError::Degenerate(msg)) => TestResult {
                    statistic: 0.0,
                    critical: 0.0,
                    decision: Decision::Accept,
                    alpha,
                    warnings: vec![format!("degenerate input: {msg}")],
                },
                Err(e) => return Err(e.into()),
            };
            csv.push_str(&report_row(test, metric, horizon, pair, &result));
        }
    }
    match output {
        Some(path) => {
            let mut guard = OutputGuard::new();
            guard.write(path, &csv)?;
            guard.disarm();
        }
        None => print!("{csv}"),
    }
    Ok(())
}

// --------------------------------------------------------------- rank

pub fn cmd_rank(
    matrix_path: &Path,
    metric: &str,
    horizon: usize,
    alpha: f64,
    q_alpha: Option<f64>,
    output_dir: &Path,
) -> Result<(), CliError> {
    let text = std::fs::read_to_string(matrix_path)?;
    let matrix = MetricsMatrix::from_csv(&text, metric, horizon)?;
    let ranks = rank_matrix(&matrix);
    let fr = friedman(&ranks, alpha)?;
    let k = matrix.n_algorithms();
    let q = match q_alpha {
        Some(v) => v,
        None => q_alpha_05(k).ok_or_else(|| {
            CliError::Input(format!("no built-in q_alpha for K = {k}; pass --q-alpha"))
        })?,
    };
    let nem = nemenyi(&ranks.average, matrix.n_datasets(), q)?;

    let mut ranks_csv = String::from("algorithm,average_rank\n");
    for (name, avg) in matrix.algorithm_ids.iter().zip(&ranks.average) {
        let _ = writeln!(ranks_csv, "{name},{avg}");
    }
    let mut report = format!("{REPORT_HEADER}\n");
    report.push_str(&report_row("friedman", metric, horizon, "all", &fr));

    let mut nem_text = format!("nemenyi critical difference: {:.4} (q_alpha {q})\n", nem.cd);
    let width = matrix
        .algorithm_ids
        .iter()
        .map(|s| s.len())
        .max()
        .unwrap_or(0)
        .max(4);
    let _ = write!(nem_text, "{:width$}", "");
    for name in &matrix.algorithm_ids {
        let _ = write!(nem_text, " {name:>width$}");
    }
    nem_text.push('\n');
    for (i, name) in matrix.algorithm_ids.iter().enumerate() {
        let _ = write!(nem_text, "{name:width$}");
        for j in 0..k {
            let mark = if i == j {
                "-"
            } else if nem.significant[i][j] {
                "*"
            } else {
                "."
            };
            let _ = write!(nem_text, " {mark:>width$}");
        }
        nem_text.push('\n');
    }

    let stem = file_stem(matrix_path);
    let mut guard = OutputGuard::new();
    guard.write(&output_dir.join(format!("{stem}.ranks.csv")), &ranks_csv)?;
    guard.write(&output_dir.join(format!("{stem}.rank_report.csv")), &report)?;
    guard.write(&output_dir.join(format!("{stem}.nemenyi.txt")), &nem_text)?;
    guard.disarm();
    println!(
        "friedman: statistic {:.4}, critical {:.4}, decision {}; CD {:.4}",
        fr.statistic, fr.critical, fr.decision, nem.cd
    );
    Ok(())
}
