//! End-to-end tests driving the `vistat` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn vistat() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vistat"))
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Writes an OHLCV CSV whose every price column equals `values`.
fn write_ohlcv(path: &Path, values: &[f64]) {
    let mut csv = String::from("date,open,high,low,close,volume\n");
    for (i, v) in values.iter().enumerate() {
        let day = i % 28 + 1;
        let month = (i / 28) % 12 + 1;
        let year = 2020 + i / (28 * 12);
        csv.push_str(&format!("{year:04}-{month:02}-{day:02},{v},{v},{v},{v},1000\n"));
    }
    fs::write(path, csv).unwrap();
}

fn wavy_series(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 100.0 + 10.0 * (i as f64 * 0.37).sin() + 0.05 * i as f64)
        .collect()
}

#[test]
fn vg_emits_expected_edge_list() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("tiny.csv");
    write_ohlcv(&input, &[3.0, 1.0, 2.0]);
    let out = run(vistat()
        .arg("vg")
        .arg(&input)
        .args(["--output-dir"])
        .arg(dir.path()));
    assert!(out.status.success(), "{}", stderr(&out));
    let edges = fs::read_to_string(dir.path().join("tiny.edges.csv")).unwrap();
    assert_eq!(edges, "src,dst\n0,1\n0,2\n1,2\n");
    assert!(dir.path().join("tiny.matrix.csv").exists());
}

#[test]
fn vg_directed_sawtooth_has_five_arcs() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("saw.csv");
    write_ohlcv(&input, &[1.0, 3.0, 1.0, 3.0, 1.0]);
    let out = run(vistat()
        .arg("vg")
        .arg(&input)
        .arg("--directed")
        .args(["--output-dir"])
        .arg(dir.path()));
    assert!(out.status.success(), "{}", stderr(&out));
    let edges = fs::read_to_string(dir.path().join("saw.edges.csv")).unwrap();
    assert_eq!(edges.lines().count() - 1, 5, "{edges}");
}

#[test]
fn vg_empty_input_exits_2() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("empty.csv");
    fs::write(&input, "").unwrap();
    let out = run(vistat()
        .arg("vg")
        .arg(&input)
        .args(["--output-dir"])
        .arg(dir.path()));
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(!stderr(&out).is_empty());
}

#[test]
fn normalize_drops_warmup_and_dumps_windows() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("series.csv");
    write_ohlcv(&input, &wavy_series(60));
    let norm_path = dir.path().join("norm.csv");
    let windows_path = dir.path().join("windows.csv");
    let out = run(vistat()
        .arg("normalize")
        .arg(&input)
        .args(["--window", "5"])
        .args(["--m", "4", "--q", "1"])
        .arg("--output")
        .arg(&norm_path)
        .arg("--dump-windows")
        .arg(&windows_path));
    assert!(out.status.success(), "{}", stderr(&out));
    let norm = fs::read_to_string(&norm_path).unwrap();
    // header + (60 - 5 + 1) rows
    assert_eq!(norm.lines().count(), 1 + 56);
    assert!(norm.starts_with("timestamp,raw,normalized,mean,std\n"));
    assert!(fs::read_to_string(&windows_path).unwrap().lines().count() > 1);
}

fn train_config(dir: &Path, input: &Path) -> PathBuf {
    let path = dir.join("config.json");
    let config = serde_json::json!({
        "input": input,
        "window": 5,
        "m": 4,
        "q": 1,
        "time_hidden": 4,
        "max_epochs": 3,
        "batch_size": 16,
        "output_dir": dir,
    });
    fs::write(&path, serde_json::to_string_pretty(&config).unwrap()).unwrap();
    path
}

#[test]
fn train_is_deterministic_and_models_differ() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("series.csv");
    write_ohlcv(&input, &wavy_series(90));
    let config = train_config(dir.path(), &input);

    let ckpt = dir.path().join("series.checkpoint.json");
    let mut bytes = Vec::new();
    for _ in 0..2 {
        let out = run(vistat()
            .arg("train")
            .arg("--config")
            .arg(&config)
            .args(["--seed", "7", "--model", "baseline"]));
        assert!(out.status.success(), "{}", stderr(&out));
        bytes.push(fs::read(&ckpt).unwrap());
    }
    assert_eq!(bytes[0], bytes[1], "same config and seed must reproduce bytes");
    let baseline = String::from_utf8(bytes.pop().unwrap()).unwrap();
    assert!(!baseline.contains("geo."));

    let out = run(vistat()
        .arg("train")
        .arg("--config")
        .arg(&config)
        .args(["--seed", "7", "--model", "tg"]));
    assert!(out.status.success(), "{}", stderr(&out));
    let tg = fs::read_to_string(&ckpt).unwrap();
    assert!(tg.contains("geo.proj.w"), "geometric block present");
    // training log and metadata accompany the checkpoint
    let log = fs::read_to_string(dir.path().join("series.training_log.csv")).unwrap();
    assert!(log.starts_with("epoch,train_loss,val_loss\n"));
    let meta = fs::read_to_string(dir.path().join("series.run.json")).unwrap();
    assert!(meta.contains("\"config_hash\""));
    assert!(meta.contains("\"seed\": 7"));
}

#[test]
fn train_seed_falls_back_to_env() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("series.csv");
    write_ohlcv(&input, &wavy_series(90));
    let config = train_config(dir.path(), &input);
    let out = run(vistat()
        .arg("train")
        .arg("--config")
        .arg(&config)
        .env("VISTAT_SEED", "9"));
    assert!(out.status.success(), "{}", stderr(&out));
    let meta = fs::read_to_string(dir.path().join("series.run.json")).unwrap();
    assert!(meta.contains("\"seed\": 9"), "{meta}");
}

#[test]
fn evaluate_reports_metrics_for_the_trained_horizon() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("series.csv");
    write_ohlcv(&input, &wavy_series(120));
    let config = train_config(dir.path(), &input);
    let out = run(vistat().arg("train").arg("--config").arg(&config));
    assert!(out.status.success(), "{}", stderr(&out));

    let out = run(vistat()
        .arg("evaluate")
        .arg("--checkpoint")
        .arg(dir.path().join("series.checkpoint.json"))
        .arg("--input")
        .arg(&input)
        .args(["--window", "5", "--algorithm", "baseline-rnn"]));
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("dataset,algorithm,horizon,rmse,mae,mape,mase,M")
    );
    let row = lines.next().unwrap();
    assert!(row.starts_with("series,baseline-rnn,1,"), "{row}");
}

#[test]
fn evaluate_constant_series_exits_3() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("series.csv");
    write_ohlcv(&input, &wavy_series(120));
    let config = train_config(dir.path(), &input);
    let out = run(vistat().arg("train").arg("--config").arg(&config));
    assert!(out.status.success(), "{}", stderr(&out));

    let constant = dir.path().join("flat.csv");
    write_ohlcv(&constant, &vec![42.0; 120]);
    let out = run(vistat()
        .arg("evaluate")
        .arg("--checkpoint")
        .arg(dir.path().join("series.checkpoint.json"))
        .arg("--input")
        .arg(&constant)
        .args(["--window", "5"]));
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

fn write_matrix(path: &Path, algos: &[&str], rows: &[Vec<f64>]) {
    let mut csv = format!("dataset,{}\n", algos.join(","));
    for (i, row) in rows.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        csv.push_str(&format!("d{i},{}\n", cells.join(",")));
    }
    fs::write(path, csv).unwrap();
}

#[test]
fn compare_dominant_variant_rejects_sign_at_90() {
    let dir = TempDir::new().unwrap();
    let matrix = dir.path().join("matrix.csv");
    let rows: Vec<Vec<f64>> = (0..90)
        .map(|i| vec![10.0 + i as f64, 9.0 + i as f64])
        .collect();
    write_matrix(&matrix, &["BL", "TG"], &rows);
    let report = dir.path().join("report.csv");
    let out = run(vistat()
        .arg("compare")
        .arg(&matrix)
        .args(["--pair", "BL:TG"])
        .arg("--output")
        .arg(&report));
    assert!(out.status.success(), "{}", stderr(&out));
    let text = fs::read_to_string(&report).unwrap();
    assert!(text.starts_with("test,metric,horizon,pair_or_family,statistic,critical,decision,warnings\n"));
    let sign = text.lines().find(|l| l.starts_with("sign,")).unwrap();
    let cells: Vec<&str> = sign.split(',').collect();
    assert_eq!(cells[3], "BL:TG");
    assert_eq!(cells[4], "90");
    assert_eq!(cells[6], "R");
}

#[test]
fn compare_identical_columns_accepts_with_warnings() {
    let dir = TempDir::new().unwrap();
    let matrix = dir.path().join("matrix.csv");
    let rows: Vec<Vec<f64>> = (0..30).map(|i| vec![1.0 + i as f64, 1.0 + i as f64]).collect();
    write_matrix(&matrix, &["A", "B"], &rows);
    let out = run(vistat().arg("compare").arg(&matrix).args(["--pair", "A:B"]));
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    for test in ["t", "wilcoxon", "sign"] {
        let line = text
            .lines()
            .find(|l| l.starts_with(&format!("{test},")))
            .unwrap();
        assert!(line.split(',').nth(6) == Some("A"), "{line}");
    }
    assert!(text.contains("degenerate input"));
}

#[test]
fn compare_unknown_column_exits_2() {
    let dir = TempDir::new().unwrap();
    let matrix = dir.path().join("matrix.csv");
    write_matrix(&matrix, &["A", "B"], &[vec![1.0, 2.0], vec![2.0, 1.0]]);
    let out = run(vistat()
        .arg("compare")
        .arg(&matrix)
        .args(["--pair", "A:MISSING"]));
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("MISSING"), "{}", stderr(&out));
}

#[test]
fn rank_emits_ranks_friedman_and_nemenyi() {
    let dir = TempDir::new().unwrap();
    let matrix = dir.path().join("matrix.csv");
    // algorithm j scores j + noise: a clear, consistent ordering
    let rows: Vec<Vec<f64>> = (0..12)
        .map(|i| (0..6).map(|j| j as f64 + 0.01 * i as f64).collect())
        .collect();
    write_matrix(&matrix, &["a1", "a2", "a3", "a4", "a5", "a6"], &rows);
    let out = run(vistat()
        .arg("rank")
        .arg(&matrix)
        .args(["--output-dir"])
        .arg(dir.path()));
    assert!(out.status.success(), "{}", stderr(&out));

    let ranks = fs::read_to_string(dir.path().join("matrix.ranks.csv")).unwrap();
    assert!(ranks.starts_with("algorithm,average_rank\n"));
    assert!(ranks.contains("a1,1\n"), "{ranks}");
    let report = fs::read_to_string(dir.path().join("matrix.rank_report.csv")).unwrap();
    let friedman = report.lines().nth(1).unwrap();
    assert!(friedman.starts_with("friedman,rmse,1,all,"), "{friedman}");
    assert!(friedman.split(',').nth(6) == Some("R"), "{friedman}");
    let nem = fs::read_to_string(dir.path().join("matrix.nemenyi.txt")).unwrap();
    assert!(nem.contains("critical difference"));
    assert!(nem.contains('*'), "extreme rank gaps should be significant");
}
