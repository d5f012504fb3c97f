//! OHLCV ingestion, rolling-window normalization, chronological splitting,
//! and supervised window extraction.

use std::fmt::Write as _;
use std::ops::Range;
use std::path::Path;

use ndarray::Array2;
use thiserror::Error;

/// Column order used for feature matrices built from a [`SeriesTable`].
pub const OHLCV_COLUMNS: [&str; 5] = ["open", "high", "low", "close", "volume"];

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("missing column `{0}` in CSV header")]
    MissingColumn(String),
    #[error("empty input: no header row")]
    EmptyInput,
    #[error("line {line}: expected {expected} fields, found {found}")]
    FieldCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: cannot parse `{value}` as {field}")]
    BadValue {
        line: usize,
        field: String,
        value: String,
    },
    #[error("duplicate date `{0}`")]
    DuplicateDate(String),
    #[error("window length {w} invalid for series of length {len} (need 2 <= w <= len)")]
    BadWindow { w: usize, len: usize },
    #[error("degenerate window at index {0}: standard deviation is zero")]
    DegenerateWindow(usize),
    #[error("invalid normalization state: sigma = {0} is not positive")]
    InvalidSigma(f64),
    #[error("invalid split fractions ({0}, {1}, {2}): each must lie in (0,1) and sum to 1")]
    BadSplitSpec(f64, f64, f64),
    #[error("cannot split {t} observations into three nonempty chronological parts")]
    SplitTooSmall { t: usize },
}

/// Timestamped OHLCV observations for one instrument. Rows are sorted
/// ascending by date and all columns share the same length.
#[derive(Debug, Clone)]
pub struct SeriesTable {
    pub instrument_id: String,
    pub timestamps: Vec<String>,
    pub open: Vec<f64>,
    pub high: Vec<f64>,
    pub low: Vec<f64>,
    pub close: Vec<f64>,
    pub volume: Vec<f64>,
}

impl SeriesTable {
    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        match name {
            "open" => Some(&self.open),
            "high" => Some(&self.high),
            "low" => Some(&self.low),
            "close" => Some(&self.close),
            "volume" => Some(&self.volume),
            _ => None,
        }
    }
}

/// Trailing-window mean/std pairs produced by [`rolling_normalize`].
///
/// Entry `t` of `means`/`stds` describes raw index `t + w - 1`; the first
/// `w - 1` observations carry no statistics and are dropped from the
/// normalized series.
#[derive(Debug, Clone)]
pub struct NormalizationState {
    pub w: usize,
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

/// Chronological train/validation/test fractions.
#[derive(Debug, Clone, Copy)]
pub struct SplitSpec {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl SplitSpec {
    pub fn new(train: f64, val: f64, test: f64) -> Result<Self, SeriesError> {
        let ok = |f: f64| f > 0.0 && f < 1.0;
        if !ok(train) || !ok(val) || !ok(test) || (train + val + test - 1.0).abs() > 1e-9 {
            return Err(SeriesError::BadSplitSpec(train, val, test));
        }
        Ok(Self { train, val, test })
    }
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train: 0.6,
            val: 0.2,
            test: 0.2,
        }
    }
}

/// One supervised example: `m` rows of normalized features, the raw target
/// values backing graph construction, and the `q` future targets.
#[derive(Debug, Clone)]
pub struct WindowSample {
    /// Anchor index `t` on the normalized timeline (last feature row).
    pub t_index: usize,
    /// Normalized feature window, `m x F'`.
    pub features: Array2<f64>,
    /// Un-normalized target values over the same `m` indices.
    pub raw_target_window: Vec<f64>,
    /// Normalized targets at `t+1 .. t+q`.
    pub y: Vec<f64>,
    /// Raw (price-scale) targets at `t+1 .. t+q`.
    pub raw_y: Vec<f64>,
}

/// Load an OHLCV CSV with header `date,open,high,low,close,volume`
/// (columns may appear in any order). Rows are sorted ascending by date.
pub fn load_ohlcv(path: &Path) -> Result<SeriesTable, SeriesError> {
    let text = std::fs::read_to_string(path).map_err(|source| SeriesError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let instrument_id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "unknown".to_string());
    parse_ohlcv(&text, instrument_id)
}

/// CSV body parser behind [`load_ohlcv`]; exposed for in-memory callers.
pub fn parse_ohlcv(text: &str, instrument_id: String) -> Result<SeriesTable, SeriesError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(SeriesError::EmptyInput)?;
    let fields: Vec<&str> = header.split(',').map(str::trim).collect();
    let col = |name: &str| -> Result<usize, SeriesError> {
        fields
            .iter()
            .position(|f| f.eq_ignore_ascii_case(name))
            .ok_or_else(|| SeriesError::MissingColumn(name.to_string()))
    };
    let date_ix = col("date")?;
    let ix = [
        col("open")?,
        col("high")?,
        col("low")?,
        col("close")?,
        col("volume")?,
    ];

    let mut rows: Vec<(String, [f64; 5])> = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = i + 1;
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != fields.len() {
            return Err(SeriesError::FieldCount {
                line: line_no,
                expected: fields.len(),
                found: cells.len(),
            });
        }
        let date = cells[date_ix];
        if !is_iso_date(date) {
            return Err(SeriesError::BadValue {
                line: line_no,
                field: "date".to_string(),
                value: date.to_string(),
            });
        }
        let mut vals = [0.0; 5];
        for (slot, (&cix, name)) in ix.iter().zip(OHLCV_COLUMNS).enumerate() {
            vals[slot] = cells[cix].parse::<f64>().map_err(|_| SeriesError::BadValue {
                line: line_no,
                field: name.to_string(),
                value: cells[cix].to_string(),
            })?;
        }
        rows.push((date.to_string(), vals));
    }

    // ISO-8601 dates sort correctly as strings.
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    for pair in rows.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(SeriesError::DuplicateDate(pair[0].0.clone()));
        }
    }

    let mut table = SeriesTable {
        instrument_id,
        timestamps: Vec::with_capacity(rows.len()),
        open: Vec::with_capacity(rows.len()),
        high: Vec::with_capacity(rows.len()),
        low: Vec::with_capacity(rows.len()),
        close: Vec::with_capacity(rows.len()),
        volume: Vec::with_capacity(rows.len()),
    };
    for (date, v) in rows {
        table.timestamps.push(date);
        table.open.push(v[0]);
        table.high.push(v[1]);
        table.low.push(v[2]);
        table.close.push(v[3]);
        table.volume.push(v[4]);
    }
    Ok(table)
}

fn is_iso_date(s: &str) -> bool {
    let b = s.as_bytes();
    b.len() == 10
        && b[4] == b'-'
        && b[7] == b'-'
        && b.iter()
            .enumerate()
            .all(|(i, &c)| matches!(i, 4 | 7) || c.is_ascii_digit())
}

/// Standardize each observation by the mean and population standard deviation
/// of its trailing window of `w` observations (current one included). The
/// first `w - 1` indices are dropped.
pub fn rolling_normalize(
    series: &[f64],
    w: usize,
) -> Result<(Vec<f64>, NormalizationState), SeriesError> {
    if w < 2 || series.len() < w {
        return Err(SeriesError::BadWindow {
            w,
            len: series.len(),
        });
    }
    let out_len = series.len() - w + 1;
    let mut normalized = Vec::with_capacity(out_len);
    let mut means = Vec::with_capacity(out_len);
    let mut stds = Vec::with_capacity(out_len);
    for t in (w - 1)..series.len() {
        let window = &series[t + 1 - w..=t];
        let mean = window.iter().sum::<f64>() / w as f64;
        let var = window.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / w as f64;
        let std = var.sqrt();
        if std == 0.0 {
            return Err(SeriesError::DegenerateWindow(t));
        }
        normalized.push((series[t] - mean) / std);
        means.push(mean);
        stds.push(std);
    }
    Ok((normalized, NormalizationState { w, means, stds }))
}

/// Invert the rolling normalization at one index.
pub fn denormalize(normalized: f64, mean: f64, std: f64) -> Result<f64, SeriesError> {
    if std <= 0.0 {
        return Err(SeriesError::InvalidSigma(std));
    }
    Ok(std * normalized + mean)
}

/// Partition `0..t_len` into contiguous chronological train/val/test ranges
/// of sizes `floor(train*T)`, `floor(val*T)` and the remainder.
pub fn split(t_len: usize, spec: SplitSpec) -> Result<[Range<usize>; 3], SeriesError> {
    let train = (spec.train * t_len as f64).floor() as usize;
    let val = (spec.val * t_len as f64).floor() as usize;
    let test = t_len.saturating_sub(train + val);
    if train == 0 || val == 0 || test == 0 || train + val > t_len {
        return Err(SeriesError::SplitTooSmall { t: t_len });
    }
    Ok([0..train, train..train + val, train + val..t_len])
}

/// Extract every window whose `m` feature rows and `q` targets both lie
/// inside `partition`. Returns the samples and a flag that is true when the
/// partition was too short to produce any.
pub fn make_windows(
    features: &Array2<f64>,
    norm_target: &[f64],
    raw_target: &[f64],
    m: usize,
    q: usize,
    partition: Range<usize>,
) -> (Vec<WindowSample>, bool) {
    assert!(m >= 2 && q >= 1, "window needs m >= 2 and q >= 1");
    assert_eq!(features.nrows(), norm_target.len());
    assert_eq!(features.nrows(), raw_target.len());
    let len = partition.end.saturating_sub(partition.start);
    if len < m + q {
        return (Vec::new(), true);
    }
    let mut samples = Vec::with_capacity(len - m - q + 1);
    for t in (partition.start + m - 1)..(partition.end - q) {
        let lo = t + 1 - m;
        let x = features
            .slice(ndarray::s![lo..=t, ..])
            .to_owned();
        samples.push(WindowSample {
            t_index: t,
            features: x,
            raw_target_window: raw_target[lo..=t].to_vec(),
            y: norm_target[t + 1..=t + q].to_vec(),
            raw_y: raw_target[t + 1..=t + q].to_vec(),
        });
    }
    (samples, false)
}

/// Render one partition's windows as CSV
/// (`t_index,feature_0..feature_{F'-1},y_0..y_{q-1}`); feature columns hold
/// the anchor row of each window.
pub fn windows_to_csv(samples: &[WindowSample]) -> String {
    let mut out = String::new();
    let (f, q) = match samples.first() {
        Some(s) => (s.features.ncols(), s.y.len()),
        None => return "t_index\n".to_string(),
    };
    out.push_str("t_index");
    for i in 0..f {
        let _ = write!(out, ",feature_{i}");
    }
    for i in 0..q {
        let _ = write!(out, ",y_{i}");
    }
    out.push('\n');
    for s in samples {
        let _ = write!(out, "{}", s.t_index);
        let last = s.features.nrows() - 1;
        for i in 0..f {
            let _ = write!(out, ",{}", s.features[[last, i]]);
        }
        for y in &s.y {
            let _ = write!(out, ",{y}");
        }
        out.push('\n');
    }
    out
}
