//! Run configuration: JSON file, flag overrides (flags win), presets, and a
//! content hash for run metadata.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use vistat_core::tgmodel::{tape::Act, ModelKind, TgConfig, TimeCell};

use crate::errors::CliError;

/// JSON-facing configuration; every key is optional so that flags and
/// presets can fill the gaps.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub column: Option<String>,
    /// Rolling-normalization window length.
    pub window: Option<usize>,
    pub preset: Option<String>,
    pub model: Option<ModelKind>,
    pub cell: Option<TimeCell>,
    pub m: Option<usize>,
    pub q: Option<usize>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub learning_rate: Option<f64>,
    pub l2: Option<f64>,
    pub max_epochs: Option<usize>,
    pub patience: Option<usize>,
    pub batch_size: Option<usize>,
    pub skip_layer: Option<bool>,
    pub directed_graph: Option<bool>,
    pub dropout: Option<bool>,
    pub dropout_rate: Option<f64>,
    pub time_layers: Option<usize>,
    pub time_hidden: Option<usize>,
    pub gcn_layers: Option<usize>,
    pub gcn_hidden: Option<usize>,
    pub lstm_hidden: Option<usize>,
    pub phi: Option<Act>,
    pub rho: Option<Act>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("bad config {}: {e}", path.display())))
    }

    /// Overlay `other` onto `self`: any key set in `other` wins.
    pub fn overridden_by(mut self, other: &RunConfig) -> Self {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if other.$field.is_some() { self.$field = other.$field.clone(); })*
            };
        }
        take!(
            input, column, window, preset, model, cell, m, q, seed, output_dir,
            learning_rate, l2, max_epochs, patience, batch_size, skip_layer,
            directed_graph, dropout, dropout_rate, time_layers, time_hidden,
            gcn_layers, gcn_hidden, lstm_hidden, phi, rho
        );
        self
    }

    /// Seed precedence: explicit value, then `VISTAT_SEED`, then 0.
    pub fn resolve_seed(&self) -> Result<u64, CliError> {
        if let Some(seed) = self.seed {
            return Ok(seed);
        }
        match std::env::var("VISTAT_SEED") {
            Ok(v) => v
                .parse()
                .map_err(|_| CliError::Input(format!("VISTAT_SEED `{v}` is not an integer"))),
            Err(_) => Ok(0),
        }
    }

    /// Final model configuration: preset base, then explicit keys on top.
    pub fn tg_config(&self) -> Result<TgConfig, CliError> {
        let model = self.model.unwrap_or(ModelKind::Baseline);
        let cell = self.cell.unwrap_or(TimeCell::Rnn);
        let mut cfg = match self.preset.as_deref() {
            None | Some("desk-rnn") | Some("desk-lstm") => {
                let cell = match self.preset.as_deref() {
                    Some("desk-lstm") => TimeCell::Lstm,
                    Some("desk-rnn") => TimeCell::Rnn,
                    _ => cell,
                };
                TgConfig::desk(model, cell)
            }
            Some(other) => {
                return Err(CliError::Input(format!(
                    "unknown preset `{other}` (available: desk-rnn, desk-lstm)"
                )))
            }
        };
        if self.cell.is_some() {
            cfg.time_cell = cell;
        }
        macro_rules! apply {
            ($($field:ident),*) => {
                $(if let Some(v) = self.$field { cfg.$field = v; })*
            };
        }
        apply!(
            m, q, learning_rate, l2, max_epochs, patience, batch_size, skip_layer,
            directed_graph, dropout, dropout_rate, time_layers, time_hidden,
            gcn_layers, gcn_hidden, lstm_hidden, phi, rho
        );
        cfg.seed = self.resolve_seed()?;
        cfg.validate().map_err(CliError::input)?;
        Ok(cfg)
    }

    /// SHA-256 over the canonical JSON form of the effective configuration.
    pub fn content_hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn window_or_default(&self) -> usize {
        self.window.unwrap_or(30)
    }

    pub fn column_or_default(&self) -> &str {
        self.column.as_deref().unwrap_or("close")
    }
}
