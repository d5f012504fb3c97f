//! Model configuration and the named parameter set.

use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::tape::Act;
use super::ModelError;

/// Fixed fully-connected stack widths.
pub const FC_WIDTHS: [usize; 4] = [128, 64, 32, 16];

pub const LSTM_GATES: [&str; 4] = ["i", "f", "g", "o"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeCell {
    /// Plain (Elman) recurrent cell with tanh state update.
    Rnn,
    Lstm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// Time component + fully connected stack only.
    Baseline,
    /// Time, geometric, and fully connected components.
    TimeGeometric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TgConfig {
    pub model: ModelKind,
    /// Window length (nodes per visibility graph).
    pub m: usize,
    /// Forecast horizon.
    pub q: usize,
    /// Feature count F'.
    pub features: usize,
    pub time_cell: TimeCell,
    pub time_layers: usize,
    pub time_hidden: usize,
    pub gcn_layers: usize,
    pub gcn_hidden: usize,
    /// Hidden size of the geometric component's LSTM pass.
    pub lstm_hidden: usize,
    /// Activation for the time projection and the FC stack.
    pub phi: Act,
    /// Activation inside GCN layers.
    pub rho: Act,
    pub skip_layer: bool,
    pub dropout: bool,
    pub dropout_rate: f64,
    /// Build directed (left-to-right) visibility graphs; the adjacency is
    /// symmetrized before normalization either way.
    pub directed_graph: bool,
    pub learning_rate: f64,
    pub l2: f64,
    pub max_epochs: usize,
    pub patience: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl TgConfig {
    /// Small desk-scale defaults; callers override what they need.
    pub fn desk(model: ModelKind, time_cell: TimeCell) -> Self {
        Self {
            model,
            m: 16,
            q: 1,
            features: 1,
            time_cell,
            time_layers: 1,
            time_hidden: 16,
            gcn_layers: 1,
            gcn_hidden: 8,
            lstm_hidden: 8,
            phi: Act::Identity,
            rho: Act::Relu,
            skip_layer: true,
            dropout: false,
            dropout_rate: 0.0,
            directed_graph: false,
            learning_rate: 1e-3,
            l2: 1e-5,
            max_epochs: 1000,
            patience: 20,
            batch_size: 32,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let dims = [
            ("m", self.m),
            ("q", self.q),
            ("features", self.features),
            ("time_layers", self.time_layers),
            ("time_hidden", self.time_hidden),
            ("batch_size", self.batch_size),
            ("patience", self.patience),
            ("max_epochs", self.max_epochs),
        ];
        for (name, v) in dims {
            if v == 0 {
                return Err(ModelError::Config(format!("{name} must be >= 1")));
            }
        }
        if self.m < 2 {
            return Err(ModelError::Config("m must be >= 2".into()));
        }
        if self.model == ModelKind::TimeGeometric
            && (self.gcn_layers == 0 || self.gcn_hidden == 0 || self.lstm_hidden == 0)
        {
            return Err(ModelError::Config(
                "geometric component sizes must be >= 1".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return Err(ModelError::Config(format!(
                "dropout rate {} outside [0, 1)",
                self.dropout_rate
            )));
        }
        if self.l2 < 0.0 {
            return Err(ModelError::Config("l2 coefficient must be >= 0".into()));
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(ModelError::Config("learning rate must be finite and >= 0".into()));
        }
        Ok(())
    }

    /// Flattened FC input width.
    pub fn fc_input(&self) -> usize {
        self.m * self.features * if self.skip_layer { 2 } else { 1 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Param {
    pub name: String,
    pub is_bias: bool,
    #[serde(
        serialize_with = "super::checkpoint::serialize_array",
        deserialize_with = "super::checkpoint::deserialize_array"
    )]
    pub value: Array2<f64>,
}

/// All trainable parameters, in a deterministic named order.
#[derive(Debug, Clone)]
pub struct TgParams {
    pub params: Vec<Param>,
}

/// Shape plan for one parameter.
struct Spec {
    name: String,
    rows: usize,
    cols: usize,
    is_bias: bool,
}

fn weight(name: impl Into<String>, rows: usize, cols: usize) -> Spec {
    Spec {
        name: name.into(),
        rows,
        cols,
        is_bias: false,
    }
}

fn bias(name: impl Into<String>, cols: usize) -> Spec {
    Spec {
        name: name.into(),
        rows: 1,
        cols,
        is_bias: true,
    }
}

fn layout(cfg: &TgConfig) -> Vec<Spec> {
    let f = cfg.features;
    let h = cfg.time_hidden;
    let mut specs = Vec::new();
    for l in 1..=cfg.time_layers {
        let d_in = if l == 1 { f } else { h };
        match cfg.time_cell {
            TimeCell::Rnn => {
                specs.push(weight(format!("time.l{l}.wx"), d_in, h));
                specs.push(weight(format!("time.l{l}.wh"), h, h));
                specs.push(bias(format!("time.l{l}.b"), h));
            }
            TimeCell::Lstm => {
                for gate in LSTM_GATES {
                    specs.push(weight(format!("time.l{l}.{gate}.wx"), d_in, h));
                    specs.push(weight(format!("time.l{l}.{gate}.wh"), h, h));
                    specs.push(bias(format!("time.l{l}.{gate}.b"), h));
                }
            }
        }
    }
    specs.push(weight("time.proj.w", h, f));
    specs.push(bias("time.proj.b", f));

    if cfg.model == ModelKind::TimeGeometric {
        let g = cfg.gcn_hidden;
        for l in 1..=cfg.gcn_layers {
            let d_in = if l == 1 { f } else { g };
            specs.push(weight(format!("geo.gcn.l{l}.theta"), d_in, g));
        }
        let lh = cfg.lstm_hidden;
        for gate in LSTM_GATES {
            specs.push(weight(format!("geo.lstm.{gate}.wx"), g, lh));
            specs.push(weight(format!("geo.lstm.{gate}.wh"), lh, lh));
            specs.push(bias(format!("geo.lstm.{gate}.b"), lh));
        }
        specs.push(weight("geo.proj.w", lh, f));
        specs.push(bias("geo.proj.b", f));
    }

    let mut d_in = cfg.fc_input();
    for (i, width) in FC_WIDTHS.iter().enumerate() {
        specs.push(weight(format!("fc.l{}.w", i + 1), d_in, *width));
        specs.push(bias(format!("fc.l{}.b", i + 1), *width));
        d_in = *width;
    }
    specs.push(weight("fc.head.w", d_in, cfg.q));
    specs.push(bias("fc.head.b", cfg.q));
    specs
}

impl TgParams {
    /// Seeded initialization: weights uniform in (-1/sqrt(fan_in),
    /// +1/sqrt(fan_in)), biases zero.
    pub fn init(cfg: &TgConfig) -> Result<Self, ModelError> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let params = layout(cfg)
            .into_iter()
            .map(|spec| {
                let value = if spec.is_bias {
                    Array2::zeros((spec.rows, spec.cols))
                } else {
                    let bound = 1.0 / (spec.rows as f64).sqrt();
                    Array2::from_shape_fn((spec.rows, spec.cols), |_| {
                        rng.random_range(-bound..bound)
                    })
                };
                Param {
                    name: spec.name,
                    is_bias: spec.is_bias,
                    value,
                }
            })
            .collect();
        Ok(Self { params })
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.params.iter().position(|p| p.name == name)
    }

    pub fn get(&self, name: &str) -> &Array2<f64> {
        &self.params[self.index(name).unwrap_or_else(|| panic!("unknown parameter {name}"))]
            .value
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// Sum of squared weight entries (biases excluded).
    pub fn weight_norm_sq(&self) -> f64 {
        self.params
            .iter()
            .filter(|p| !p.is_bias)
            .map(|p| p.value.iter().map(|w| w * w).sum::<f64>())
            .sum()
    }

    /// Zero arrays shaped like every parameter.
    pub fn zeros_like(&self) -> Vec<Array2<f64>> {
        self.params
            .iter()
            .map(|p| Array2::zeros(p.value.dim()))
            .collect()
    }
}
