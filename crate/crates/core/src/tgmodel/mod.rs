//! The Time-Geometric forecaster and its baseline: a recurrent time
//! component, a GCN-plus-LSTM geometric component over the visibility graph,
//! and a fully connected fusion stack, trained with MSE + L2 via Adam.

mod adam;
pub mod checkpoint;
mod params;
pub mod tape;
mod train;

pub use adam::{adam_step, AdamState};
pub use params::{ModelKind, Param, TgConfig, TgParams, TimeCell, FC_WIDTHS, LSTM_GATES};
pub use train::{train, EpochRecord, TrainOutcome};

use ndarray::Array2;
use thiserror::Error;

use crate::series::WindowSample;
use crate::visgraph::{self, VisGraphError};
use tape::{Act, NodeId, Tape};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    Shape {
        context: &'static str,
        expected: String,
        found: String,
    },
    #[error("adjacency must be symmetric with a zero diagonal")]
    BadAdjacency,
    #[error("non-finite gradient in parameter `{0}`")]
    NonFiniteGradient(String),
    #[error(transparent)]
    Graph(#[from] VisGraphError),
}

/// Symmetrically normalized self-looped adjacency
/// `D^{-1/2} (A + I) D^{-1/2}`.
pub fn normalize_adjacency(a: &Array2<f64>) -> Result<Array2<f64>, ModelError> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(ModelError::Shape {
            context: "normalize_adjacency",
            expected: format!("{n}x{n}"),
            found: format!("{}x{}", a.nrows(), a.ncols()),
        });
    }
    for i in 0..n {
        if a[[i, i]] != 0.0 {
            return Err(ModelError::BadAdjacency);
        }
        for j in 0..i {
            if a[[i, j]] != a[[j, i]] {
                return Err(ModelError::BadAdjacency);
            }
        }
    }
    let mut tilde = a.clone();
    for i in 0..n {
        tilde[[i, i]] = 1.0;
    }
    let inv_sqrt_deg: Vec<f64> = tilde
        .rows()
        .into_iter()
        .map(|row| row.sum().sqrt().recip())
        .collect();
    let mut out = tilde;
    for i in 0..n {
        for j in 0..n {
            out[[i, j]] *= inv_sqrt_deg[i] * inv_sqrt_deg[j];
        }
    }
    Ok(out)
}

/// One graph-convolution layer `rho(A_hat H Theta)`.
pub fn gcn_layer(
    a_hat: &Array2<f64>,
    h: &Array2<f64>,
    theta: &Array2<f64>,
    rho: Act,
) -> Result<Array2<f64>, ModelError> {
    if a_hat.ncols() != h.nrows() || h.ncols() != theta.nrows() {
        return Err(ModelError::Shape {
            context: "gcn_layer",
            expected: format!("A_hat {0}x{0}, H {0}xd, Theta dxk", a_hat.nrows()),
            found: format!(
                "A_hat {}x{}, H {}x{}, Theta {}x{}",
                a_hat.nrows(),
                a_hat.ncols(),
                h.nrows(),
                h.ncols(),
                theta.nrows(),
                theta.ncols()
            ),
        });
    }
    Ok(a_hat.dot(h).dot(theta).mapv(|x| rho.apply(x)))
}

/// Visibility-graph adjacency of a sample's raw target window, symmetrized
/// and GCN-normalized.
pub fn sample_adjacency(sample: &WindowSample, cfg: &TgConfig) -> Result<Array2<f64>, ModelError> {
    let g = visgraph::build_vg(&sample.raw_target_window, cfg.directed_graph)?;
    let sym = if g.is_directed() { g.symmetrized() } else { g };
    normalize_adjacency(&sym.adjacency_f64())
}

/// Per-layer inverted-dropout masks, sampled outside the tape so that a
/// forward pass stays deterministic given the masks.
#[derive(Debug, Clone, Default)]
pub struct DropoutMasks {
    pub time: Vec<Array2<f64>>,
    pub gcn: Vec<Array2<f64>>,
}

impl DropoutMasks {
    pub fn sample(cfg: &TgConfig, rng: &mut impl rand::Rng) -> Self {
        let keep = 1.0 - cfg.dropout_rate;
        let mut mask = |rows: usize, cols: usize| {
            Array2::from_shape_fn((rows, cols), |_| {
                if rng.random::<f64>() < keep {
                    1.0 / keep
                } else {
                    0.0
                }
            })
        };
        let time = (0..cfg.time_layers)
            .map(|_| mask(cfg.m, cfg.time_hidden))
            .collect();
        let gcn = if cfg.model == ModelKind::TimeGeometric {
            (0..cfg.gcn_layers).map(|_| mask(cfg.m, cfg.gcn_hidden)).collect()
        } else {
            Vec::new()
        };
        Self { time, gcn }
    }
}

/// Tape under construction, with parameter leaves registered up front.
struct Builder<'a> {
    tape: Tape,
    params: &'a TgParams,
    param_ids: Vec<NodeId>,
}

impl<'a> Builder<'a> {
    fn new(params: &'a TgParams) -> Self {
        let mut tape = Tape::new();
        let param_ids = params
            .params
            .iter()
            .map(|p| tape.leaf(p.value.clone()))
            .collect();
        Self {
            tape,
            params,
            param_ids,
        }
    }

    fn p(&self, name: &str) -> NodeId {
        self.param_ids[self
            .params
            .index(name)
            .unwrap_or_else(|| panic!("unknown parameter {name}"))]
    }

    /// Affine step `x W + h W_h + b`.
    fn affine(&mut self, x: NodeId, w: NodeId, h: Option<(NodeId, NodeId)>, b: NodeId) -> NodeId {
        let mut pre = self.tape.matmul(x, w);
        if let Some((hid, wh)) = h {
            let rec = self.tape.matmul(hid, wh);
            pre = self.tape.add(pre, rec);
        }
        self.tape.add_row(pre, b)
    }

    /// Unrolled recurrent layer over the rows of `seq`; returns the stacked
    /// hidden-state sequence.
    fn recurrent_layer(&mut self, seq: NodeId, prefix: &str, cell: TimeCell, m: usize) -> NodeId {
        let mut outputs = Vec::with_capacity(m);
        match cell {
            TimeCell::Rnn => {
                let (wx, wh, b) = (
                    self.p(&format!("{prefix}.wx")),
                    self.p(&format!("{prefix}.wh")),
                    self.p(&format!("{prefix}.b")),
                );
                let mut h_prev: Option<NodeId> = None;
                for t in 0..m {
                    let x_t = self.tape.row(seq, t);
                    let pre = self.affine(x_t, wx, h_prev.map(|h| (h, wh)), b);
                    let h = self.tape.act(pre, Act::Tanh);
                    outputs.push(h);
                    h_prev = Some(h);
                }
            }
            TimeCell::Lstm => {
                let gate_params: Vec<(NodeId, NodeId, NodeId)> = LSTM_GATES
                    .iter()
                    .map(|g| {
                        (
                            self.p(&format!("{prefix}.{g}.wx")),
                            self.p(&format!("{prefix}.{g}.wh")),
                            self.p(&format!("{prefix}.{g}.b")),
                        )
                    })
                    .collect();
                let mut h_prev: Option<NodeId> = None;
                let mut c_prev: Option<NodeId> = None;
                for t in 0..m {
                    let x_t = self.tape.row(seq, t);
                    let mut gates = Vec::with_capacity(4);
                    for (k, &(wx, wh, b)) in gate_params.iter().enumerate() {
                        let pre = self.affine(x_t, wx, h_prev.map(|h| (h, wh)), b);
                        let act = if LSTM_GATES[k] == "g" {
                            Act::Tanh
                        } else {
                            Act::Sigmoid
                        };
                        gates.push(self.tape.act(pre, act));
                    }
                    let (i, f, g, o) = (gates[0], gates[1], gates[2], gates[3]);
                    let mut c = self.tape.mul(i, g);
                    if let Some(cp) = c_prev {
                        let retained = self.tape.mul(f, cp);
                        c = self.tape.add(c, retained);
                    }
                    let c_act = self.tape.act(c, Act::Tanh);
                    let h = self.tape.mul(o, c_act);
                    outputs.push(h);
                    h_prev = Some(h);
                    c_prev = Some(c);
                }
            }
        }
        self.tape.concat_rows(outputs)
    }

    fn time_component(
        &mut self,
        cfg: &TgConfig,
        x: NodeId,
        masks: Option<&DropoutMasks>,
    ) -> NodeId {
        let mut seq = x;
        for l in 1..=cfg.time_layers {
            seq = self.recurrent_layer(seq, &format!("time.l{l}"), cfg.time_cell, cfg.m);
            if let Some(masks) = masks {
                seq = self.tape.mul_const(seq, masks.time[l - 1].clone());
            }
        }
        let (w, b) = (self.p("time.proj.w"), self.p("time.proj.b"));
        let proj = self.affine(seq, w, None, b);
        self.tape.act(proj, cfg.phi)
    }

    fn geometric_component(
        &mut self,
        cfg: &TgConfig,
        x: NodeId,
        a_hat: &Array2<f64>,
        masks: Option<&DropoutMasks>,
    ) -> NodeId {
        let a_leaf = self.tape.leaf(a_hat.clone());
        let mut h = x;
        for l in 1..=cfg.gcn_layers {
            let theta = self.p(&format!("geo.gcn.l{l}.theta"));
            let agg = self.tape.matmul(a_leaf, h);
            let mixed = self.tape.matmul(agg, theta);
            h = self.tape.act(mixed, cfg.rho);
            if let Some(masks) = masks {
                h = self.tape.mul_const(h, masks.gcn[l - 1].clone());
            }
        }
        let seq = self.recurrent_layer(h, "geo.lstm", TimeCell::Lstm, cfg.m);
        let (w, b) = (self.p("geo.proj.w"), self.p("geo.proj.b"));
        self.affine(seq, w, None, b)
    }

    fn fc_component(
        &mut self,
        cfg: &TgConfig,
        time_pattern: NodeId,
        graph_pattern: Option<NodeId>,
        x: NodeId,
    ) -> NodeId {
        let mut tot = match graph_pattern {
            Some(g) => self.tape.add(time_pattern, g),
            None => time_pattern,
        };
        if cfg.skip_layer {
            tot = self.tape.concat_cols(tot, x);
        }
        let width = self.tape.value(tot).len();
        let mut z = self.tape.reshape(tot, 1, width);
        for i in 1..=FC_WIDTHS.len() {
            let (w, b) = (self.p(&format!("fc.l{i}.w")), self.p(&format!("fc.l{i}.b")));
            let pre = self.affine(z, w, None, b);
            z = self.tape.act(pre, cfg.phi);
        }
        let (w, b) = (self.p("fc.head.w"), self.p("fc.head.b"));
        self.affine(z, w, None, b)
    }
}

fn check_input(cfg: &TgConfig, x: &Array2<f64>, a_hat: Option<&Array2<f64>>) -> Result<(), ModelError> {
    if x.dim() != (cfg.m, cfg.features) {
        return Err(ModelError::Shape {
            context: "feature matrix",
            expected: format!("{}x{}", cfg.m, cfg.features),
            found: format!("{}x{}", x.nrows(), x.ncols()),
        });
    }
    if let Some(a) = a_hat {
        if a.dim() != (cfg.m, cfg.m) {
            return Err(ModelError::Shape {
                context: "adjacency",
                expected: format!("{0}x{0}", cfg.m),
                found: format!("{}x{}", a.nrows(), a.ncols()),
            });
        }
    }
    Ok(())
}

fn build_prediction(
    builder: &mut Builder<'_>,
    cfg: &TgConfig,
    x: &Array2<f64>,
    a_hat: Option<&Array2<f64>>,
    masks: Option<&DropoutMasks>,
) -> NodeId {
    let x_id = builder.tape.leaf(x.clone());
    let time_pattern = builder.time_component(cfg, x_id, masks);
    let graph_pattern = match (cfg.model, a_hat) {
        (ModelKind::TimeGeometric, Some(a)) => {
            Some(builder.geometric_component(cfg, x_id, a, masks))
        }
        _ => None,
    };
    builder.fc_component(cfg, time_pattern, graph_pattern, x_id)
}

/// Forward pass from explicit parts (normalized features and, for the
/// Time-Geometric model, a normalized adjacency).
pub fn forward_from_parts(
    x: &Array2<f64>,
    a_hat: Option<&Array2<f64>>,
    params: &TgParams,
    cfg: &TgConfig,
) -> Result<Vec<f64>, ModelError> {
    check_input(cfg, x, a_hat)?;
    if cfg.model == ModelKind::TimeGeometric && a_hat.is_none() {
        return Err(ModelError::Config(
            "time-geometric forward needs an adjacency".into(),
        ));
    }
    let mut builder = Builder::new(params);
    let y_hat = build_prediction(&mut builder, cfg, x, a_hat, None);
    Ok(builder.tape.value(y_hat).row(0).to_vec())
}

/// Time-Geometric forward pass: visibility graph of the sample's raw window
/// plus all three components.
pub fn tg_forward(
    sample: &WindowSample,
    params: &TgParams,
    cfg: &TgConfig,
) -> Result<Vec<f64>, ModelError> {
    let a_hat = sample_adjacency(sample, cfg)?;
    forward_from_parts(&sample.features, Some(&a_hat), params, cfg)
}

/// Baseline forward pass: time component + FC stack only.
pub fn baseline_forward(
    sample: &WindowSample,
    params: &TgParams,
    cfg: &TgConfig,
) -> Result<Vec<f64>, ModelError> {
    forward_from_parts(&sample.features, None, params, cfg)
}

/// `MSE(y_hat, y) + l2 * sum(weights^2)`, biases excluded from the penalty.
pub fn loss(y_hat: &[f64], y: &[f64], params: &TgParams, l2: f64) -> f64 {
    assert_eq!(y_hat.len(), y.len());
    let mse = y_hat
        .iter()
        .zip(y)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        / y.len() as f64;
    mse + l2 * params.weight_norm_sq()
}

/// Loss and its exact reverse-mode gradient for one sample, from explicit
/// parts. Gradients are aligned with `params.params`.
pub fn gradients_from_parts(
    x: &Array2<f64>,
    a_hat: Option<&Array2<f64>>,
    y: &[f64],
    params: &TgParams,
    cfg: &TgConfig,
    l2: f64,
    masks: Option<&DropoutMasks>,
) -> Result<(f64, Vec<Array2<f64>>), ModelError> {
    check_input(cfg, x, a_hat)?;
    let mut builder = Builder::new(params);
    let y_hat = build_prediction(&mut builder, cfg, x, a_hat, masks);
    let target = Array2::from_shape_vec((1, y.len()), y.to_vec()).expect("row vector");
    let loss_node = builder.tape.mse(y_hat, target);
    let loss_value = builder.tape.value(loss_node)[[0, 0]] + l2 * params.weight_norm_sq();
    let node_grads = builder.tape.backward(loss_node);
    let mut grads = Vec::with_capacity(params.len());
    for (param, &id) in params.params.iter().zip(&builder.param_ids) {
        let mut g = node_grads[id]
            .clone()
            .unwrap_or_else(|| Array2::zeros(param.value.dim()));
        if !param.is_bias && l2 > 0.0 {
            g += &(2.0 * l2 * &param.value);
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::NonFiniteGradient(param.name.clone()));
        }
        grads.push(g);
    }
    Ok((loss_value, grads))
}

/// Loss and gradient for one [`WindowSample`], building the visibility
/// adjacency when the config asks for the geometric component.
pub fn gradients(
    sample: &WindowSample,
    params: &TgParams,
    cfg: &TgConfig,
    l2: f64,
) -> Result<(f64, Vec<Array2<f64>>), ModelError> {
    let a_hat = match cfg.model {
        ModelKind::TimeGeometric => Some(sample_adjacency(sample, cfg)?),
        ModelKind::Baseline => None,
    };
    gradients_from_parts(&sample.features, a_hat.as_ref(), &sample.y, params, cfg, l2, None)
}
