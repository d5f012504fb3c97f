//! Verifies the analytic gradients against central finite differences for
//! every parameter of both model variants.

use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use vistat_core::tgmodel::{
    forward_from_parts, gradients_from_parts, normalize_adjacency, ModelKind, TgConfig, TgParams,
    TimeCell,
};

const H: f64 = 1e-5;
const TOLERANCE: f64 = 1e-4;

fn small_cfg(model: ModelKind, cell: TimeCell, skip: bool, q: usize) -> TgConfig {
    let mut cfg = TgConfig::desk(model, cell);
    cfg.m = 4;
    cfg.q = q;
    cfg.features = 2;
    cfg.time_hidden = 3;
    cfg.gcn_hidden = 3;
    cfg.lstm_hidden = 3;
    cfg.skip_layer = skip;
    cfg.seed = 42;
    cfg
}

fn mse(y_hat: &[f64], y: &[f64]) -> f64 {
    y_hat
        .iter()
        .zip(y)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        / y.len() as f64
}

fn check_config(cfg: &TgConfig) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed + 1);
    let x = Array2::from_shape_fn((cfg.m, cfg.features), |_| rng.random_range(-1.0..1.0));
    let y: Vec<f64> = (0..cfg.q).map(|_| rng.random_range(-1.0..1.0)).collect();
    // small fully connected graph keeps every component active
    let a_hat = match cfg.model {
        ModelKind::TimeGeometric => {
            let mut a = Array2::from_elem((cfg.m, cfg.m), 1.0);
            for i in 0..cfg.m {
                a[[i, i]] = 0.0;
            }
            Some(normalize_adjacency(&a).unwrap())
        }
        ModelKind::Baseline => None,
    };

    let params = TgParams::init(cfg).unwrap();
    let (_, analytic) =
        gradients_from_parts(&x, a_hat.as_ref(), &y, &params, cfg, 0.0, None).unwrap();

    let eval = |p: &TgParams| {
        let y_hat = forward_from_parts(&x, a_hat.as_ref(), p, cfg).unwrap();
        mse(&y_hat, &y)
    };

    for (pi, param) in params.params.iter().enumerate() {
        let (rows, cols) = param.value.dim();
        // probe a handful of entries per parameter to keep the suite fast
        let probes: Vec<(usize, usize)> = (0..rows.min(2))
            .flat_map(|r| (0..cols.min(3)).map(move |c| (r, c)))
            .collect();
        for (r, c) in probes {
            let mut plus = params.clone();
            plus.params[pi].value[[r, c]] += H;
            let mut minus = params.clone();
            minus.params[pi].value[[r, c]] -= H;
            let fd = (eval(&plus) - eval(&minus)) / (2.0 * H);
            let got = analytic[pi][[r, c]];
            let denom = fd.abs().max(got.abs()).max(1e-6);
            assert!(
                (fd - got).abs() / denom < TOLERANCE,
                "{}[{r},{c}]: analytic {got}, finite-difference {fd}",
                param.name
            );
        }
    }
}

#[test]
fn baseline_rnn_gradients() {
    check_config(&small_cfg(ModelKind::Baseline, TimeCell::Rnn, true, 1));
    check_config(&small_cfg(ModelKind::Baseline, TimeCell::Rnn, false, 3));
}

#[test]
fn baseline_lstm_gradients() {
    check_config(&small_cfg(ModelKind::Baseline, TimeCell::Lstm, true, 3));
    check_config(&small_cfg(ModelKind::Baseline, TimeCell::Lstm, false, 1));
}

#[test]
fn time_geometric_rnn_gradients() {
    check_config(&small_cfg(ModelKind::TimeGeometric, TimeCell::Rnn, true, 1));
    check_config(&small_cfg(ModelKind::TimeGeometric, TimeCell::Rnn, false, 3));
}

#[test]
fn time_geometric_lstm_gradients() {
    check_config(&small_cfg(ModelKind::TimeGeometric, TimeCell::Lstm, true, 3));
    check_config(&small_cfg(ModelKind::TimeGeometric, TimeCell::Lstm, false, 1));
}

#[test]
fn multi_layer_gradients() {
    let mut cfg = small_cfg(ModelKind::TimeGeometric, TimeCell::Rnn, true, 1);
    cfg.time_layers = 2;
    cfg.gcn_layers = 2;
    check_config(&cfg);
}
