//! Adam optimizer with bias-corrected moment estimates.

use ndarray::Array2;

use super::TgParams;

pub const BETA1: f64 = 0.9;
pub const BETA2: f64 = 0.999;
pub const EPSILON: f64 = 1e-8;

/// First/second moment accumulators plus the step counter.
#[derive(Debug, Clone)]
pub struct AdamState {
    m: Vec<Array2<f64>>,
    v: Vec<Array2<f64>>,
    step: u64,
}

impl AdamState {
    pub fn new(params: &TgParams) -> Self {
        Self {
            m: params.zeros_like(),
            v: params.zeros_like(),
            step: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }
}

/// One in-place Adam update over all parameters.
pub fn adam_step(params: &mut TgParams, grads: &[Array2<f64>], state: &mut AdamState, lr: f64) {
    assert_eq!(params.len(), grads.len());
    state.step += 1;
    let t = state.step as i32;
    let bc1 = 1.0 - BETA1.powi(t);
    let bc2 = 1.0 - BETA2.powi(t);
    for ((param, grad), (m, v)) in params
        .params
        .iter_mut()
        .zip(grads)
        .zip(state.m.iter_mut().zip(state.v.iter_mut()))
    {
        m.zip_mut_with(grad, |m, &g| *m = BETA1 * *m + (1.0 - BETA1) * g);
        v.zip_mut_with(grad, |v, &g| *v = BETA2 * *v + (1.0 - BETA2) * g * g);
        ndarray::Zip::from(&mut param.value)
            .and(&*m)
            .and(&*v)
            .for_each(|w, &m, &v| {
                let m_hat = m / bc1;
                let v_hat = v / bc2;
                *w -= lr * m_hat / (v_hat.sqrt() + EPSILON);
            });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tgmodel::{ModelKind, TgConfig, TimeCell};
    use approx::assert_relative_eq;

    fn small_params() -> TgParams {
        let mut cfg = TgConfig::desk(ModelKind::Baseline, TimeCell::Rnn);
        cfg.m = 2;
        cfg.time_hidden = 2;
        TgParams::init(&cfg).unwrap()
    }

    #[test]
    fn zero_gradient_is_a_no_op() {
        let mut params = small_params();
        let before = params.clone();
        let grads = params.zeros_like();
        let mut state = AdamState::new(&params);
        adam_step(&mut params, &grads, &mut state, 0.1);
        for (a, b) in params.params.iter().zip(&before.params) {
            assert_eq!(a.value, b.value);
        }
        assert_eq!(state.step_count(), 1);
    }

    #[test]
    fn first_step_moves_by_about_lr() {
        // with bias correction the first update is lr * g / (|g| + eps),
        // i.e. almost exactly lr in the gradient's direction.
        let mut params = small_params();
        let w0 = params.params[0].value[[0, 0]];
        let mut grads = params.zeros_like();
        grads[0][[0, 0]] = 3.7;
        let mut state = AdamState::new(&params);
        adam_step(&mut params, &grads, &mut state, 0.1);
        assert_relative_eq!(params.params[0].value[[0, 0]], w0 - 0.1, epsilon = 1e-6);
    }

    #[test]
    fn updates_are_deterministic() {
        let run = || {
            let mut params = small_params();
            let mut grads = params.zeros_like();
            for g in &mut grads {
                g.fill(0.25);
            }
            let mut state = AdamState::new(&params);
            for _ in 0..5 {
                adam_step(&mut params, &grads, &mut state, 0.01);
            }
            params
        };
        let a = run();
        let b = run();
        for (x, y) in a.params.iter().zip(&b.params) {
            assert_eq!(x.value, y.value);
        }
    }
}
