//! Mini-batch Adam training with early stopping.
//!
//! Runs are deterministic for a given config: shuffling, initialization, and
//! dropout all derive from the config seed, and per-sample gradients are
//! reduced in sample order even when computed in parallel.

use std::fmt::Write as _;

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use super::adam::{adam_step, AdamState};
use super::{
    gradients_from_parts, sample_adjacency, DropoutMasks, ModelError, ModelKind, TgConfig,
    TgParams,
};
use crate::series::WindowSample;

/// One line of the training log.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Parameters from the best validation epoch.
    pub params: TgParams,
    pub log: Vec<EpochRecord>,
    pub best_epoch: usize,
    pub best_val_loss: f64,
    pub stopped_early: bool,
}

impl TrainOutcome {
    /// Training log as `epoch,train_loss,val_loss` CSV.
    pub fn log_csv(&self) -> String {
        let mut out = String::from("epoch,train_loss,val_loss\n");
        for r in &self.log {
            let _ = writeln!(out, "{},{},{}", r.epoch, r.train_loss, r.val_loss);
        }
        out
    }
}

/// Sample paired with its precomputed normalized adjacency (when needed).
struct Prepared<'a> {
    sample: &'a WindowSample,
    a_hat: Option<Array2<f64>>,
}

fn prepare<'a>(
    samples: &'a [WindowSample],
    cfg: &TgConfig,
) -> Result<Vec<Prepared<'a>>, ModelError> {
    samples
        .iter()
        .map(|sample| {
            let a_hat = match cfg.model {
                ModelKind::TimeGeometric => Some(sample_adjacency(sample, cfg)?),
                ModelKind::Baseline => None,
            };
            Ok(Prepared { sample, a_hat })
        })
        .collect()
}

fn sample_loss(p: &Prepared<'_>, params: &TgParams, cfg: &TgConfig) -> Result<f64, ModelError> {
    let y_hat =
        super::forward_from_parts(&p.sample.features, p.a_hat.as_ref(), params, cfg)?;
    let y = &p.sample.y;
    Ok(y_hat
        .iter()
        .zip(y)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        / y.len() as f64)
}

fn mean_val_loss(
    prepared: &[Prepared<'_>],
    params: &TgParams,
    cfg: &TgConfig,
) -> Result<f64, ModelError> {
    #[cfg(feature = "parallel")]
    let losses: Result<Vec<f64>, ModelError> = prepared
        .par_iter()
        .map(|p| sample_loss(p, params, cfg))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let losses: Result<Vec<f64>, ModelError> = prepared
        .iter()
        .map(|p| sample_loss(p, params, cfg))
        .collect();
    let losses = losses?;
    Ok(losses.iter().sum::<f64>() / losses.len() as f64)
}

type BatchGrads = Result<Vec<(f64, Vec<Array2<f64>>)>, ModelError>;

fn batch_gradients(
    batch: &[(&Prepared<'_>, Option<DropoutMasks>)],
    params: &TgParams,
    cfg: &TgConfig,
) -> Result<(f64, Vec<Array2<f64>>), ModelError> {
    let eval = |(p, masks): &(&Prepared<'_>, Option<DropoutMasks>)| {
        gradients_from_parts(
            &p.sample.features,
            p.a_hat.as_ref(),
            &p.sample.y,
            params,
            cfg,
            cfg.l2,
            masks.as_ref(),
        )
    };
    // collect in batch order so the reduction below is order-stable
    #[cfg(feature = "parallel")]
    let per_sample: BatchGrads = batch.par_iter().map(eval).collect();
    #[cfg(not(feature = "parallel"))]
    let per_sample: BatchGrads = batch.iter().map(eval).collect();
    let per_sample = per_sample?;

    let scale = 1.0 / batch.len() as f64;
    let mut loss = 0.0;
    let mut acc = params.zeros_like();
    for (l, grads) in per_sample {
        loss += l * scale;
        for (a, g) in acc.iter_mut().zip(&grads) {
            a.zip_mut_with(g, |a, &g| *a += g * scale);
        }
    }
    Ok((loss, acc))
}

/// Train on `train_set`, selecting the best epoch by validation loss.
pub fn train(
    train_set: &[WindowSample],
    val_set: &[WindowSample],
    cfg: &TgConfig,
) -> Result<TrainOutcome, ModelError> {
    cfg.validate()?;
    if train_set.is_empty() || val_set.is_empty() {
        return Err(ModelError::Config(
            "training and validation partitions must be non-empty".into(),
        ));
    }
    let prepared_train = prepare(train_set, cfg)?;
    let prepared_val = prepare(val_set, cfg)?;

    let mut params = TgParams::init(cfg)?;
    let mut adam = AdamState::new(&params);
    // distinct stream from the init rng so adding parameters never shifts
    // the shuffle/dropout sequence
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9_7f4a_7c15);

    let mut best_params = params.clone();
    let mut best_val = f64::INFINITY;
    let mut best_epoch = 0usize;
    let mut since_best = 0usize;
    let mut stopped_early = false;
    let mut log = Vec::new();

    let mut order: Vec<usize> = (0..prepared_train.len()).collect();
    for epoch in 1..=cfg.max_epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        let mut batches = 0usize;
        for chunk in order.chunks(cfg.batch_size) {
            let batch: Vec<(&Prepared<'_>, Option<DropoutMasks>)> = chunk
                .iter()
                .map(|&i| {
                    let masks = if cfg.dropout && cfg.dropout_rate > 0.0 {
                        Some(DropoutMasks::sample(cfg, &mut rng))
                    } else {
                        None
                    };
                    (&prepared_train[i], masks)
                })
                .collect();
            let (loss, grads) = batch_gradients(&batch, &params, cfg)?;
            adam_step(&mut params, &grads, &mut adam, cfg.learning_rate);
            epoch_loss += loss;
            batches += 1;
        }
        let train_loss = epoch_loss / batches as f64;
        let val_loss = mean_val_loss(&prepared_val, &params, cfg)?;
        log.push(EpochRecord {
            epoch,
            train_loss,
            val_loss,
        });

        if val_loss < best_val {
            best_val = val_loss;
            best_epoch = epoch;
            best_params = params.clone();
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= cfg.patience {
                stopped_early = true;
                break;
            }
        }
    }

    Ok(TrainOutcome {
        params: best_params,
        log,
        best_epoch,
        best_val_loss: best_val,
        stopped_early,
    })
}
