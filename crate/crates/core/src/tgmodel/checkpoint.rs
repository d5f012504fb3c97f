//! JSON checkpoints: config echo, seed, and all named parameters.
//!
//! Serialization is fully deterministic (fixed field order, row-major
//! arrays), so saving the same state twice yields identical bytes.

use std::fs;
use std::path::Path;

use ndarray::Array2;
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use super::{Param, TgConfig, TgParams};

pub const CHECKPOINT_FORMAT: &str = "tg-checkpoint-v1";

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("checkpoint io: {0}")]
    Io(#[from] std::io::Error),
    #[error("checkpoint encoding: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unrecognized checkpoint format `{0}`")]
    BadFormat(String),
}

/// Row-major flat encoding of a 2-d array.
#[derive(Serialize, Deserialize)]
struct FlatArray {
    shape: [usize; 2],
    data: Vec<f64>,
}

pub fn serialize_array<S: Serializer>(a: &Array2<f64>, s: S) -> Result<S::Ok, S::Error> {
    FlatArray {
        shape: [a.nrows(), a.ncols()],
        data: a.iter().copied().collect(),
    }
    .serialize(s)
}

pub fn deserialize_array<'de, D: Deserializer<'de>>(d: D) -> Result<Array2<f64>, D::Error> {
    let flat = FlatArray::deserialize(d)?;
    Array2::from_shape_vec((flat.shape[0], flat.shape[1]), flat.data)
        .map_err(|e| D::Error::custom(format!("bad array shape: {e}")))
}

#[derive(Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub config: TgConfig,
    pub seed: u64,
    pub params: Vec<Param>,
}

impl Checkpoint {
    pub fn new(config: &TgConfig, params: &TgParams) -> Self {
        Self {
            format: CHECKPOINT_FORMAT.to_string(),
            config: config.clone(),
            seed: config.seed,
            params: params.params.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String, CheckpointError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn save(&self, path: &Path) -> Result<(), CheckpointError> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, CheckpointError> {
        let text = fs::read_to_string(path)?;
        let ckpt: Checkpoint = serde_json::from_str(&text)?;
        if ckpt.format != CHECKPOINT_FORMAT {
            return Err(CheckpointError::BadFormat(ckpt.format));
        }
        Ok(ckpt)
    }

    pub fn into_parts(self) -> (TgConfig, TgParams) {
        (self.config, TgParams { params: self.params })
    }
}
