//! Model file: one JSON document.
//!
//! ```text
//! {
//!   "format": "cogtwin-sgcnn",
//!   "format_version": 1,
//!   "config": { ModelConfig fields },
//!   "labels": ["Airplane", ...],
//!   "tensors": [
//!     {"name": "aggregation.weights", "shape": [2], "data": "<base64>"},
//!     ...
//!   ]
//! }
//! ```
//!
//! `data` is base64 (standard alphabet, padded) of the tensor's values as
//! little-endian f64, row-major. Tensors appear in parameter order:
//! `aggregation.weights`, `aggregation.bias`, then per conv layer `l`
//! `conv.<l>.kernel.<c>` for each channel, `conv.<l>.bias`, and
//! `conv.<l>.gates` when feature gates are enabled, then `head.weight`
//! and `head.bias`.

use std::io::{Read, Write};

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{ModelConfig, ModelError, ParamTensors, SgcnnModel};

pub const MODEL_FORMAT: &str = "cogtwin-sgcnn";
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed model file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("model file: {0}")]
    Format(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    format: String,
    format_version: u32,
    config: ModelConfig,
    labels: Vec<String>,
    tensors: Vec<TensorRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TensorRecord {
    name: String,
    shape: Vec<usize>,
    data: String,
}

/// Names and shapes of every trainable tensor, in parameter order.
pub fn tensor_layout(model: &SgcnnModel) -> Vec<(String, Vec<usize>)> {
    let mut out = vec![
        ("aggregation.weights".to_string(), vec![model.aggregation.depth]),
        ("aggregation.bias".to_string(), vec![]),
    ];
    for (l, layer) in model.conv_layers.iter().enumerate() {
        for c in 0..layer.channels() {
            out.push((format!("conv.{l}.kernel.{c}"), vec![layer.k, layer.k]));
        }
        out.push((format!("conv.{l}.bias"), vec![layer.channels()]));
        if let Some(g) = &layer.gates {
            out.push((format!("conv.{l}.gates"), vec![g.rows(), g.cols()]));
        }
    }
    out.push((
        "head.weight".to_string(),
        vec![model.head.weight.rows(), model.head.weight.cols()],
    ));
    out.push(("head.bias".to_string(), vec![model.head.bias.len()]));
    out
}

pub fn save_model<W: Write>(model: &SgcnnModel, mut w: W) -> Result<(), ModelFileError> {
    model.validate()?;
    let config = model.config();
    if model.conv_layers.iter().any(|l| {
        l.phi != config.phi
            || l.gates.is_some() != config.feature_gates
            || l.normalize != config.normalize_features
    }) {
        return Err(ModelFileError::Format(
            "all conv layers must share one activation, gating and normalization setting".into(),
        ));
    }
    let tensors = tensor_layout(model)
        .into_iter()
        .zip(model.tensors())
        .map(|((name, shape), values)| {
            let bytes: Vec<u8> = values.iter().flat_map(|v| v.to_le_bytes()).collect();
            TensorRecord {
                name,
                shape,
                data: STANDARD.encode(bytes),
            }
        })
        .collect();
    let file = ModelFile {
        format: MODEL_FORMAT.into(),
        format_version: MODEL_FORMAT_VERSION,
        config,
        labels: model.labels.clone(),
        tensors,
    };
    serde_json::to_writer_pretty(&mut w, &file)?;
    w.write_all(b"\n")?;
    Ok(())
}

pub fn load_model<R: Read>(r: R) -> Result<SgcnnModel, ModelFileError> {
    let file: ModelFile = serde_json::from_reader(r)?;
    if file.format != MODEL_FORMAT {
        return Err(ModelFileError::Format(format!("unexpected format `{}`", file.format)));
    }
    if file.format_version != MODEL_FORMAT_VERSION {
        return Err(ModelFileError::Format(format!(
            "unsupported format_version {}",
            file.format_version
        )));
    }
    let mut model = SgcnnModel::init(&file.config, &file.labels, 0)?;
    if model.labels != file.labels {
        return Err(ModelFileError::Format("labels must be sorted and distinct".into()));
    }
    let layout = tensor_layout(&model);
    if layout.len() != file.tensors.len() {
        return Err(ModelFileError::Format(format!(
            "expected {} tensors, found {}",
            layout.len(),
            file.tensors.len()
        )));
    }
    for (((name, shape), rec), slot) in layout.iter().zip(&file.tensors).zip(model.tensors_mut()) {
        if &rec.name != name || &rec.shape != shape {
            return Err(ModelFileError::Format(format!(
                "tensor `{}` {:?} does not match expected `{name}` {shape:?}",
                rec.name, rec.shape
            )));
        }
        let bytes = STANDARD
            .decode(&rec.data)
            .map_err(|e| ModelFileError::Format(format!("tensor `{name}`: {e}")))?;
        if bytes.len() != slot.len() * 8 {
            return Err(ModelFileError::Format(format!(
                "tensor `{name}` holds {} bytes, expected {}",
                bytes.len(),
                slot.len() * 8
            )));
        }
        for (v, chunk) in slot.iter_mut().zip(bytes.chunks_exact(8)) {
            *v = f64::from_le_bytes(chunk.try_into().expect("8-byte chunk"));
            if !v.is_finite() {
                return Err(ModelFileError::Format(format!("tensor `{name}` has a non-finite value")));
            }
        }
    }
    Ok(model)
}
