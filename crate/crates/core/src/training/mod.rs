//! Stratified splitting, optimizers, the mini-batch training loop, and
//! classification metrics.

mod metrics;
mod optim;
mod split;
mod train;

pub use metrics::{format_confusion, format_table, Metrics};
pub use optim::Optimizer;
pub use split::{stratified_split, stratified_split_indices};
pub use train::{evaluate, predict, train, EpochRecord, Prediction, TrainReport};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sgcnn::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OptimizerConfig {
    Sgd {
        lr: f64,
        #[serde(default)]
        momentum: f64,
    },
    Adam {
        lr: f64,
        #[serde(default = "default_beta1")]
        beta1: f64,
        #[serde(default = "default_beta2")]
        beta2: f64,
        #[serde(default = "default_eps")]
        eps: f64,
    },
}

fn default_beta1() -> f64 {
    0.9
}
fn default_beta2() -> f64 {
    0.999
}
fn default_eps() -> f64 {
    1e-8
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig::Adam {
            lr: 3e-3,
            beta1: default_beta1(),
            beta2: default_beta2(),
            eps: default_eps(),
        }
    }
}

impl OptimizerConfig {
    pub fn lr(&self) -> f64 {
        match *self {
            OptimizerConfig::Sgd { lr, .. } | OptimizerConfig::Adam { lr, .. } => lr,
        }
    }

    pub fn with_lr(self, lr: f64) -> Self {
        match self {
            OptimizerConfig::Sgd { momentum, .. } => OptimizerConfig::Sgd { lr, momentum },
            OptimizerConfig::Adam { beta1, beta2, eps, .. } => OptimizerConfig::Adam {
                lr,
                beta1,
                beta2,
                eps,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub optimizer: OptimizerConfig,
    pub seed: u64,
    pub split_fraction: f64,
    pub early_stop_patience: Option<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 50,
            batch_size: 16,
            optimizer: OptimizerConfig::default(),
            seed: 0,
            split_fraction: 0.8,
            early_stop_patience: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        if !(self.split_fraction > 0.0 && self.split_fraction < 1.0) {
            return Err(TrainError::Config(format!(
                "split_fraction must lie in (0, 1), got {}",
                self.split_fraction
            )));
        }
        if self.batch_size == 0 {
            return Err(TrainError::Config("batch_size must be at least 1".into()));
        }
        if self.early_stop_patience == Some(0) {
            return Err(TrainError::Config("early_stop_patience must be at least 1".into()));
        }
        let ok = |x: f64| x.is_finite() && x >= 0.0;
        let valid = match self.optimizer {
            OptimizerConfig::Sgd { lr, momentum } => ok(lr) && ok(momentum) && momentum < 1.0,
            OptimizerConfig::Adam {
                lr,
                beta1,
                beta2,
                eps,
            } => ok(lr) && ok(beta1) && beta1 < 1.0 && ok(beta2) && beta2 < 1.0 && eps > 0.0,
        };
        if !valid {
            return Err(TrainError::Config(format!(
                "invalid optimizer settings {:?}",
                self.optimizer
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("invalid training configuration: {0}")]
    Config(String),
    #[error("{0} set is empty")]
    EmptySet(&'static str),
    #[error("sample `{0}` has no label")]
    Unlabeled(String),
    #[error("unknown labels {labels:?} (model knows {known:?})")]
    UnknownLabels {
        labels: Vec<String>,
        known: Vec<String>,
    },
    #[error("class `{label}` has {count} sample(s); at least 2 are needed to split")]
    ClassTooSmall { label: String, count: usize },
    #[error("non-finite loss at epoch {epoch}, batch {batch}")]
    NonFinite {
        epoch: usize,
        batch: usize,
        report: Box<TrainReport>,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}
