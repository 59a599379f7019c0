use std::collections::BTreeSet;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{Metrics, Optimizer, TrainConfig, TrainError};
use crate::graph::{Graph, LabeledGraph};
use crate::numerics::{NumericsError, Rng};
use crate::sgcnn::{
    backward, cross_entropy, forward, Gradients, ModelConfig, ModelError, ParamTensors, SgcnnModel,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpochRecord {
    /// 1-based.
    pub epoch: usize,
    pub train: Metrics,
    pub held_out: Option<Metrics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainReport {
    pub config: TrainConfig,
    pub model_config: ModelConfig,
    pub labels: Vec<String>,
    pub train_samples: usize,
    pub held_out_samples: usize,
    pub epochs: Vec<EpochRecord>,
    /// Epoch whose parameters were kept when early stopping restored them.
    pub best_epoch: Option<usize>,
    pub stopped_early: bool,
    /// Set when training aborted; the report then covers completed epochs.
    pub aborted: Option<String>,
    /// Not part of the deterministic output; omitted when `None`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_seconds: Option<f64>,
    /// Where the trained model was written, if anywhere.
    pub model_path: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: String,
    pub probabilities: Vec<f64>,
    /// Graph-level readout vector.
    pub embedding: Vec<f64>,
}

fn targets(model: &SgcnnModel, set: &[LabeledGraph]) -> Result<Vec<usize>, TrainError> {
    let mut unknown = BTreeSet::new();
    let mut out = Vec::with_capacity(set.len());
    for s in set {
        let label = s.label.as_deref().ok_or_else(|| TrainError::Unlabeled(s.id.clone()))?;
        match model.label_index(label) {
            Ok(i) => out.push(i),
            Err(_) => {
                unknown.insert(label.to_string());
            }
        }
    }
    if !unknown.is_empty() {
        return Err(TrainError::UnknownLabels {
            labels: unknown.into_iter().collect(),
            known: model.labels.clone(),
        });
    }
    Ok(out)
}

fn is_non_finite(e: &ModelError) -> bool {
    matches!(e, ModelError::Numerics(NumericsError::NonFinite { .. }))
}

fn one_hot(k: usize, t: usize) -> Vec<f64> {
    let mut y = vec![0.0; k];
    y[t] = 1.0;
    y
}

fn argmax(p: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in p.iter().enumerate() {
        if *v > p[best] {
            best = i;
        }
    }
    best
}

fn metrics_for(model: &SgcnnModel, set: &[LabeledGraph], t: &[usize]) -> Result<Metrics, TrainError> {
    let mut pairs = Vec::with_capacity(set.len());
    let mut loss = 0.0;
    for (s, &y) in set.iter().zip(t) {
        let (p, _) = forward(model, &s.graph)?;
        loss += cross_entropy(&one_hot(p.len(), y), &p)?;
        pairs.push((y, argmax(&p)));
    }
    Ok(Metrics::from_pairs(&model.labels, &pairs, loss))
}

/// Forward-only metrics over a labeled set.
pub fn evaluate(model: &SgcnnModel, set: &[LabeledGraph]) -> Result<Metrics, TrainError> {
    if set.is_empty() {
        return Err(TrainError::EmptySet("evaluation"));
    }
    let t = targets(model, set)?;
    metrics_for(model, set, &t)
}

pub fn predict(model: &SgcnnModel, g: &Graph) -> Result<Prediction, TrainError> {
    let (p, cache) = forward(model, g)?;
    Ok(Prediction {
        label: model.labels[argmax(&p)].clone(),
        embedding: cache.readout().to_vec(),
        probabilities: p,
    })
}

/// Mini-batch training. Each epoch visits `train_set` in a seeded shuffled
/// order; batch gradients are summed in that order and averaged before one
/// optimizer step. With `early_stop_patience` set, training stops once the
/// held-out loss has not improved for that many epochs and the best
/// parameters are restored.
pub fn train(
    model: &mut SgcnnModel,
    train_set: &[LabeledGraph],
    held_out: Option<&[LabeledGraph]>,
    config: &TrainConfig,
) -> Result<TrainReport, TrainError> {
    config.validate()?;
    let started = Instant::now();
    let held_out = held_out.filter(|h| !h.is_empty());
    if config.early_stop_patience.is_some() && held_out.is_none() {
        return Err(TrainError::Config("early stopping needs a held-out set".into()));
    }
    if config.epochs > 0 && train_set.is_empty() {
        return Err(TrainError::EmptySet("training"));
    }
    let train_t = targets(model, train_set)?;
    let held_t = held_out.map(|h| targets(model, h)).transpose()?;

    let mut report = TrainReport {
        config: config.clone(),
        model_config: model.config(),
        labels: model.labels.clone(),
        train_samples: train_set.len(),
        held_out_samples: held_out.map_or(0, <[_]>::len),
        epochs: Vec::new(),
        best_epoch: None,
        stopped_early: false,
        aborted: None,
        wall_clock_seconds: None,
        model_path: None,
    };
    let abort = |mut report: TrainReport, epoch: usize, batch: usize| {
        report.aborted = Some(format!("non-finite loss at epoch {epoch}, batch {batch}"));
        report.wall_clock_seconds = Some(started.elapsed().as_secs_f64());
        TrainError::NonFinite {
            epoch,
            batch,
            report: Box::new(report),
        }
    };

    let k = model.num_classes();
    let mut opt = Optimizer::new(config.optimizer, model.param_count());
    let mut best: Option<(f64, usize, SgcnnModel)> = None;
    for epoch in 1..=config.epochs {
        let mut order: Vec<usize> = (0..train_set.len()).collect();
        Rng::with_stream(config.seed, epoch as u64).shuffle(&mut order);

        for (b, batch) in order.chunks(config.batch_size).enumerate() {
            let mut grads = Gradients::zeros_like(model);
            let mut loss = 0.0;
            for &i in batch {
                let y = one_hot(k, train_t[i]);
                let (p, cache) = match forward(model, &train_set[i].graph) {
                    Err(e) if is_non_finite(&e) => return Err(abort(report, epoch, b + 1)),
                    r => r?,
                };
                loss += cross_entropy(&y, &p)?;
                grads.accumulate(&backward(model, &cache, &y)?);
            }
            if !loss.is_finite() || !grads.is_finite() {
                return Err(abort(report, epoch, b + 1));
            }
            grads.scale(1.0 / batch.len() as f64);
            opt.step(model, &grads);
        }

        let measured = metrics_for(model, train_set, &train_t).and_then(|train_m| {
            let held_m = match (held_out, &held_t) {
                (Some(h), Some(t)) => Some(metrics_for(model, h, t)?),
                _ => None,
            };
            Ok((train_m, held_m))
        });
        let (train_m, held_m) = match measured {
            Err(TrainError::Model(e)) if is_non_finite(&e) => return Err(abort(report, epoch, 0)),
            r => r?,
        };
        if !train_m.loss.is_finite() || held_m.as_ref().is_some_and(|m| !m.loss.is_finite()) {
            return Err(abort(report, epoch, 0));
        }

        let monitored = held_m.as_ref().map(|m| m.loss);
        report.epochs.push(EpochRecord {
            epoch,
            train: train_m,
            held_out: held_m,
        });

        if let (Some(patience), Some(loss)) = (config.early_stop_patience, monitored) {
            match &best {
                Some((b, _, _)) if loss >= *b => {
                    let since = epoch - best.as_ref().map_or(0, |x| x.1);
                    if since >= patience {
                        report.stopped_early = true;
                        break;
                    }
                }
                _ => best = Some((loss, epoch, model.clone())),
            }
        }
    }
    if let Some((_, epoch, params)) = best {
        *model = params;
        report.best_epoch = Some(epoch);
    }
    report.wall_clock_seconds = Some(started.elapsed().as_secs_f64());
    Ok(report)
}
