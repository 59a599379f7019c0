//! Structural graph convolution: neighborhood aggregation, masked attribute
//! matrices, degree-pooled k×k convolution, global readout, softmax head,
//! cross-entropy, and exact reverse-mode gradients.
//!
//! A forward pass runs
//!
//! ```text
//! aggregate ─▶ [attribute matrix ─▶ per-node conv] × (L-1) ─▶ attribute matrix ─▶ readout conv ─▶ head ─▶ softmax
//! ```
//!
//! Node order and adjacency are fixed for the whole pass; each conv layer
//! replaces every node's features with its `C` channel responses.

mod backward;
mod forward;
pub mod io;
mod ops;

pub use backward::backward;
pub use forward::{forward, ForwardCache};
pub use ops::{
    aggregate, attribute_matrix, conv_layer_forward, cross_entropy, gated_attribute_matrix,
    readout, readout_and_classify, LOG_CLAMP,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::GraphError;
use crate::numerics::{Activation, Matrix, NumericsError, Rng};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("feature dimension {found} does not match expected {expected}")]
    FeatureDim { expected: usize, found: usize },
    #[error("invalid model configuration: {0}")]
    Config(String),
    #[error("length mismatch: {what} has {found}, expected {expected}")]
    Length {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("neighborhood samples cover {found} nodes, graph has {expected}")]
    Samples { expected: usize, found: usize },
    #[error("forward cache does not belong to this model's current parameters")]
    StaleCache,
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pool {
    Max,
    Mean,
}

/// Per-hop neighborhood aggregation. Node `n` gets
/// `σ(pool_j(w_j · mean(hop_j features)) + b)`, appended to its own features.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregationLayer {
    pub depth: usize,
    /// Per-hop cap on sampled neighbors.
    pub cap: usize,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub sigma: Activation,
    pub pool: Pool,
}

/// `C` k×k kernels applied to degree-pooled attribute matrices.
///
/// `gates` (C × input width), when present, weights the feature
/// coordinates entering each channel's attribute matrix:
/// `R_c[i][j] = (A+I)_ij · Σ_a gates[c][a]·x_ia·x_ja / √f'`. With all gates
/// at 1 this is the plain masked, scaled Gram matrix. Gates start uniform
/// in `[-0.5, 0.5]`: all-ones gates leave every channel blind to which
/// coordinates carry the signal, and deep stacks then barely train.
///
/// With `normalize`, each node's feature row is first rescaled to length
/// `f'^¼` (`x·f'^¼ / √(|x|² + ε)`), so the attribute matrix holds cosine
/// similarities with a unit diagonal and activations keep a stable scale
/// through stacked layers.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvLayer {
    pub k: usize,
    pub kernels: Vec<Matrix>,
    pub biases: Vec<f64>,
    pub phi: Activation,
    pub gates: Option<Matrix>,
    pub normalize: bool,
}

impl ConvLayer {
    pub fn channels(&self) -> usize {
        self.kernels.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierHead {
    /// `C_final × num_classes`.
    pub weight: Matrix,
    pub bias: Vec<f64>,
}

impl ClassifierHead {
    pub fn num_classes(&self) -> usize {
        self.bias.len()
    }

    pub fn logits(&self, z: &[f64]) -> Vec<f64> {
        let mut out = self.bias.clone();
        for (c, &zc) in z.iter().enumerate() {
            for (o, &w) in out.iter_mut().zip(self.weight.row(c)) {
                *o += zc * w;
            }
        }
        out
    }
}

/// Shape of one convolution layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvSpec {
    pub k: usize,
    pub channels: usize,
}

/// Hyperparameters from which a model is initialized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub embed_dim: usize,
    pub depth: usize,
    pub cap: usize,
    pub sigma: Activation,
    pub pool: Pool,
    pub phi: Activation,
    /// The last entry is the global readout layer.
    pub conv: Vec<ConvSpec>,
    pub feature_gates: bool,
    pub normalize_features: bool,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            embed_dim: 64,
            depth: 1,
            cap: 16,
            sigma: Activation::Relu,
            pool: Pool::Mean,
            phi: Activation::Relu,
            conv: vec![ConvSpec { k: 4, channels: 16 }; 4],
            feature_gates: true,
            normalize_features: true,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |m: &str| Err(ModelError::Config(m.to_string()));
        if self.embed_dim == 0 {
            return bad("embed_dim must be positive");
        }
        if self.depth == 0 || self.cap == 0 {
            return bad("depth and cap must be positive");
        }
        if self.conv.is_empty() {
            return bad("at least one conv layer (the readout) is required");
        }
        if self.conv.iter().any(|c| c.k == 0 || c.channels == 0) {
            return bad("conv k and channels must be positive");
        }
        Ok(())
    }

    /// Width of the features entering conv layer `l`.
    pub fn input_width(&self, l: usize) -> usize {
        if l == 0 {
            2 * self.embed_dim
        } else {
            self.conv[l - 1].channels
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SgcnnModel {
    pub embed_dim: usize,
    pub aggregation: AggregationLayer,
    /// The last layer is applied once, globally, as the readout.
    pub conv_layers: Vec<ConvLayer>,
    pub head: ClassifierHead,
    /// Sorted class labels; index = class id.
    pub labels: Vec<String>,
}

impl SgcnnModel {
    /// Initializes weights uniformly in `±1/√fan_in` from `seed`; gates
    /// are uniform in `[-0.5, 0.5]` from a separate stream.
    pub fn init(config: &ModelConfig, labels: &[String], seed: u64) -> Result<Self, ModelError> {
        config.validate()?;
        let mut labels = labels.to_vec();
        labels.sort();
        labels.dedup();
        if labels.len() < 2 {
            return Err(ModelError::Config("at least two labels are required".into()));
        }
        let mut rng = Rng::with_stream(seed, 0x5eed);
        let mut gate_rng = Rng::with_stream(seed, 0x6a7e);
        let uniform = |fan_in: usize| {
            let bound = 1.0 / (fan_in as f64).sqrt();
            move |rng: &mut Rng| rng.uniform(-bound, bound)
        };

        let agg_u = uniform(config.depth);
        let aggregation = AggregationLayer {
            depth: config.depth,
            cap: config.cap,
            weights: (0..config.depth).map(|_| agg_u(&mut rng)).collect(),
            bias: agg_u(&mut rng),
            sigma: config.sigma,
            pool: config.pool,
        };

        let mut conv_layers = Vec::with_capacity(config.conv.len());
        for (l, spec) in config.conv.iter().enumerate() {
            let u = uniform(spec.k * spec.k);
            let kernels = (0..spec.channels)
                .map(|_| {
                    let data = (0..spec.k * spec.k).map(|_| u(&mut rng)).collect();
                    Matrix::from_vec(spec.k, spec.k, data).expect("k*k entries")
                })
                .collect();
            let biases = (0..spec.channels).map(|_| u(&mut rng)).collect();
            let gates = config.feature_gates.then(|| {
                let (c, w) = (spec.channels, config.input_width(l));
                let data = (0..c * w).map(|_| gate_rng.uniform(-0.5, 0.5)).collect();
                Matrix::from_vec(c, w, data).expect("c*w entries")
            });
            conv_layers.push(ConvLayer {
                k: spec.k,
                kernels,
                biases,
                phi: config.phi,
                gates,
                normalize: config.normalize_features,
            });
        }

        let c_final = config.conv.last().expect("validated").channels;
        let u = uniform(c_final);
        let weight = Matrix::from_vec(
            c_final,
            labels.len(),
            (0..c_final * labels.len()).map(|_| u(&mut rng)).collect(),
        )
        .expect("sized");
        let bias = (0..labels.len()).map(|_| u(&mut rng)).collect();

        let model = Self {
            embed_dim: config.embed_dim,
            aggregation,
            conv_layers,
            head: ClassifierHead { weight, bias },
            labels,
        };
        model.validate()?;
        Ok(model)
    }

    /// Recovers the hyperparameters this model was built with.
    pub fn config(&self) -> ModelConfig {
        ModelConfig {
            embed_dim: self.embed_dim,
            depth: self.aggregation.depth,
            cap: self.aggregation.cap,
            sigma: self.aggregation.sigma,
            pool: self.aggregation.pool,
            phi: self.conv_layers.first().map_or(Activation::Relu, |l| l.phi),
            conv: self
                .conv_layers
                .iter()
                .map(|l| ConvSpec {
                    k: l.k,
                    channels: l.channels(),
                })
                .collect(),
            feature_gates: self.conv_layers.iter().any(|l| l.gates.is_some()),
            normalize_features: self.conv_layers.iter().any(|l| l.normalize),
        }
    }

    pub fn num_classes(&self) -> usize {
        self.labels.len()
    }

    pub fn label_index(&self, label: &str) -> Result<usize, ModelError> {
        self.labels
            .binary_search_by(|l| l.as_str().cmp(label))
            .map_err(|_| ModelError::UnknownLabel(label.to_string()))
    }

    /// Checks every shape invariant.
    pub fn validate(&self) -> Result<(), ModelError> {
        let agg = &self.aggregation;
        if agg.depth == 0 || agg.weights.len() != agg.depth {
            return Err(ModelError::Length {
                what: "aggregation weights",
                expected: agg.depth,
                found: agg.weights.len(),
            });
        }
        if self.conv_layers.is_empty() {
            return Err(ModelError::Config("no conv layers".into()));
        }
        let mut width = 2 * self.embed_dim;
        for layer in &self.conv_layers {
            let c = layer.channels();
            if layer.k == 0 || c == 0 {
                return Err(ModelError::Config("conv k and channels must be positive".into()));
            }
            if layer.kernels.iter().any(|w| w.shape() != (layer.k, layer.k)) {
                return Err(ModelError::Config(format!("kernels must be {0}x{0}", layer.k)));
            }
            if layer.biases.len() != c {
                return Err(ModelError::Length {
                    what: "conv biases",
                    expected: c,
                    found: layer.biases.len(),
                });
            }
            if let Some(g) = &layer.gates {
                if g.shape() != (c, width) {
                    return Err(ModelError::Config(format!(
                        "gates are {}x{}, expected {c}x{width}",
                        g.rows(),
                        g.cols()
                    )));
                }
            }
            width = c;
        }
        if self.head.weight.shape() != (width, self.labels.len())
            || self.head.bias.len() != self.labels.len()
        {
            return Err(ModelError::Config(format!(
                "head must be {width}x{}",
                self.labels.len()
            )));
        }
        if self.labels.len() < 2 {
            return Err(ModelError::Config("at least two labels are required".into()));
        }
        Ok(())
    }
}

/// Ordered access to every trainable tensor. Models and gradients list
/// their tensors in the same order.
pub trait ParamTensors {
    fn tensors(&self) -> Vec<&[f64]>;
    fn tensors_mut(&mut self) -> Vec<&mut [f64]>;

    fn param_count(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    fn flat(&self) -> Vec<f64> {
        self.tensors().concat()
    }

    fn set_flat(&mut self, values: &[f64]) {
        let mut rest = values;
        for t in self.tensors_mut() {
            let (head, tail) = rest.split_at(t.len());
            t.copy_from_slice(head);
            rest = tail;
        }
        assert!(rest.is_empty(), "flat parameter vector too long");
    }
}

fn conv_tensors(layers: &[ConvLayer]) -> Vec<&[f64]> {
    let mut out = Vec::new();
    for l in layers {
        out.extend(l.kernels.iter().map(Matrix::as_slice));
        out.push(l.biases.as_slice());
        if let Some(g) = &l.gates {
            out.push(g.as_slice());
        }
    }
    out
}

fn conv_tensors_mut(layers: &mut [ConvLayer]) -> Vec<&mut [f64]> {
    let mut out = Vec::new();
    for l in layers {
        out.extend(l.kernels.iter_mut().map(Matrix::as_mut_slice));
        out.push(l.biases.as_mut_slice());
        if let Some(g) = &mut l.gates {
            out.push(g.as_mut_slice());
        }
    }
    out
}

impl ParamTensors for SgcnnModel {
    fn tensors(&self) -> Vec<&[f64]> {
        let mut out = vec![
            self.aggregation.weights.as_slice(),
            std::slice::from_ref(&self.aggregation.bias),
        ];
        out.extend(conv_tensors(&self.conv_layers));
        out.push(self.head.weight.as_slice());
        out.push(self.head.bias.as_slice());
        out
    }

    fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = vec![
            self.aggregation.weights.as_mut_slice(),
            std::slice::from_mut(&mut self.aggregation.bias),
        ];
        out.extend(conv_tensors_mut(&mut self.conv_layers));
        out.push(self.head.weight.as_mut_slice());
        out.push(self.head.bias.as_mut_slice());
        out
    }
}

/// Gradient of the loss with respect to every trainable parameter, laid out
/// like the model.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub aggregation_weights: Vec<f64>,
    pub aggregation_bias: f64,
    pub conv: Vec<ConvGradients>,
    pub head_weight: Matrix,
    pub head_bias: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvGradients {
    pub kernels: Vec<Matrix>,
    pub biases: Vec<f64>,
    pub gates: Option<Matrix>,
}

impl Gradients {
    pub fn zeros_like(model: &SgcnnModel) -> Self {
        Self {
            aggregation_weights: vec![0.0; model.aggregation.weights.len()],
            aggregation_bias: 0.0,
            conv: model
                .conv_layers
                .iter()
                .map(|l| ConvGradients {
                    kernels: vec![Matrix::zeros(l.k, l.k); l.channels()],
                    biases: vec![0.0; l.channels()],
                    gates: l.gates.as_ref().map(|g| Matrix::zeros(g.rows(), g.cols())),
                })
                .collect(),
            head_weight: Matrix::zeros(model.head.weight.rows(), model.head.weight.cols()),
            head_bias: vec![0.0; model.head.bias.len()],
        }
    }

    /// `self += other`, tensor by tensor.
    pub fn accumulate(&mut self, other: &Gradients) {
        for (a, b) in self.tensors_mut().into_iter().zip(other.tensors()) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }

    pub fn scale(&mut self, s: f64) {
        for t in self.tensors_mut() {
            t.iter_mut().for_each(|x| *x *= s);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|v| v.is_finite()))
    }
}

impl ParamTensors for Gradients {
    fn tensors(&self) -> Vec<&[f64]> {
        let mut out = vec![
            self.aggregation_weights.as_slice(),
            std::slice::from_ref(&self.aggregation_bias),
        ];
        for l in &self.conv {
            out.extend(l.kernels.iter().map(Matrix::as_slice));
            out.push(l.biases.as_slice());
            if let Some(g) = &l.gates {
                out.push(g.as_slice());
            }
        }
        out.push(self.head_weight.as_slice());
        out.push(self.head_bias.as_slice());
        out
    }

    fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = vec![
            self.aggregation_weights.as_mut_slice(),
            std::slice::from_mut(&mut self.aggregation_bias),
        ];
        for l in &mut self.conv {
            out.extend(l.kernels.iter_mut().map(Matrix::as_mut_slice));
            out.push(l.biases.as_mut_slice());
            if let Some(g) = &mut l.gates {
                out.push(g.as_mut_slice());
            }
        }
        out.push(self.head_weight.as_mut_slice());
        out.push(self.head_bias.as_mut_slice());
        out
    }
}

/// FNV-1a over the bit patterns of every parameter, used to detect stale
/// forward caches.
pub(crate) fn fingerprint(model: &SgcnnModel) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut mix = |x: u64| {
        for b in x.to_le_bytes() {
            h = (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    for t in model.tensors() {
        mix(t.len() as u64);
        for v in t {
            mix(v.to_bits());
        }
    }
    h
}
