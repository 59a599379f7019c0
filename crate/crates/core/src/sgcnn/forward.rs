use super::ops::{
    aggregate_state, attribute_matrices, check_conv, conv_pre, global_window, layer_input, node_windows,
    AggState,
};
use super::{fingerprint, ModelError, SgcnnModel};
use crate::graph::{neighborhood_sample, Graph, PoolSelection};
use crate::numerics::{softmax, Matrix};

/// Everything [`super::backward`] needs, captured during [`forward`].
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardCache {
    pub(crate) fingerprint: u64,
    /// `(i, j)` with `i ≤ j` where `(A+I)_ij = 1`.
    pub(crate) support: Vec<(usize, usize)>,
    pub(crate) agg: AggState,
    pub(crate) layers: Vec<LayerCache>,
    pub(crate) readout: Vec<f64>,
    pub(crate) probabilities: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct LayerCache {
    pub input: Matrix,
    /// Normalized input and row norms, when the layer normalizes.
    pub normalized: Option<(Matrix, Vec<f64>)>,
    pub windows: Vec<PoolSelection>,
    pub r: Vec<Matrix>,
    pub pre: Matrix,
}

impl ForwardCache {
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Graph-level vector fed to the classifier head.
    pub fn readout(&self) -> &[f64] {
        &self.readout
    }
}

/// Runs aggregation, every conv layer (the last one as a global readout),
/// the head and softmax. Neighborhoods are sampled deterministically.
pub fn forward(model: &SgcnnModel, g: &Graph) -> Result<(Vec<f64>, ForwardCache), ModelError> {
    if g.is_empty() {
        return Err(ModelError::EmptyGraph);
    }
    if g.feature_dim() != model.embed_dim {
        return Err(ModelError::FeatureDim {
            expected: model.embed_dim,
            found: g.feature_dim(),
        });
    }
    model.validate()?;

    let agg_layer = &model.aggregation;
    let samples = (0..g.len())
        .map(|v| neighborhood_sample(g, v, agg_layer.depth, agg_layer.cap, None))
        .collect::<Result<Vec<_>, _>>()?;
    let agg = aggregate_state(&g.features(), agg_layer, &samples)?;

    let last = model.conv_layers.len() - 1;
    let mut h = agg.out.clone();
    let mut layers = Vec::with_capacity(model.conv_layers.len());
    for (l, layer) in model.conv_layers.iter().enumerate() {
        check_conv(layer, h.cols())?;
        let windows = if l == last {
            vec![global_window(g, layer.k)?]
        } else {
            node_windows(g, layer.k)?
        };
        let normalized = layer_input(layer, &h);
        let source = normalized.as_ref().map_or(&h, |(xn, _)| xn);
        let r = attribute_matrices(g, source, layer.gates.as_ref(), layer.channels());
        let pre = conv_pre(layer, &windows, &r);
        let mut next = pre.clone();
        next.as_mut_slice().iter_mut().for_each(|v| *v = layer.phi.apply(*v));
        layers.push(LayerCache {
            input: std::mem::replace(&mut h, next),
            normalized,
            windows,
            r,
            pre,
        });
    }

    let readout = h.into_vec();
    let probabilities = softmax(&model.head.logits(&readout))?;
    let support = (0..g.len())
        .flat_map(|i| {
            std::iter::once((i, i)).chain(g.neighbors(i).iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
        })
        .collect();
    let cache = ForwardCache {
        fingerprint: fingerprint(model),
        support,
        agg,
        layers,
        readout,
        probabilities: probabilities.clone(),
    };
    Ok((probabilities, cache))
}
