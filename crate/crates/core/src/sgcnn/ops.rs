use super::{AggregationLayer, ClassifierHead, ConvLayer, ModelError, Pool};
use crate::graph::{pool_select, Graph, NeighborhoodSample, PoolSelection};
use crate::numerics::{softmax, Matrix};

/// Probabilities are clamped to this before taking logs.
pub const LOG_CLAMP: f64 = 1e-12;

/// Intermediates of one aggregation pass.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct AggState {
    /// `[x ; x']`, `n × 2f`.
    pub out: Matrix,
    /// Per node, the `d × f` matrix of hop means.
    pub hop_means: Vec<Matrix>,
    /// `pool + b` before `σ`, `n × f`.
    pub pre: Matrix,
    /// Max pooling only: winning hop per `(node, feature)`.
    pub argmax: Vec<usize>,
}

pub(crate) fn aggregate_state(
    x: &Matrix,
    layer: &AggregationLayer,
    samples: &[NeighborhoodSample],
) -> Result<AggState, ModelError> {
    let (n, f) = x.shape();
    let d = layer.depth;
    if layer.weights.len() != d || d == 0 {
        return Err(ModelError::Length {
            what: "aggregation weights",
            expected: d,
            found: layer.weights.len(),
        });
    }
    if samples.len() != n || samples.iter().enumerate().any(|(i, s)| s.center != i) {
        return Err(ModelError::Samples {
            expected: n,
            found: samples.len(),
        });
    }

    let mut out = Matrix::zeros(n, 2 * f);
    let mut pre = Matrix::zeros(n, f);
    let mut hop_means = Vec::with_capacity(n);
    let mut argmax = if layer.pool == Pool::Max { vec![0; n * f] } else { Vec::new() };

    for (v, sample) in samples.iter().enumerate() {
        let mut means = Matrix::zeros(d, f);
        for (j, hop) in sample.per_hop.iter().take(d).enumerate() {
            if hop.is_empty() {
                continue;
            }
            let row = means.row_mut(j);
            for &u in hop {
                for (m, xu) in row.iter_mut().zip(x.row(u)) {
                    *m += xu;
                }
            }
            let inv = 1.0 / hop.len() as f64;
            row.iter_mut().for_each(|m| *m *= inv);
        }

        for c in 0..f {
            let pooled = match layer.pool {
                Pool::Mean => {
                    (0..d).map(|j| layer.weights[j] * means[(j, c)]).sum::<f64>() / d as f64
                }
                Pool::Max => {
                    let mut best = 0;
                    let mut val = layer.weights[0] * means[(0, c)];
                    for j in 1..d {
                        let y = layer.weights[j] * means[(j, c)];
                        if y > val {
                            best = j;
                            val = y;
                        }
                    }
                    argmax[v * f + c] = best;
                    val
                }
            };
            let z = pooled + layer.bias;
            pre[(v, c)] = z;
            out[(v, c)] = x[(v, c)];
            out[(v, f + c)] = layer.sigma.apply(z);
        }
        hop_means.push(means);
    }
    Ok(AggState {
        out,
        hop_means,
        pre,
        argmax,
    })
}

/// Appends each node's aggregated neighborhood vector to its features.
/// `samples[i]` must be centered on node `i`.
pub fn aggregate(
    g: &Graph,
    layer: &AggregationLayer,
    samples: &[NeighborhoodSample],
) -> Result<Graph, ModelError> {
    let state = aggregate_state(&g.features(), layer, samples)?;
    Ok(g.with_features(&state.out)?)
}

/// `R_ij = (A+I)_ij · x_i·x_j / √f'`.
pub fn attribute_matrix(g: &Graph) -> Matrix {
    let x = g.features();
    attribute_matrices(g, &x, None, 1).remove(0)
}

/// [`attribute_matrix`] with feature coordinate `a` weighted by `gate[a]`.
pub fn gated_attribute_matrix(g: &Graph, gate: &[f64]) -> Result<Matrix, ModelError> {
    if gate.len() != g.feature_dim() {
        return Err(ModelError::FeatureDim {
            expected: g.feature_dim(),
            found: gate.len(),
        });
    }
    let gates = Matrix::from_vec(1, gate.len(), gate.to_vec())?;
    Ok(attribute_matrices(g, &g.features(), Some(&gates), 1).remove(0))
}

/// Added to `|x|²` before normalizing a feature row.
pub const NORM_EPS: f64 = 1e-8;

/// Rows rescaled to length `f'^¼` (so the attribute matrix has a unit
/// diagonal), and the `√(|x|² + ε)` each was divided by.
pub(crate) fn normalize_rows(x: &Matrix) -> (Matrix, Vec<f64>) {
    let target = scale_of(x.cols()).sqrt();
    let mut out = x.clone();
    let mut norms = Vec::with_capacity(x.rows());
    for i in 0..x.rows() {
        let row = out.row_mut(i);
        let r = (row.iter().map(|v| v * v).sum::<f64>() + NORM_EPS).sqrt();
        row.iter_mut().for_each(|v| *v *= target / r);
        norms.push(r);
    }
    (out, norms)
}

/// Features a conv layer builds its attribute matrices from.
pub(crate) fn layer_input(layer: &ConvLayer, x: &Matrix) -> Option<(Matrix, Vec<f64>)> {
    layer.normalize.then(|| normalize_rows(x))
}

pub(crate) fn scale_of(width: usize) -> f64 {
    (width.max(1) as f64).sqrt()
}

/// One attribute matrix per channel when gated, else a single shared one.
pub(crate) fn attribute_matrices(
    g: &Graph,
    x: &Matrix,
    gates: Option<&Matrix>,
    channels: usize,
) -> Vec<Matrix> {
    let n = g.len();
    let s = scale_of(x.cols());
    let count = if gates.is_some() { channels } else { 1 };
    let mut out = vec![Matrix::zeros(n, n); count];
    let mut prod = vec![0.0; x.cols()];
    for i in 0..n {
        let pairs = std::iter::once(i).chain(g.neighbors(i).iter().copied().filter(|&j| j > i));
        for j in pairs {
            for ((p, a), b) in prod.iter_mut().zip(x.row(i)).zip(x.row(j)) {
                *p = a * b;
            }
            for (c, r) in out.iter_mut().enumerate() {
                let v = match gates {
                    Some(gm) => gm.row(c).iter().zip(&prod).map(|(w, p)| w * p).sum::<f64>(),
                    None => prod.iter().sum::<f64>(),
                } / s;
                r[(i, j)] = v;
                r[(j, i)] = v;
            }
        }
    }
    out
}

/// Per-node windows: the closed neighborhood of each node, pooled to `k`.
pub(crate) fn node_windows(g: &Graph, k: usize) -> Result<Vec<PoolSelection>, ModelError> {
    (0..g.len())
        .map(|v| {
            let mut cand = g.neighbors(v).to_vec();
            cand.push(v);
            Ok(pool_select(g, &cand, k)?)
        })
        .collect()
}

pub(crate) fn global_window(g: &Graph, k: usize) -> Result<PoolSelection, ModelError> {
    let all: Vec<usize> = (0..g.len()).collect();
    Ok(pool_select(g, &all, k)?)
}

/// Pre-activations `⟨W_c, R_c restricted to window⟩_F + b_c`, one row per
/// window.
pub(crate) fn conv_pre(layer: &ConvLayer, windows: &[PoolSelection], r: &[Matrix]) -> Matrix {
    let c_out = layer.channels();
    let mut u = Matrix::zeros(windows.len(), c_out);
    for (w, sel) in windows.iter().enumerate() {
        for c in 0..c_out {
            let rc = &r[if r.len() == 1 { 0 } else { c }];
            let kernel = &layer.kernels[c];
            let mut acc = layer.biases[c];
            // Padded rows/columns are zero and contribute nothing.
            for (p, &i) in sel.indices.iter().enumerate() {
                for (q, &j) in sel.indices.iter().enumerate() {
                    acc += kernel[(p, q)] * rc[(i, j)];
                }
            }
            u[(w, c)] = acc;
        }
    }
    u
}

pub(crate) fn check_conv(layer: &ConvLayer, width: usize) -> Result<(), ModelError> {
    if layer.k == 0 || layer.channels() == 0 {
        return Err(ModelError::Config("conv k and channels must be positive".into()));
    }
    if layer.kernels.iter().any(|w| w.shape() != (layer.k, layer.k)) {
        return Err(ModelError::Config(format!("kernels must be {0}x{0}", layer.k)));
    }
    if layer.biases.len() != layer.channels() {
        return Err(ModelError::Length {
            what: "conv biases",
            expected: layer.channels(),
            found: layer.biases.len(),
        });
    }
    if let Some(g) = &layer.gates {
        if g.shape() != (layer.channels(), width) {
            return Err(ModelError::FeatureDim {
                expected: g.cols(),
                found: width,
            });
        }
    }
    Ok(())
}

fn activate(layer: &ConvLayer, u: &Matrix) -> Matrix {
    let mut h = u.clone();
    h.as_mut_slice().iter_mut().for_each(|v| *v = layer.phi.apply(*v));
    h
}

/// Replaces every node's features with the `C` channel responses of its
/// pooled closed neighborhood; adjacency is unchanged.
pub fn conv_layer_forward(g: &Graph, layer: &ConvLayer) -> Result<Graph, ModelError> {
    if g.is_empty() {
        return Err(ModelError::EmptyGraph);
    }
    check_conv(layer, g.feature_dim())?;
    let mut x = g.features();
    if let Some((xn, _)) = layer_input(layer, &x) {
        x = xn;
    }
    let r = attribute_matrices(g, &x, layer.gates.as_ref(), layer.channels());
    let u = conv_pre(layer, &node_windows(g, layer.k)?, &r);
    Ok(g.with_features(&activate(layer, &u))?)
}

/// Graph-level vector in `R^C`: `last` applied once to the top-`k` nodes of
/// the whole graph.
pub fn readout(g: &Graph, last: &ConvLayer) -> Result<Vec<f64>, ModelError> {
    if g.is_empty() {
        return Err(ModelError::EmptyGraph);
    }
    check_conv(last, g.feature_dim())?;
    let mut x = g.features();
    if let Some((xn, _)) = layer_input(last, &x) {
        x = xn;
    }
    let r = attribute_matrices(g, &x, last.gates.as_ref(), last.channels());
    let u = conv_pre(last, &[global_window(g, last.k)?], &r);
    Ok(activate(last, &u).into_vec())
}

pub fn readout_and_classify(
    g: &Graph,
    last: &ConvLayer,
    head: &ClassifierHead,
) -> Result<Vec<f64>, ModelError> {
    let z = readout(g, last)?;
    if z.len() != head.weight.rows() {
        return Err(ModelError::Length {
            what: "readout vector",
            expected: head.weight.rows(),
            found: z.len(),
        });
    }
    Ok(softmax(&head.logits(&z))?)
}

/// `−Σ y_i ln max(ŷ_i, 1e-12)`.
pub fn cross_entropy(y: &[f64], y_hat: &[f64]) -> Result<f64, ModelError> {
    if y.len() != y_hat.len() {
        return Err(ModelError::Length {
            what: "prediction",
            expected: y.len(),
            found: y_hat.len(),
        });
    }
    Ok(-y
        .iter()
        .zip(y_hat)
        .filter(|(t, _)| **t != 0.0)
        .map(|(t, p)| t * p.max(LOG_CLAMP).ln())
        .sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::{random_graph, six_node};
    use crate::graph::{build_graph, neighborhood_sample, Node};
    use crate::numerics::{Activation, Rng};
    use proptest::prelude::*;

    fn samples(g: &Graph, depth: usize, cap: usize) -> Vec<NeighborhoodSample> {
        (0..g.len())
            .map(|v| neighborhood_sample(g, v, depth, cap, None).unwrap())
            .collect()
    }

    fn agg(weights: Vec<f64>, bias: f64, sigma: Activation, pool: Pool) -> AggregationLayer {
        AggregationLayer {
            depth: weights.len(),
            cap: 100,
            weights,
            bias,
            sigma,
            pool,
        }
    }

    fn conv(k: usize, kernels: Vec<Matrix>, biases: Vec<f64>, phi: Activation) -> ConvLayer {
        ConvLayer {
            k,
            kernels,
            biases,
            phi,
            gates: None,
            normalize: false,
        }
    }

    fn random_conv(rng: &mut Rng, k: usize, c: usize, phi: Activation) -> ConvLayer {
        let kernels = (0..c)
            .map(|_| Matrix::from_vec(k, k, (0..k * k).map(|_| rng.uniform(-1.0, 1.0)).collect()).unwrap())
            .collect();
        conv(k, kernels, (0..c).map(|_| rng.uniform(-0.5, 0.5)).collect(), phi)
    }

    #[test]
    fn isolated_node_gets_sigma_of_bias() {
        let g = build_graph(vec![Node::new("a", "t", vec![0.3, -2.0])], &[] as &[(&str, &str)]).unwrap();
        for pool in [Pool::Mean, Pool::Max] {
            let out = aggregate(&g, &agg(vec![0.7, -1.1], 0.4, Activation::Sigmoid, pool), &samples(&g, 2, 4))
                .unwrap();
            let s = Activation::Sigmoid.apply(0.4);
            assert_eq!(out.node(0).feature, [0.3, -2.0, s, s]);
        }
    }

    #[test]
    fn star_center_averages_leaves() {
        let nodes = vec![
            Node::new("c", "t", vec![9.0, 9.0]),
            Node::new("l1", "t", vec![1.0, 0.0]),
            Node::new("l2", "t", vec![0.0, 1.0]),
        ];
        let g = build_graph(nodes, &[("c", "l1"), ("c", "l2")]).unwrap();
        let out = aggregate(&g, &agg(vec![1.0], 0.0, Activation::Identity, Pool::Mean), &samples(&g, 1, 8))
            .unwrap();
        assert_eq!(out.node(0).feature, [9.0, 9.0, 0.5, 0.5]);
    }

    #[test]
    fn node_e_aggregates_b_d_f() {
        let g = six_node();
        let e = g.index_of("E").unwrap();
        let s = samples(&g, 2, 10);
        let hop1: Vec<&str> = s[e].per_hop[0].iter().map(|&i| g.node(i).key.as_str()).collect();
        assert_eq!(hop1, ["B", "D", "F"]);

        // Hand-computed with one-hot features: hop 1 = {B, D, F}, hop 2 = {A, C}.
        let w = [0.6, -0.4];
        let b = 0.1;
        let mut expected = [0.0; 6];
        for (i, key) in ["A", "B", "C", "D", "E", "F"].iter().enumerate() {
            let m1 = if ["B", "D", "F"].contains(key) { 1.0 / 3.0 } else { 0.0 };
            let m2 = if ["A", "C"].contains(key) { 0.5 } else { 0.0 };
            expected[i] = (w[0] * m1 + w[1] * m2) / 2.0 + b;
        }
        let out = aggregate(&g, &agg(w.to_vec(), b, Activation::Identity, Pool::Mean), &s).unwrap();
        let x_prime = &out.node(e).feature[6..];
        for (a, b) in x_prime.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }

        let out = aggregate(&g, &agg(w.to_vec(), b, Activation::Identity, Pool::Max), &s).unwrap();
        for (i, v) in out.node(e).feature[6..].iter().enumerate() {
            let m1 = if [1, 3, 5].contains(&i) { 1.0 / 3.0 } else { 0.0 };
            let m2 = if [0, 2].contains(&i) { 0.5 } else { 0.0 };
            assert!((v - ((w[0] * m1).max(w[1] * m2) + b)).abs() < 1e-12);
        }
    }

    #[test]
    fn aggregate_rejects_bad_samples() {
        let g = six_node();
        let mut s = samples(&g, 1, 4);
        s.pop();
        assert!(aggregate(&g, &agg(vec![1.0], 0.0, Activation::Relu, Pool::Mean), &s).is_err());
        let s = samples(&g, 1, 4);
        assert!(aggregate(&g, &agg(vec![1.0, 2.0], 0.0, Activation::Relu, Pool::Mean), &s)
            .map(|_| ())
            .is_ok());
        let mut bad = agg(vec![1.0], 0.0, Activation::Relu, Pool::Mean);
        bad.depth = 2;
        assert!(aggregate(&g, &bad, &s).is_err());
    }

    #[test]
    fn attribute_matrix_singleton_and_mask() {
        let g = build_graph(vec![Node::new("a", "t", vec![1.0])], &[] as &[(&str, &str)]).unwrap();
        assert_eq!(attribute_matrix(&g), Matrix::from_rows(&[[1.0]]).unwrap());

        let g = build_graph(
            vec![Node::new("a", "t", vec![1.0, 2.0]), Node::new("b", "t", vec![3.0, 4.0])],
            &[] as &[(&str, &str)],
        )
        .unwrap();
        let r = attribute_matrix(&g);
        assert_eq!(r[(0, 1)], 0.0);
        assert_eq!(r[(1, 0)], 0.0);
        assert!((r[(1, 1)] - 25.0 / 2f64.sqrt()).abs() < 1e-12);
    }

    fn brute_attribute(g: &Graph) -> Matrix {
        let n = g.len();
        let f = g.feature_dim();
        let mut r = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mask = if i == j || g.has_edge(i, j) { 1.0 } else { 0.0 };
                let mut s = 0.0;
                for a in 0..f {
                    s += g.node(i).feature[a] * g.node(j).feature[a];
                }
                r[(i, j)] = mask * s / (f as f64).sqrt();
            }
        }
        r
    }

    #[test]
    fn attribute_matrix_matches_double_loop() {
        let mut rng = Rng::new(21);
        for _ in 0..100 {
            let n = 1 + rng.below(10);
            let f = 1 + rng.below(6);
            let g = random_graph(&mut rng, n, 0.4, f);
            let r = attribute_matrix(&g);
            assert!(r.max_abs_diff(&brute_attribute(&g)).unwrap() < 1e-12);
            assert!(r.is_symmetric());
        }
    }

    #[test]
    fn unit_gates_match_plain_attribute_matrix() {
        let mut rng = Rng::new(5);
        let g = random_graph(&mut rng, 7, 0.5, 4);
        let r = gated_attribute_matrix(&g, &[1.0; 4]).unwrap();
        assert!(r.max_abs_diff(&attribute_matrix(&g)).unwrap() < 1e-15);
        let r = gated_attribute_matrix(&g, &[2.0, 0.0, 0.0, 0.0]).unwrap();
        let i = 0;
        assert!((r[(i, i)] - 2.0 * g.node(i).feature[0].powi(2) / 2.0).abs() < 1e-12);
        assert!(gated_attribute_matrix(&g, &[1.0; 3]).is_err());
    }

    #[test]
    fn zero_kernels_give_zero_features() {
        let mut rng = Rng::new(8);
        let g = random_graph(&mut rng, 6, 0.5, 3);
        let layer = conv(3, vec![Matrix::zeros(3, 3); 2], vec![0.0; 2], Activation::Relu);
        let out = conv_layer_forward(&g, &layer).unwrap();
        assert_eq!(out.feature_dim(), 2);
        assert!(out.nodes().iter().all(|n| n.feature == [0.0, 0.0]));
        assert_eq!(out.adjacency(), g.adjacency());
    }

    #[test]
    fn singleton_unit_kernel() {
        let g = build_graph(vec![Node::new("a", "t", vec![1.0, 2.0, 2.0])], &[] as &[(&str, &str)]).unwrap();
        let layer = conv(1, vec![Matrix::identity(1)], vec![0.0], Activation::Identity);
        let out = conv_layer_forward(&g, &layer).unwrap();
        assert!((out.node(0).feature[0] - 9.0 / 3f64.sqrt()).abs() < 1e-12);
    }

    /// Explicit-loop re-implementation: no Matrix ops, no shared helpers.
    fn brute_conv(g: &Graph, layer: &ConvLayer) -> Vec<Vec<f64>> {
        let n = g.len();
        let f = g.feature_dim();
        let mut out = vec![vec![0.0; layer.channels()]; n];
        for v in 0..n {
            let mut cand: Vec<usize> = (0..n).filter(|&u| u == v || g.has_edge(u, v)).collect();
            cand.sort_by(|&a, &b| g.degree(b).cmp(&g.degree(a)).then(a.cmp(&b)));
            cand.truncate(layer.k);
            for c in 0..layer.channels() {
                let mut acc = layer.biases[c];
                for p in 0..layer.k {
                    for q in 0..layer.k {
                        if p >= cand.len() || q >= cand.len() {
                            continue;
                        }
                        let (i, j) = (cand[p], cand[q]);
                        if i != j && !g.has_edge(i, j) {
                            continue;
                        }
                        let mut s = 0.0;
                        for a in 0..f {
                            s += g.node(i).feature[a] * g.node(j).feature[a];
                        }
                        acc += layer.kernels[c][(p, q)] * s / (f as f64).sqrt();
                    }
                }
                out[v][c] = layer.phi.apply(acc);
            }
        }
        out
    }

    #[test]
    fn conv_matches_scalar_loops() {
        let mut rng = Rng::new(34);
        for _ in 0..20 {
            let g = random_graph(&mut rng, 6, 0.45, 5);
            let k = 1 + rng.below(5);
            let layer = random_conv(&mut rng, k, 3, Activation::Tanh);
            let out = conv_layer_forward(&g, &layer).unwrap();
            for (v, want) in brute_conv(&g, &layer).iter().enumerate() {
                for (a, b) in out.node(v).feature.iter().zip(want) {
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn readout_symmetry_cases() {
        let mut rng = Rng::new(3);
        let g = random_graph(&mut rng, 5, 0.5, 4);
        let last = conv(2, vec![Matrix::zeros(2, 2); 3], vec![0.0; 3], Activation::Relu);
        let head = ClassifierHead {
            weight: Matrix::from_vec(3, 4, (0..12).map(|_| rng.uniform(-1.0, 1.0)).collect()).unwrap(),
            bias: vec![0.0; 4],
        };
        let p = readout_and_classify(&g, &last, &head).unwrap();
        assert!(p.iter().all(|x| (x - 0.25).abs() < 1e-15));

        let last = random_conv(&mut rng, 2, 3, Activation::Tanh);
        let col: Vec<f64> = (0..3).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let mut w = Matrix::zeros(3, 4);
        for c in 0..3 {
            w.row_mut(c).iter_mut().for_each(|x| *x = col[c]);
        }
        let head = ClassifierHead {
            weight: w,
            bias: vec![0.0; 4],
        };
        let p = readout_and_classify(&g, &last, &head).unwrap();
        assert!(p.iter().all(|x| (x - 0.25).abs() < 1e-12));
    }

    #[test]
    fn readout_probabilities_sum_to_one() {
        let mut rng = Rng::new(77);
        for _ in 0..100 {
            let n = 1 + rng.below(10);
            let g = random_graph(&mut rng, n, 0.4, 3);
            let k = 1 + rng.below(4);
            let last = random_conv(&mut rng, k, 4, Activation::Relu);
            let classes = 2 + rng.below(5);
            let head = ClassifierHead {
                weight: Matrix::from_vec(4, classes, (0..4 * classes).map(|_| rng.uniform(-3.0, 3.0)).collect())
                    .unwrap(),
                bias: (0..classes).map(|_| rng.uniform(-1.0, 1.0)).collect(),
            };
            let p = readout_and_classify(&g, &last, &head).unwrap();
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cross_entropy_cases() {
        assert!(cross_entropy(&[0.0, 1.0], &[0.0, 1.0]).unwrap().abs() < 1e-9);
        let u = [1.0 / 6.0; 6];
        let y = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        assert!((cross_entropy(&y, &u).unwrap() - 1.791759).abs() < 1e-6);
        assert!((cross_entropy(&y, &[0.5, 0.5, 0.0, 0.0, 0.0, 0.0]).unwrap() - 0.693147).abs() < 1e-6);
        assert!((cross_entropy(&[1.0, 0.0], &[0.0, 1.0]).unwrap() + LOG_CLAMP.ln()).abs() < 1e-9);
        assert!(cross_entropy(&[1.0], &[0.5, 0.5]).is_err());
    }

    proptest! {
        #[test]
        fn cross_entropy_non_negative(raw in proptest::collection::vec(0.0f64..1.0, 2..8), t in 0usize..8) {
            let total: f64 = raw.iter().sum::<f64>() + 1e-9;
            let p: Vec<f64> = raw.iter().map(|x| (x + 1e-9 / raw.len() as f64) / total).collect();
            let t = t % p.len();
            let mut y = vec![0.0; p.len()];
            y[t] = 1.0;
            let l = cross_entropy(&y, &p).unwrap();
            prop_assert!(l >= 0.0);
            prop_assert_eq!(l == 0.0, p[t] >= 1.0);
        }
    }
}
