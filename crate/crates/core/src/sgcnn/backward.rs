use super::forward::{ForwardCache, LayerCache};
use super::ops::scale_of;
use super::{fingerprint, ConvGradients, ConvLayer, Gradients, ModelError, Pool, SgcnnModel};
use crate::numerics::Matrix;

/// Gradient of `cross_entropy(y, forward(model, g))` for the graph that
/// produced `cache`. Pool selections are treated as constants.
pub fn backward(model: &SgcnnModel, cache: &ForwardCache, y: &[f64]) -> Result<Gradients, ModelError> {
    if cache.fingerprint != fingerprint(model) || cache.layers.len() != model.conv_layers.len() {
        return Err(ModelError::StaleCache);
    }
    if y.len() != model.num_classes() {
        return Err(ModelError::Length {
            what: "target",
            expected: model.num_classes(),
            found: y.len(),
        });
    }
    let mut grads = Gradients::zeros_like(model);

    // Softmax + cross-entropy: d/dlogit_k = p_k·Σy − y_k.
    let mass: f64 = y.iter().sum();
    let dlogits: Vec<f64> = cache
        .probabilities
        .iter()
        .zip(y)
        .map(|(p, t)| p * mass - t)
        .collect();
    let head = &model.head;
    let mut dz = vec![0.0; head.weight.rows()];
    for (c, zc) in cache.readout.iter().enumerate() {
        for (k, dl) in dlogits.iter().enumerate() {
            grads.head_weight[(c, k)] = zc * dl;
            dz[c] += head.weight[(c, k)] * dl;
        }
    }
    grads.head_bias.copy_from_slice(&dlogits);

    let mut dh = Matrix::from_vec(1, dz.len(), dz)?;
    for (l, (layer, lc)) in model.conv_layers.iter().zip(&cache.layers).enumerate().rev() {
        dh = conv_backward(layer, lc, &cache.support, &dh, &mut grads.conv[l]);
    }

    let agg = &model.aggregation;
    let st = &cache.agg;
    let f = st.pre.cols();
    let d = agg.depth;
    for v in 0..st.pre.rows() {
        for c in 0..f {
            let dpre = dh[(v, f + c)] * agg.sigma.derivative(st.pre[(v, c)]);
            if dpre == 0.0 {
                continue;
            }
            grads.aggregation_bias += dpre;
            match agg.pool {
                Pool::Mean => {
                    for j in 0..d {
                        grads.aggregation_weights[j] += dpre * st.hop_means[v][(j, c)] / d as f64;
                    }
                }
                Pool::Max => {
                    let j = st.argmax[v * f + c];
                    grads.aggregation_weights[j] += dpre * st.hop_means[v][(j, c)];
                }
            }
        }
    }
    Ok(grads)
}

/// Accumulates parameter gradients of one conv layer into `g` and returns
/// the gradient with respect to its input features.
fn conv_backward(
    layer: &ConvLayer,
    lc: &LayerCache,
    support: &[(usize, usize)],
    dout: &Matrix,
    g: &mut ConvGradients,
) -> Matrix {
    let (n, width) = lc.input.shape();
    let channels = layer.channels();
    let mut dr = vec![Matrix::zeros(n, n); channels];

    for (w, sel) in lc.windows.iter().enumerate() {
        for c in 0..channels {
            let du = dout[(w, c)] * layer.phi.derivative(lc.pre[(w, c)]);
            if du == 0.0 {
                continue;
            }
            g.biases[c] += du;
            let rc = &lc.r[if lc.r.len() == 1 { 0 } else { c }];
            let kernel = &layer.kernels[c];
            for (p, &i) in sel.indices.iter().enumerate() {
                for (q, &j) in sel.indices.iter().enumerate() {
                    g.kernels[c][(p, q)] += du * rc[(i, j)];
                    dr[c][(i, j)] += du * kernel[(p, q)];
                }
            }
        }
    }

    // R_c[i][j] = Σ_a gate_ca·x_ia·x_ja / s on the (A+I) support, mirrored.
    let s = scale_of(width);
    let x = lc.normalized.as_ref().map_or(&lc.input, |(xn, _)| xn);
    let mut dx = Matrix::zeros(n, width);
    for &(i, j) in support {
        let coef = |c: usize| {
            let raw = if i == j { dr[c][(i, i)] } else { dr[c][(i, j)] + dr[c][(j, i)] };
            raw / s
        };
        match (&layer.gates, &mut g.gates) {
            (Some(gates), Some(dg)) => {
                for c in 0..channels {
                    let k = coef(c);
                    if k == 0.0 {
                        continue;
                    }
                    let gate = gates.row(c);
                    for (a, dga) in dg.row_mut(c).iter_mut().enumerate() {
                        *dga += k * x[(i, a)] * x[(j, a)];
                    }
                    for a in 0..width {
                        let (xi, xj) = (x[(i, a)], x[(j, a)]);
                        dx[(i, a)] += k * gate[a] * xj;
                        dx[(j, a)] += k * gate[a] * xi;
                    }
                }
            }
            _ => {
                let k: f64 = (0..channels).map(coef).sum();
                if k == 0.0 {
                    continue;
                }
                for a in 0..width {
                    let (xi, xj) = (x[(i, a)], x[(j, a)]);
                    dx[(i, a)] += k * xj;
                    dx[(j, a)] += k * xi;
                }
            }
        }
    }

    // n = t·x/r with r = √(|x|² + ε) and t = f'^¼:
    // dx = (t/r)·(dn − u·(u·dn)) where u = x/r.
    if let Some((xn, norms)) = &lc.normalized {
        let t = s.sqrt();
        for (i, r) in norms.iter().enumerate() {
            let u: Vec<f64> = xn.row(i).iter().map(|v| v / t).collect();
            let proj: f64 = u.iter().zip(dx.row(i)).map(|(a, b)| a * b).sum();
            for (d, a) in dx.row_mut(i).iter_mut().zip(&u) {
                *d = (*d - a * proj) * t / r;
            }
        }
    }
    dx
}
