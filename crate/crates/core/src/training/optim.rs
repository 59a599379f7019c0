use super::OptimizerConfig;
use crate::sgcnn::{Gradients, ParamTensors, SgcnnModel};

/// Optimizer state over the model's flat parameter vector.
#[derive(Debug, Clone)]
pub struct Optimizer {
    config: OptimizerConfig,
    step: u64,
    first: Vec<f64>,
    second: Vec<f64>,
}

impl Optimizer {
    pub fn new(config: OptimizerConfig, param_count: usize) -> Self {
        let second = match config {
            OptimizerConfig::Adam { .. } => vec![0.0; param_count],
            OptimizerConfig::Sgd { .. } => Vec::new(),
        };
        Self {
            config,
            step: 0,
            first: vec![0.0; param_count],
            second,
        }
    }

    pub fn steps(&self) -> u64 {
        self.step
    }

    /// Applies one update with `grads` (already averaged over the batch).
    pub fn step(&mut self, model: &mut SgcnnModel, grads: &Gradients) {
        self.step += 1;
        let t = self.step as i32;
        let mut offset = 0;
        for (params, g) in model.tensors_mut().into_iter().zip(grads.tensors()) {
            let m = &mut self.first[offset..offset + params.len()];
            match self.config {
                OptimizerConfig::Sgd { lr, momentum } => {
                    for ((p, gi), vi) in params.iter_mut().zip(g).zip(m.iter_mut()) {
                        *vi = momentum * *vi + gi;
                        *p -= lr * *vi;
                    }
                }
                OptimizerConfig::Adam {
                    lr,
                    beta1,
                    beta2,
                    eps,
                } => {
                    let v = &mut self.second[offset..offset + params.len()];
                    let c1 = 1.0 - beta1.powi(t);
                    let c2 = 1.0 - beta2.powi(t);
                    for (((p, gi), mi), vi) in params.iter_mut().zip(g).zip(m.iter_mut()).zip(v.iter_mut()) {
                        *mi = beta1 * *mi + (1.0 - beta1) * gi;
                        *vi = beta2 * *vi + (1.0 - beta2) * gi * gi;
                        *p -= lr * (*mi / c1) / ((*vi / c2).sqrt() + eps);
                    }
                }
            }
            offset += params.len();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sgcnn::ModelConfig;

    fn model() -> SgcnnModel {
        let config = ModelConfig {
            embed_dim: 3,
            ..ModelConfig::default()
        };
        SgcnnModel::init(&config, &["a".into(), "b".into()], 1).unwrap()
    }

    #[test]
    fn zero_gradient_sgd_is_exact_no_op() {
        let mut m = model();
        let before = m.clone();
        let zeros = Gradients::zeros_like(&m);
        let mut opt = Optimizer::new(OptimizerConfig::Sgd { lr: 0.5, momentum: 0.9 }, m.param_count());
        for _ in 0..5 {
            opt.step(&mut m, &zeros);
        }
        assert_eq!(m, before);

        let mut opt = Optimizer::new(OptimizerConfig::default(), m.param_count());
        opt.step(&mut m, &zeros);
        assert_eq!(m, before);
    }

    #[test]
    fn sgd_moves_against_gradient() {
        let mut m = model();
        let mut g = Gradients::zeros_like(&m);
        g.head_bias[0] = 2.0;
        let b0 = m.head.bias[0];
        let mut opt = Optimizer::new(OptimizerConfig::Sgd { lr: 0.1, momentum: 0.0 }, m.param_count());
        opt.step(&mut m, &g);
        assert_eq!(m.head.bias[0], b0 - 0.2);
    }

    #[test]
    fn adam_first_step_is_lr_times_sign() {
        let mut m = model();
        let mut g = Gradients::zeros_like(&m);
        g.head_bias[1] = -3.0;
        let b1 = m.head.bias[1];
        let config = OptimizerConfig::default();
        let mut opt = Optimizer::new(config, m.param_count());
        opt.step(&mut m, &g);
        assert!((m.head.bias[1] - (b1 + config.lr())).abs() < 1e-10);
    }
}
