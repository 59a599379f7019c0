use super::{Graph, GraphError};
use crate::numerics::Matrix;

/// Up to `k` ranked node indices followed by `pad` zero rows/columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoolSelection {
    pub indices: Vec<usize>,
    pub pad: usize,
}

impl PoolSelection {
    pub fn size(&self) -> usize {
        self.indices.len() + self.pad
    }
}

/// Ranks candidates by degree (descending), then key (ascending), and keeps
/// the top `k`. Duplicate candidates count once.
pub fn pool_select(g: &Graph, candidates: &[usize], k: usize) -> Result<PoolSelection, GraphError> {
    if k == 0 {
        return Err(GraphError::ZeroParameter("k"));
    }
    if let Some(&bad) = candidates.iter().find(|&&c| c >= g.len()) {
        return Err(GraphError::IndexOutOfRange {
            index: bad,
            len: g.len(),
        });
    }
    let mut ranked = candidates.to_vec();
    ranked.sort_unstable();
    ranked.dedup();
    // Index order is key order, so ties on degree fall back to the key.
    ranked.sort_by(|&a, &b| g.degree(b).cmp(&g.degree(a)).then(a.cmp(&b)));
    ranked.truncate(k);
    let pad = k - ranked.len();
    Ok(PoolSelection {
        indices: ranked,
        pad,
    })
}

/// `sel.size() × sel.size()` submatrix of `m` over the selected indices,
/// zero-padded.
pub fn restrict(m: &Matrix, sel: &PoolSelection) -> Matrix {
    let k = sel.size();
    let mut out = Matrix::zeros(k, k);
    for (p, &i) in sel.indices.iter().enumerate() {
        for (q, &j) in sel.indices.iter().enumerate() {
            out[(p, q)] = m[(i, j)];
        }
    }
    out
}

pub fn induced_adjacency(g: &Graph, sel: &PoolSelection) -> Matrix {
    restrict(g.adjacency(), sel)
}
