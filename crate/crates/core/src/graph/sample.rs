use super::{Graph, GraphError};
use crate::numerics::Rng;

/// Nodes grouped by shortest-path distance from `center`.
/// `per_hop[j]` holds the (possibly capped) nodes at distance `j + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborhoodSample {
    pub center: usize,
    pub per_hop: Vec<Vec<usize>>,
}

impl NeighborhoodSample {
    pub fn depth(&self) -> usize {
        self.per_hop.len()
    }
}

/// Breadth-first layers around `center` up to `depth` hops, each truncated
/// to `cap` nodes.
///
/// Layers are computed on the full graph before capping, so a capped node
/// never shifts a later node to a wrong distance. Without `rng` the kept
/// nodes are the first `cap` in key order; with `rng` they are a uniform
/// draw without replacement, reported in key order.
pub fn neighborhood_sample(
    g: &Graph,
    center: usize,
    depth: usize,
    cap: usize,
    rng: Option<&mut Rng>,
) -> Result<NeighborhoodSample, GraphError> {
    if center >= g.len() {
        return Err(GraphError::IndexOutOfRange {
            index: center,
            len: g.len(),
        });
    }
    if depth == 0 {
        return Err(GraphError::ZeroParameter("depth"));
    }
    if cap == 0 {
        return Err(GraphError::ZeroParameter("cap"));
    }

    let mut visited = vec![false; g.len()];
    visited[center] = true;
    let mut frontier = vec![center];
    let mut layers = Vec::with_capacity(depth);
    for _ in 0..depth {
        let mut next = Vec::new();
        for &u in &frontier {
            for &v in g.neighbors(u) {
                if !visited[v] {
                    visited[v] = true;
                    next.push(v);
                }
            }
        }
        next.sort_unstable();
        layers.push(next.clone());
        frontier = next;
    }

    let per_hop = match rng {
        None => layers
            .into_iter()
            .map(|mut l| {
                l.truncate(cap);
                l
            })
            .collect(),
        Some(rng) => layers
            .into_iter()
            .map(|l| {
                if l.len() <= cap {
                    l
                } else {
                    let mut kept = rng.sample(&l, cap);
                    kept.sort_unstable();
                    kept
                }
            })
            .collect(),
    };
    Ok(NeighborhoodSample { center, per_hop })
}
