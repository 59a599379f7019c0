//! Undirected property graphs with canonical (key-sorted) node order,
//! neighborhood sampling, and the degree-ranked pooling used by the
//! convolution layers.

pub mod io;
mod pool;
mod sample;

pub use pool::{induced_adjacency, pool_select, restrict, PoolSelection};
pub use sample::{neighborhood_sample, NeighborhoodSample};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::Matrix;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("duplicate node key `{0}`")]
    DuplicateKey(String),
    #[error("edge ({0}, {1}) references unknown node `{2}`")]
    UnknownEndpoint(String, String, String),
    #[error("self-edge on node `{0}`")]
    SelfEdge(String),
    #[error("node `{key}` has feature dimension {found}, expected {expected}")]
    FeatureDim {
        key: String,
        expected: usize,
        found: usize,
    },
    #[error("node index {index} out of range for graph with {len} nodes")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("{0} must be at least 1")]
    ZeroParameter(&'static str),
    #[error("feature matrix is {rows}x{cols}, graph has {nodes} nodes")]
    FeatureShape {
        rows: usize,
        cols: usize,
        nodes: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub key: String,
    pub kind: String,
    pub feature: Vec<f64>,
}

impl Node {
    pub fn new(key: impl Into<String>, kind: impl Into<String>, feature: Vec<f64>) -> Self {
        Self {
            key: key.into(),
            kind: kind.into(),
            feature,
        }
    }
}

/// Undirected, unweighted graph. Nodes are stored sorted by key, so two
/// graphs built from the same node and edge sets are identical no matter
/// the insertion order.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    nodes: Vec<Node>,
    adjacency: Matrix,
    neighbors: Vec<Vec<usize>>,
    feature_dim: usize,
}

/// Builds a canonical graph from `(key, kind, feature)` nodes and key-pair
/// edges. Repeated edges collapse to one.
pub fn build_graph<E: AsRef<str>>(
    mut nodes: Vec<Node>,
    edges: &[(E, E)],
) -> Result<Graph, GraphError> {
    nodes.sort_by(|a, b| a.key.cmp(&b.key));
    for w in nodes.windows(2) {
        if w[0].key == w[1].key {
            return Err(GraphError::DuplicateKey(w[0].key.clone()));
        }
    }
    let feature_dim = nodes.first().map_or(0, |n| n.feature.len());
    if let Some(bad) = nodes.iter().find(|n| n.feature.len() != feature_dim) {
        return Err(GraphError::FeatureDim {
            key: bad.key.clone(),
            expected: feature_dim,
            found: bad.feature.len(),
        });
    }
    let index: BTreeMap<&str, usize> = nodes
        .iter()
        .enumerate()
        .map(|(i, n)| (n.key.as_str(), i))
        .collect();
    let mut pairs = Vec::with_capacity(edges.len());
    for (a, b) in edges {
        let (a, b) = (a.as_ref(), b.as_ref());
        if a == b {
            return Err(GraphError::SelfEdge(a.to_string()));
        }
        let lookup = |k: &str| {
            index
                .get(k)
                .copied()
                .ok_or_else(|| GraphError::UnknownEndpoint(a.into(), b.into(), k.into()))
        };
        pairs.push((lookup(a)?, lookup(b)?));
    }
    drop(index);
    Ok(Graph::from_index_edges(nodes, feature_dim, &pairs))
}

impl Graph {
    /// Nodes must already be in canonical order; used internally where
    /// that is guaranteed.
    fn from_index_edges(nodes: Vec<Node>, feature_dim: usize, edges: &[(usize, usize)]) -> Self {
        let n = nodes.len();
        let mut adjacency = Matrix::zeros(n, n);
        for &(i, j) in edges {
            adjacency[(i, j)] = 1.0;
            adjacency[(j, i)] = 1.0;
        }
        let neighbors = (0..n)
            .map(|i| (0..n).filter(|&j| adjacency[(i, j)] != 0.0).collect())
            .collect();
        Self {
            nodes,
            adjacency,
            neighbors,
            feature_dim,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn adjacency(&self) -> &Matrix {
        &self.adjacency
    }

    /// Neighbor indices of `i`, ascending (hence key order).
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn index_of(&self, key: &str) -> Option<usize> {
        self.nodes
            .binary_search_by(|n| n.key.as_str().cmp(key))
            .ok()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[(i, j)] != 0.0
    }

    /// Undirected edges as `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .flat_map(|i| {
                self.neighbors[i]
                    .iter()
                    .filter(move |&&j| j > i)
                    .map(move |&j| (i, j))
            })
            .collect()
    }

    /// Node features stacked row-wise (`n × f`).
    pub fn features(&self) -> Matrix {
        let mut m = Matrix::zeros(self.len(), self.feature_dim);
        for (i, n) in self.nodes.iter().enumerate() {
            m.row_mut(i).copy_from_slice(&n.feature);
        }
        m
    }

    /// Same nodes and adjacency with every feature vector replaced.
    pub fn with_features(&self, features: &Matrix) -> Result<Graph, GraphError> {
        if features.rows() != self.len() {
            return Err(GraphError::FeatureShape {
                rows: features.rows(),
                cols: features.cols(),
                nodes: self.len(),
            });
        }
        let nodes = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| Node {
                key: n.key.clone(),
                kind: n.kind.clone(),
                feature: features.row(i).to_vec(),
            })
            .collect();
        Ok(Graph {
            nodes,
            adjacency: self.adjacency.clone(),
            neighbors: self.neighbors.clone(),
            feature_dim: features.cols(),
        })
    }
}

/// A graph carrying a sample id and optional class label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledGraph {
    pub id: String,
    pub label: Option<String>,
    pub graph: Graph,
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::numerics::Rng;

    fn node(k: &str) -> Node {
        Node::new(k, "t", vec![1.0, 0.0])
    }

    #[test]
    fn singleton() {
        let g = build_graph::<&str>(vec![node("a")], &[]).unwrap();
        assert_eq!(g.adjacency(), &Matrix::zeros(1, 1));
    }

    #[test]
    fn edge_direction_is_irrelevant() {
        let g1 = build_graph(vec![node("a"), node("b")], &[("a", "b")]).unwrap();
        let g2 = build_graph(vec![node("b"), node("a")], &[("b", "a")]).unwrap();
        assert_eq!(g1, g2);
        assert!(g1.adjacency().is_symmetric());
        assert_eq!(g1.node(0).key, "a");
    }

    #[test]
    fn six_node_degrees() {
        let g = six_node();
        let e = g.index_of("E").unwrap();
        assert_eq!(g.degree(e), 3);
        let keys: Vec<&str> = g.neighbors(e).iter().map(|&i| g.node(i).key.as_str()).collect();
        assert_eq!(keys, ["B", "D", "F"]);
    }

    #[test]
    fn errors_name_offending_keys() {
        let dup = build_graph::<&str>(vec![node("a"), node("a")], &[]).unwrap_err();
        assert_eq!(dup, GraphError::DuplicateKey("a".into()));

        let unknown = build_graph(vec![node("a")], &[("a", "zz")]).unwrap_err();
        assert!(unknown.to_string().contains("zz"));

        let selfie = build_graph(vec![node("a")], &[("a", "a")]).unwrap_err();
        assert_eq!(selfie, GraphError::SelfEdge("a".into()));

        let dim = build_graph::<&str>(vec![node("a"), Node::new("b", "t", vec![1.0])], &[])
            .unwrap_err();
        assert!(matches!(dim, GraphError::FeatureDim { .. }));
    }

    #[test]
    fn insertion_order_is_irrelevant() {
        let mut rng = Rng::new(9);
        for _ in 0..20 {
            let g = random_graph(&mut rng, 8, 0.4, 3);
            let mut nodes = g.nodes().to_vec();
            rng.shuffle(&mut nodes);
            let mut edges: Vec<(String, String)> = g
                .edges()
                .into_iter()
                .map(|(i, j)| {
                    let (a, b) = (g.node(i).key.clone(), g.node(j).key.clone());
                    if rng.bernoulli(0.5) {
                        (a, b)
                    } else {
                        (b, a)
                    }
                })
                .collect();
            rng.shuffle(&mut edges);
            let h = build_graph(nodes, &edges).unwrap();
            assert_eq!(g, h);
            let all: Vec<usize> = (0..g.len()).collect();
            assert_eq!(pool_select(&g, &all, 4).unwrap(), pool_select(&h, &all, 4).unwrap());
        }
    }

    #[test]
    fn with_features_keeps_structure() {
        let g = six_node();
        let h = g.with_features(&Matrix::filled(6, 2, 0.5)).unwrap();
        assert_eq!(h.feature_dim(), 2);
        assert_eq!(h.adjacency(), g.adjacency());
        assert!(g.with_features(&Matrix::zeros(5, 2)).is_err());
    }
}
