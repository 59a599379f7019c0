//! Similarity search over graph-level readout vectors.

use serde::{Deserialize, Serialize};

use cogtwin_core::graph::LabeledGraph;
use cogtwin_core::numerics::cosine;
use cogtwin_core::sgcnn::SgcnnModel;
use cogtwin_core::training::{predict, TrainError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryHit {
    pub id: String,
    pub similarity: f64,
    pub predicted_label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryResult {
    pub anchor: String,
    /// Most similar first; equal similarities in ascending id order.
    pub results: Vec<QueryHit>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Embedded {
    pub id: String,
    pub embedding: Vec<f64>,
    pub predicted_label: String,
}

pub fn embed_all(model: &SgcnnModel, graphs: &[LabeledGraph]) -> Result<Vec<Embedded>, TrainError> {
    graphs
        .iter()
        .map(|g| {
            let p = predict(model, &g.graph)?;
            Ok(Embedded {
                id: g.id.clone(),
                embedding: p.embedding,
                predicted_label: p.label,
            })
        })
        .collect()
}

/// Ranks every item except the anchor by cosine similarity to it. Returns
/// `None` when no item has id `anchor`.
pub fn rank(items: &[Embedded], anchor: &str, top_n: usize) -> Option<QueryResult> {
    let a = items.iter().find(|e| e.id == anchor)?;
    let mut hits: Vec<QueryHit> = items
        .iter()
        .filter(|e| e.id != anchor)
        .map(|e| QueryHit {
            id: e.id.clone(),
            // `+ 0.0` folds -0.0 into 0.0 so `total_cmp` ties match `==`.
            similarity: cosine(&a.embedding, &e.embedding) + 0.0,
            predicted_label: e.predicted_label.clone(),
        })
        .collect();
    hits.sort_by(|x, y| y.similarity.total_cmp(&x.similarity).then_with(|| x.id.cmp(&y.id)));
    hits.truncate(top_n);
    Some(QueryResult {
        anchor: anchor.to_string(),
        results: hits,
    })
}
