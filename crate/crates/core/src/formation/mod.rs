//! Graph formation: product-metadata corpora, schema queries, text
//! embedding, and one labeled subgraph per product record.

mod corpus;
mod embed;
mod form;
mod schema;
mod synth;

pub use corpus::{load_corpus, save_corpus, Corpus, ProductRecord, CORPUS_FORMAT_VERSION};
pub use embed::{fnv1a64, hash_embed, tokenize, HashEmbedder, TextEmbedder};
pub use form::{form_all, form_product_graph, form_subgraph, form_subgraph_with};
pub use schema::{EdgeRule, EdgeRuleKind, NodeKind, SchemaQuery, SCHEMA_FORMAT_VERSION};
pub use synth::{
    default_counts, planted_vocabulary, synth_corpus, CATEGORIES, CONFUSABLE, DEFAULT_COUNTS,
};

use thiserror::Error;

use crate::graph::GraphError;

#[derive(Debug, Error)]
pub enum FormationError {
    #[error("schema field `{field}`: {message}")]
    Schema { field: String, message: String },
    #[error("line {line}, field `{field}`: {message}")]
    Malformed {
        line: usize,
        field: String,
        message: String,
    },
    #[error("record `{id}` has unknown category `{category}`")]
    UnknownCategory { id: String, category: String },
    #[error("duplicate record id `{0}`")]
    DuplicateId(String),
    #[error("record `{0}` produced no nodes")]
    EmptyGraph(String),
    #[error("synthetic corpus: {0}")]
    Synth(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
