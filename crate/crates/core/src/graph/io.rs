//! Subgraph file format (JSON lines, UTF-8).
//!
//! Line 1 is a header:
//!
//! ```text
//! {"format_version":1,"kind":"subgraphs","feature_dim":64}
//! ```
//!
//! Every following line is one labeled graph:
//!
//! ```text
//! {"id":"car-0001","label":"Car","nodes":[{"key":"product","kind":"product","feature":[...]}, ...],"edges":[[0,3],[1,3]]}
//! ```
//!
//! * `nodes` are in canonical order (ascending `key`).
//! * `edges` are node-index pairs `[i, j]` with `i < j`, sorted.
//! * `label` is `null` for unlabeled samples.
//! * Floats are written in shortest round-trip form, so a write/read cycle
//!   is bit-exact.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{build_graph, GraphError, LabeledGraph, Node};

pub const SUBGRAPH_FORMAT_VERSION: u32 = 1;
const KIND: &str = "subgraphs";

#[derive(Debug, Error)]
pub enum SubgraphIoError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line} (byte offset {offset}): {message}")]
    Malformed {
        line: usize,
        offset: usize,
        message: String,
    },
    #[error("line {line} (byte offset {offset}): {source}")]
    Graph {
        line: usize,
        offset: usize,
        source: GraphError,
    },
    #[error("missing header line")]
    MissingHeader,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    format_version: u32,
    kind: String,
    feature_dim: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphRecord {
    id: String,
    label: Option<String>,
    nodes: Vec<Node>,
    edges: Vec<[usize; 2]>,
}

pub fn write_subgraphs<W: Write>(mut w: W, graphs: &[LabeledGraph]) -> std::io::Result<()> {
    let header = Header {
        format_version: SUBGRAPH_FORMAT_VERSION,
        kind: KIND.into(),
        feature_dim: graphs.first().map_or(0, |g| g.graph.feature_dim()),
    };
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n")?;
    for g in graphs {
        let rec = GraphRecord {
            id: g.id.clone(),
            label: g.label.clone(),
            nodes: g.graph.nodes().to_vec(),
            edges: g.graph.edges().into_iter().map(|(i, j)| [i, j]).collect(),
        };
        serde_json::to_writer(&mut w, &rec)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn subgraphs_to_string(graphs: &[LabeledGraph]) -> String {
    let mut buf = Vec::new();
    write_subgraphs(&mut buf, graphs).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

pub fn read_subgraphs<R: Read>(mut r: R) -> Result<Vec<LabeledGraph>, SubgraphIoError> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    parse_subgraphs(&bytes)
}

pub fn parse_subgraphs(bytes: &[u8]) -> Result<Vec<LabeledGraph>, SubgraphIoError> {
    let mut lines = split_lines(bytes);
    let (line, offset, first) = lines.next().ok_or(SubgraphIoError::MissingHeader)?;
    let malformed = |line, offset, message: String| SubgraphIoError::Malformed {
        line,
        offset,
        message,
    };
    let header: Header =
        serde_json::from_slice(first).map_err(|e| malformed(line, offset, format!("header: {e}")))?;
    if header.format_version != SUBGRAPH_FORMAT_VERSION || header.kind != KIND {
        return Err(malformed(
            line,
            offset,
            format!(
                "unsupported header (kind `{}`, format_version {}); expected kind `{KIND}`, version {SUBGRAPH_FORMAT_VERSION}",
                header.kind, header.format_version
            ),
        ));
    }

    let mut out = Vec::new();
    for (line, offset, text) in lines {
        let rec: GraphRecord = serde_json::from_slice(text).map_err(|e| {
            malformed(
                line,
                offset + column_offset(text, e.column()),
                e.to_string(),
            )
        })?;
        if let Some(n) = rec.nodes.iter().find(|n| n.feature.len() != header.feature_dim) {
            return Err(malformed(
                line,
                offset,
                format!(
                    "node `{}` has feature dimension {}, header declares {}",
                    n.key,
                    n.feature.len(),
                    header.feature_dim
                ),
            ));
        }
        let edges = rec
            .edges
            .iter()
            .map(|&[i, j]| {
                let key = |x: usize| {
                    rec.nodes.get(x).map(|n| n.key.clone()).ok_or_else(|| {
                        malformed(line, offset, format!("edge [{i}, {j}] references node {x} of {}", rec.nodes.len()))
                    })
                };
                Ok((key(i)?, key(j)?))
            })
            .collect::<Result<Vec<_>, SubgraphIoError>>()?;
        let graph = build_graph(rec.nodes, &edges).map_err(|source| SubgraphIoError::Graph {
            line,
            offset,
            source,
        })?;
        out.push(LabeledGraph {
            id: rec.id,
            label: rec.label,
            graph,
        });
    }
    Ok(out)
}

/// Non-blank lines as `(1-based line number, byte offset, content)`.
fn split_lines(bytes: &[u8]) -> impl Iterator<Item = (usize, usize, &[u8])> {
    let mut offset = 0;
    bytes
        .split(|&b| b == b'\n')
        .enumerate()
        .map(move |(i, l)| {
            let start = offset;
            offset += l.len() + 1;
            (i + 1, start, l.strip_suffix(b"\r").unwrap_or(l))
        })
        .filter(|(_, _, l)| !l.iter().all(u8::is_ascii_whitespace))
}

/// serde_json reports 1-based columns in characters; our lines are single
/// lines so a byte count up to that column is close enough for diagnostics.
fn column_offset(text: &[u8], column: usize) -> usize {
    column.saturating_sub(1).min(text.len())
}
