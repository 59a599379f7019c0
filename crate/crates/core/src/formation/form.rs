use std::collections::{BTreeMap, BTreeSet};

use super::{
    tokenize, EdgeRuleKind, FormationError, HashEmbedder, NodeKind, ProductRecord, SchemaQuery,
    TextEmbedder,
};
use crate::graph::{build_graph, LabeledGraph, Node};

/// One prospective node before graph construction.
struct Draft {
    key: String,
    kind: NodeKind,
    text: String,
    tokens: BTreeSet<String>,
}

/// Turns one product record into a labeled subgraph under `q`, using the
/// schema's hash embedder.
pub fn form_subgraph(rec: &ProductRecord, q: &SchemaQuery) -> Result<LabeledGraph, FormationError> {
    form_subgraph_with(rec, q, &HashEmbedder::new(q.embed_dim.max(2)))
}

/// [`form_subgraph`] with a caller-supplied embedder.
pub fn form_subgraph_with<E: TextEmbedder>(
    rec: &ProductRecord,
    q: &SchemaQuery,
    embedder: &E,
) -> Result<LabeledGraph, FormationError> {
    q.validate()?;
    let drafts = drafts(rec, q);
    if drafts.is_empty() {
        return Err(FormationError::EmptyGraph(rec.id.clone()));
    }

    let mut edges = BTreeSet::new();
    for rule in &q.edge_rules {
        match rule.rule {
            EdgeRuleKind::AttachToProduct => {
                let other = if rule.a == NodeKind::Product { rule.b } else { rule.a };
                for d in drafts.iter().filter(|d| d.kind == other) {
                    edges.insert(ordered(&d.key, "product"));
                }
            }
            EdgeRuleKind::CoOccurrence => {
                for x in drafts.iter().filter(|d| d.kind == rule.a) {
                    for y in drafts.iter().filter(|d| d.kind == rule.b) {
                        if x.key != y.key && !x.tokens.is_disjoint(&y.tokens) {
                            edges.insert(ordered(&x.key, &y.key));
                        }
                    }
                }
            }
        }
    }

    let nodes = drafts
        .into_iter()
        .map(|d| Node::new(d.key, d.kind.as_str(), embedder.embed(&d.text)))
        .collect();
    let edges: Vec<(String, String)> = edges.into_iter().collect();
    let graph = build_graph(nodes, &edges)?;
    Ok(LabeledGraph {
        id: rec.id.clone(),
        label: rec.category.clone(),
        graph,
    })
}

/// Forms every record in order.
pub fn form_all(records: &[ProductRecord], q: &SchemaQuery) -> Result<Vec<LabeledGraph>, FormationError> {
    records.iter().map(|r| form_subgraph(r, q)).collect()
}

/// Corpus-level graph with one node per product (key `product:<id>`).
///
/// A `co_occurrence` rule between `product` and `product` links two records
/// that share a value of any attribute kind listed in the schema (part or
/// tag text, or a name/description/comment token). Other rules are ignored.
pub fn form_product_graph(
    records: &[ProductRecord],
    q: &SchemaQuery,
) -> Result<crate::graph::Graph, FormationError> {
    q.validate()?;
    let embedder = HashEmbedder::new(q.embed_dim);
    let linked = q.edge_rules.iter().any(|r| {
        r.rule == EdgeRuleKind::CoOccurrence && r.a == NodeKind::Product && r.b == NodeKind::Product
    });

    let keys: Vec<String> = records.iter().map(|r| format!("product:{}", r.id)).collect();
    let values: Vec<BTreeSet<String>> = records
        .iter()
        .map(|r| {
            drafts(r, q)
                .into_iter()
                .filter(|d| d.kind != NodeKind::Product)
                .map(|d| d.key)
                .collect()
        })
        .collect();

    let mut edges = Vec::new();
    if linked {
        for i in 0..records.len() {
            for j in i + 1..records.len() {
                if !values[i].is_disjoint(&values[j]) {
                    edges.push((keys[i].clone(), keys[j].clone()));
                }
            }
        }
    }
    let nodes = records
        .iter()
        .zip(&keys)
        .map(|(r, k)| Node::new(k.clone(), "product", embedder.embed(&product_text(r))))
        .collect();
    Ok(build_graph(nodes, &edges)?)
}

fn ordered(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

fn product_text(rec: &ProductRecord) -> String {
    format!("{} {}", rec.name, rec.description)
}

/// Distinct nodes selected by the schema, keyed `<prefix>:<normalized value>`
/// (the product node is keyed `product`).
fn drafts(rec: &ProductRecord, q: &SchemaQuery) -> Vec<Draft> {
    let mut out: BTreeMap<String, Draft> = BTreeMap::new();
    let mut add = |kind: NodeKind, value: &str| {
        let tokens = tokenize(value);
        if tokens.is_empty() {
            return;
        }
        let normalized = tokens.join(" ");
        let key = format!("{}:{normalized}", kind.key_prefix());
        out.entry(key.clone()).or_insert_with(|| Draft {
            key,
            kind,
            text: normalized,
            tokens: tokens.into_iter().collect(),
        });
    };

    for &kind in &q.node_kinds {
        match kind {
            NodeKind::Product => {}
            NodeKind::Part => rec.parts.iter().for_each(|p| add(kind, p)),
            NodeKind::Tag => rec.tags.iter().for_each(|t| add(kind, t)),
            NodeKind::NameToken | NodeKind::DescriptionToken | NodeKind::CommentToken => {
                let texts: Vec<&str> = match kind {
                    NodeKind::NameToken => vec![&rec.name],
                    NodeKind::DescriptionToken => vec![&rec.description],
                    _ => rec.comments.iter().map(String::as_str).collect(),
                };
                for text in texts {
                    for t in tokenize(text) {
                        if t.chars().count() >= q.token_min_len {
                            add(kind, &t);
                        }
                    }
                }
            }
        }
    }

    let text = product_text(rec);
    let product = Draft {
        key: "product".into(),
        kind: NodeKind::Product,
        tokens: tokenize(&text).into_iter().collect(),
        text,
    };
    let mut drafts: Vec<Draft> = out.into_values().collect();
    if q.includes(NodeKind::Product) {
        drafts.push(product);
    }
    drafts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formation::{synth_corpus, EdgeRule};
    use crate::numerics::Rng;

    fn rec(id: &str, parts: &[&str], tags: &[&str]) -> ProductRecord {
        ProductRecord {
            id: id.into(),
            category: Some("Gear".into()),
            name: "Spur gear".into(),
            author: "a".into(),
            description: "A printable spur gear with 20 teeth".into(),
            parts: parts.iter().map(|s| s.to_string()).collect(),
            tags: tags.iter().map(|s| s.to_string()).collect(),
            likes: 0,
            timestamp: "2020-01-01T00:00:00Z".into(),
            comments: vec!["nice teeth".into()],
        }
    }

    fn schema(kinds: &[NodeKind], rules: &[(NodeKind, NodeKind, EdgeRuleKind)]) -> SchemaQuery {
        SchemaQuery {
            node_kinds: kinds.to_vec(),
            edge_rules: rules
                .iter()
                .map(|&(a, b, rule)| EdgeRule { a, b, rule })
                .collect(),
            ..SchemaQuery::minimal(16)
        }
    }

    #[test]
    fn minimal_schema_gives_single_node() {
        let g = form_subgraph(&rec("r", &[], &[]), &SchemaQuery::minimal(8)).unwrap();
        assert_eq!(g.graph.len(), 1);
        assert_eq!(g.label.as_deref(), Some("Gear"));
        assert_eq!(g.graph.node(0).key, "product");
    }

    #[test]
    fn parts_attach_as_star() {
        use NodeKind::*;
        let q = schema(&[Product, Part], &[(Product, Part, EdgeRuleKind::AttachToProduct)]);
        let g = form_subgraph(&rec("r", &["p1", "p2"], &["x"]), &q).unwrap().graph;
        assert_eq!(g.len(), 3);
        let hub = g.index_of("product").unwrap();
        assert_eq!(g.degree(hub), 2);
        assert_eq!(g.edges().len(), 2);
    }

    #[test]
    fn co_occurrence_links_shared_tokens() {
        use NodeKind::*;
        let q = schema(&[Product, Part, Tag], &[(Part, Tag, EdgeRuleKind::CoOccurrence)]);
        let g = form_subgraph(&rec("r", &["spur gear", "axle"], &["gear", "metal"]), &q)
            .unwrap()
            .graph;
        let e: Vec<(String, String)> = g
            .edges()
            .into_iter()
            .map(|(i, j)| (g.node(i).key.clone(), g.node(j).key.clone()))
            .collect();
        assert_eq!(e, [("part:spur gear".to_string(), "tag:gear".to_string())]);
    }

    #[test]
    fn token_kinds_respect_min_len() {
        use NodeKind::*;
        let mut q = schema(&[Product, DescriptionToken, CommentToken], &[]);
        q.token_min_len = 4;
        let g = form_subgraph(&rec("r", &[], &[]), &q).unwrap().graph;
        let keys: Vec<&str> = g.nodes().iter().map(|n| n.key.as_str()).collect();
        assert_eq!(
            keys,
            [
                "comment:nice",
                "comment:teeth",
                "description:gear",
                "description:printable",
                "description:spur",
                "description:teeth",
                "description:with",
                "product"
            ]
        );
    }

    #[test]
    fn deterministic_and_monotone_in_kinds() {
        use NodeKind::*;
        let corpus = synth_corpus(8, &[("Car".into(), 20), ("Wheel".into(), 20)], 0.8).unwrap();
        let all = [Product, Part, Tag, NameToken, DescriptionToken, CommentToken];
        let mut rng = Rng::new(2);
        for r in corpus.records() {
            let q = SchemaQuery::default();
            assert_eq!(form_subgraph(r, &q).unwrap(), form_subgraph(r, &q).unwrap());

            let mut kinds = vec![Product];
            let mut prev = form_subgraph(r, &schema(&kinds, &[])).unwrap().graph;
            let mut rest = all[1..].to_vec();
            rng.shuffle(&mut rest);
            for k in rest {
                kinds.push(k);
                let next = form_subgraph(r, &schema(&kinds, &[])).unwrap().graph;
                for n in prev.nodes() {
                    assert!(next.index_of(&n.key).is_some(), "{} dropped", n.key);
                }
                prev = next;
            }
        }
    }

    #[test]
    fn product_graph_over_shared_tags() {
        use NodeKind::*;
        // Six products A..F; tags chosen so the shared-tag graph has edges
        // A-B, A-C, B-C, B-E, C-D, D-E, E-F.
        let tags: [&[&str]; 6] = [
            &["t1", "t2"],
            &["t1", "t3", "t4"],
            &["t2", "t3", "t5"],
            &["t5", "t6"],
            &["t4", "t6", "t7"],
            &["t7"],
        ];
        let records: Vec<ProductRecord> = tags
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let id = ((b'A' + i as u8) as char).to_string();
                rec(&id, &[], t)
            })
            .collect();
        let q = schema(&[Product, Tag], &[(Product, Product, EdgeRuleKind::CoOccurrence)]);
        let g = form_product_graph(&records, &q).unwrap();

        // Pairwise shared-tag oracle.
        let mut expected = Vec::new();
        for i in 0..6 {
            for j in i + 1..6 {
                if tags[i].iter().any(|t| tags[j].contains(t)) {
                    expected.push((i, j));
                }
            }
        }
        assert_eq!(g.edges(), expected);
        assert_eq!(
            expected,
            [(0, 1), (0, 2), (1, 2), (1, 4), (2, 3), (3, 4), (4, 5)]
        );
        let e = g.index_of("product:E").unwrap();
        assert_eq!(g.degree(e), 3);
    }
}
