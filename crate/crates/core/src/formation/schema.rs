use serde::{Deserialize, Serialize};

use super::FormationError;

pub const SCHEMA_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Product,
    Part,
    Tag,
    NameToken,
    DescriptionToken,
    CommentToken,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Product => "product",
            NodeKind::Part => "part",
            NodeKind::Tag => "tag",
            NodeKind::NameToken => "name_token",
            NodeKind::DescriptionToken => "description_token",
            NodeKind::CommentToken => "comment_token",
        }
    }

    /// Prefix of node keys of this kind.
    pub(crate) fn key_prefix(self) -> &'static str {
        match self {
            NodeKind::Product => "product",
            NodeKind::Part => "part",
            NodeKind::Tag => "tag",
            NodeKind::NameToken => "name",
            NodeKind::DescriptionToken => "description",
            NodeKind::CommentToken => "comment",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeRuleKind {
    /// Links every node of the non-product side to the product node.
    AttachToProduct,
    /// Links two nodes of the given kinds whenever their values share a
    /// token. Between products (corpus-level graphs) it links records that
    /// share an attribute value.
    CoOccurrence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRule {
    pub a: NodeKind,
    pub b: NodeKind,
    pub rule: EdgeRuleKind,
}

/// Declarative description of which record attributes become nodes and how
/// they are connected.
///
/// ```text
/// {"format_version":1,
///  "node_kinds":["product","part","tag"],
///  "edge_rules":[{"a":"product","b":"part","rule":"attach_to_product"},
///                {"a":"part","b":"tag","rule":"co_occurrence"}],
///  "embed_dim":64,
///  "token_min_len":3}
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemaQuery {
    pub format_version: u32,
    pub node_kinds: Vec<NodeKind>,
    pub edge_rules: Vec<EdgeRule>,
    pub embed_dim: usize,
    pub token_min_len: usize,
}

impl Default for SchemaQuery {
    fn default() -> Self {
        use EdgeRuleKind::*;
        use NodeKind::*;
        let attach = |b| EdgeRule {
            a: Product,
            b,
            rule: AttachToProduct,
        };
        Self {
            format_version: SCHEMA_FORMAT_VERSION,
            node_kinds: vec![Product, Part, Tag, NameToken, DescriptionToken],
            edge_rules: vec![
                attach(Part),
                attach(Tag),
                attach(NameToken),
                attach(DescriptionToken),
                EdgeRule {
                    a: Part,
                    b: Tag,
                    rule: CoOccurrence,
                },
                EdgeRule {
                    a: NameToken,
                    b: DescriptionToken,
                    rule: CoOccurrence,
                },
            ],
            embed_dim: 64,
            token_min_len: 3,
        }
    }
}

impl SchemaQuery {
    /// Only the product node.
    pub fn minimal(embed_dim: usize) -> Self {
        Self {
            format_version: SCHEMA_FORMAT_VERSION,
            node_kinds: vec![NodeKind::Product],
            edge_rules: vec![],
            embed_dim,
            token_min_len: 1,
        }
    }

    pub fn includes(&self, kind: NodeKind) -> bool {
        self.node_kinds.contains(&kind)
    }

    pub fn validate(&self) -> Result<(), FormationError> {
        let bad = |field: &str, message: String| FormationError::Schema {
            field: field.to_string(),
            message,
        };
        if self.format_version != SCHEMA_FORMAT_VERSION {
            return Err(bad(
                "format_version",
                format!("unsupported version {}", self.format_version),
            ));
        }
        if !self.includes(NodeKind::Product) {
            return Err(bad("node_kinds", "must include `product`".into()));
        }
        if self.embed_dim < 2 {
            return Err(bad("embed_dim", format!("must be at least 2, got {}", self.embed_dim)));
        }
        for (i, r) in self.edge_rules.iter().enumerate() {
            for k in [r.a, r.b] {
                if !self.includes(k) {
                    return Err(bad(
                        &format!("edge_rules[{i}]"),
                        format!("kind `{}` is not listed in node_kinds", k.as_str()),
                    ));
                }
            }
            if r.rule == EdgeRuleKind::AttachToProduct
                && (r.a == NodeKind::Product) == (r.b == NodeKind::Product)
            {
                return Err(bad(
                    &format!("edge_rules[{i}]"),
                    "attach_to_product needs `product` on exactly one side".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, FormationError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let q: SchemaQuery = serde_path_to_error::deserialize(de).map_err(|e| {
            FormationError::Schema {
                field: e.path().to_string(),
                message: e.inner().to_string(),
            }
        })?;
        q.validate()?;
        Ok(q)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schema serializes")
    }
}
