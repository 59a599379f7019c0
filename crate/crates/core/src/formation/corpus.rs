//! Product-metadata corpus and its JSON-lines file format.
//!
//! Line 1 is a header `{"format_version":1,"labels":["Airplane",...]}`;
//! each following line is one [`ProductRecord`] with exactly the struct's
//! field names.

use std::collections::HashSet;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::FormationError;

pub const CORPUS_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductRecord {
    pub id: String,
    pub category: Option<String>,
    pub name: String,
    pub author: String,
    pub description: String,
    pub parts: Vec<String>,
    pub tags: Vec<String>,
    pub likes: u64,
    pub timestamp: String,
    pub comments: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    labels: Vec<String>,
    records: Vec<ProductRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CorpusHeader {
    format_version: u32,
    labels: Vec<String>,
}

impl Corpus {
    /// Sorts and deduplicates `labels`, then checks id uniqueness and that
    /// every category is a known label.
    pub fn new(mut labels: Vec<String>, records: Vec<ProductRecord>) -> Result<Self, FormationError> {
        labels.sort();
        labels.dedup();
        let mut seen = HashSet::with_capacity(records.len());
        for r in &records {
            if !seen.insert(r.id.as_str()) {
                return Err(FormationError::DuplicateId(r.id.clone()));
            }
            if let Some(c) = &r.category {
                if labels.binary_search(c).is_err() {
                    return Err(FormationError::UnknownCategory {
                        id: r.id.clone(),
                        category: c.clone(),
                    });
                }
            }
        }
        Ok(Self { labels, records })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn records(&self) -> &[ProductRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<ProductRecord> {
        self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn count_by_label(&self, label: &str) -> usize {
        self.records
            .iter()
            .filter(|r| r.category.as_deref() == Some(label))
            .count()
    }
}

pub fn save_corpus<W: Write>(corpus: &Corpus, mut w: W) -> std::io::Result<()> {
    let header = CorpusHeader {
        format_version: CORPUS_FORMAT_VERSION,
        labels: corpus.labels.clone(),
    };
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n")?;
    for r in &corpus.records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn load_corpus<R: Read>(mut r: R) -> Result<Corpus, FormationError> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());

    let (line, first) = lines.next().ok_or(FormationError::Malformed {
        line: 1,
        field: "format_version".into(),
        message: "missing header line".into(),
    })?;
    let header: CorpusHeader = parse_line(line, first)?;
    if header.format_version != CORPUS_FORMAT_VERSION {
        return Err(FormationError::Malformed {
            line,
            field: "format_version".into(),
            message: format!("unsupported version {}", header.format_version),
        });
    }
    let records = lines
        .map(|(line, l)| parse_line::<ProductRecord>(line, l))
        .collect::<Result<Vec<_>, _>>()?;
    Corpus::new(header.labels, records)
}

fn parse_line<T: serde::de::DeserializeOwned>(line: usize, text: &str) -> Result<T, FormationError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let message = e.inner().to_string();
        // Missing fields are reported against the enclosing object; pull the
        // name out of serde's message so the caller still sees it.
        let field = if path == "." {
            message
                .split('`')
                .nth(1)
                .map(str::to_string)
                .unwrap_or(path)
        } else {
            path
        };
        FormationError::Malformed {
            line,
            field,
            message,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: &str, cat: Option<&str>) -> ProductRecord {
        ProductRecord {
            id: id.into(),
            category: cat.map(Into::into),
            name: "spur gear".into(),
            author: "someone".into(),
            description: "a small gear".into(),
            parts: vec!["hub".into()],
            tags: vec!["gear".into()],
            likes: 3,
            timestamp: "2019-02-03T04:05:06Z".into(),
            comments: vec![],
        }
    }

    fn to_text(c: &Corpus) -> String {
        let mut buf = Vec::new();
        save_corpus(c, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn empty_corpus_round_trips() {
        let c = Corpus::new(vec!["Gear".into()], vec![]).unwrap();
        let text = to_text(&c);
        assert_eq!(text, "{\"format_version\":1,\"labels\":[\"Gear\"]}\n");
        assert_eq!(load_corpus(text.as_bytes()).unwrap(), c);
    }

    #[test]
    fn records_round_trip() {
        let c = Corpus::new(
            vec!["Wheel".into(), "Gear".into()],
            vec![rec("a", Some("Gear")), rec("b", None)],
        )
        .unwrap();
        assert_eq!(c.labels(), ["Gear", "Wheel"]);
        assert_eq!(load_corpus(to_text(&c).as_bytes()).unwrap(), c);
    }

    #[test]
    fn unknown_category_names_id() {
        let err = Corpus::new(vec!["Gear".into()], vec![rec("x7", Some("Boat"))]).unwrap_err();
        assert!(err.to_string().contains("x7"), "{err}");

        let text = "{\"format_version\":1,\"labels\":[\"Gear\"]}\n".to_string()
            + &serde_json::to_string(&rec("x8", Some("Boat"))).unwrap();
        let err = load_corpus(text.as_bytes()).unwrap_err();
        assert!(matches!(err, FormationError::UnknownCategory { ref id, .. } if id == "x8"));
    }

    #[test]
    fn duplicate_ids_rejected() {
        assert!(matches!(
            Corpus::new(vec!["Gear".into()], vec![rec("a", None), rec("a", None)]),
            Err(FormationError::DuplicateId(_))
        ));
    }

    #[test]
    fn malformed_lines_report_line_and_field() {
        let good = serde_json::to_string(&rec("a", Some("Gear"))).unwrap();
        let bad_type = good.replace("\"likes\":3", "\"likes\":\"many\"");
        let text = format!("{{\"format_version\":1,\"labels\":[\"Gear\"]}}\n{good}\n{bad_type}\n");
        match load_corpus(text.as_bytes()).unwrap_err() {
            FormationError::Malformed { line, field, .. } => {
                assert_eq!(line, 3);
                assert_eq!(field, "likes");
            }
            other => panic!("{other:?}"),
        }

        let missing = good.replace("\"author\":\"someone\",", "");
        let text = format!("{{\"format_version\":1,\"labels\":[\"Gear\"]}}\n{missing}\n");
        match load_corpus(text.as_bytes()).unwrap_err() {
            FormationError::Malformed { line, field, .. } => {
                assert_eq!(line, 2);
                assert_eq!(field, "author");
            }
            other => panic!("{other:?}"),
        }
    }
}
