//! The annotated assay corpus: JSON Lines parsing, validation, profiling, and
//! ingestion into the graph.
//!
//! One record per line:
//!
//! ```text
//! {"id": "AID1", "title": "...", "text": "...", "assay_type": "...", "assay_format": "...",
//!  "statements": [{"property": "has assay format", "value": "cell-based format",
//!                  "property_uri": "http://...", "value_uri": "http://..."}]}
//! ```
//!
//! Malformed lines become warnings tagged with their line number; they never
//! abort the parse. Unknown assay types and formats are reported but kept.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::graph::{normalize_label, Graph, GraphError, NodeId, Object};
use crate::uri::is_absolute_uri;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("unreadable corpus source: {0}")]
    UnreadableSource(#[from] io::Error),
    #[error("vocabulary has no entries")]
    EmptyVocabulary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedStatement {
    pub property: String,
    pub value: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub property_uri: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_uri: Option<String>,
}

impl AnnotatedStatement {
    pub fn new(property: impl Into<String>, value: impl Into<String>) -> Self {
        AnnotatedStatement {
            property: property.into(),
            value: value.into(),
            property_uri: None,
            value_uri: None,
        }
    }

    /// Normalized `(property, value)` pair used for deduplication.
    pub fn key(&self) -> (String, String) {
        (normalize_label(&self.property), normalize_label(&self.value))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedAssay {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    pub text: String,
    pub statements: Vec<AnnotatedStatement>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assay_type: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assay_format: Option<String>,
}

impl AnnotatedAssay {
    /// Distinct normalized `(property, value)` pairs in file order.
    pub fn statement_keys(&self) -> Vec<(String, String)> {
        let mut seen = HashSet::new();
        self.statements
            .iter()
            .map(AnnotatedStatement::key)
            .filter(|k| seen.insert(k.clone()))
            .collect()
    }
}

/// A closed-but-advisory set of normalized labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    entries: BTreeSet<String>,
}

/// Bioassay types observed in the expert-annotated BAO corpus.
///
/// "beta lactamase reporter gene" is listed twice in the source table, so
/// the 42 listed rows collapse to 41 distinct entries.
pub const BIOASSAY_TYPES: &[&str] = &[
    "protein-protein interaction",
    "hydrolase activity",
    "kinase activity",
    "protein-small molecule interaction",
    "viability",
    "beta lactamase reporter gene",
    "cytochrome P450 enzyme activity",
    "luciferase enzyme activity",
    "luciferase reporter gene",
    "oxidoreductase activity",
    "protein unfolding",
    "chaperone activity",
    "lyase activity",
    "transporter",
    "plasma membrane potential",
    "dye redistribution",
    "calcium redistribution",
    "apoptosis",
    "beta lactamase reporter gene",
    "beta galactosidase reporter gene",
    "phosphatase activity",
    "cAMP redistribution",
    "IP1 redistribution",
    "cell morphology",
    "phosphorylation",
    "transferase activity",
    "isomerase activity",
    "protein redistribution",
    "radioligand binding",
    "signal transduction",
    "ion channel",
    "platelet activation",
    "fluorescent protein reporter gene",
    "protein-DNA interaction",
    "protease activity",
    "cell permeability",
    "protein stability",
    "protein-turnover",
    "localization",
    "organism behavior",
    "cytotoxicity",
    "cell growth",
];

/// Seed list of BAO assay formats.
pub const ASSAY_FORMATS: &[&str] = &[
    "biochemical format",
    "cell-based format",
    "cell-free format",
    "organism-based format",
    "tissue-based format",
    "physicochemical format",
    "subcellular format",
    "single protein format",
    "protein complex format",
    "nucleic acid format",
    "small-molecule format",
];

impl Vocabulary {
    pub fn new<I, S>(entries: I) -> Result<Self, CorpusError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let entries: BTreeSet<String> = entries
            .into_iter()
            .map(|e| normalize_label(e.as_ref()))
            .filter(|e| !e.is_empty())
            .collect();
        if entries.is_empty() {
            return Err(CorpusError::EmptyVocabulary);
        }
        Ok(Vocabulary { entries })
    }

    pub fn assay_types() -> Self {
        Self::new(BIOASSAY_TYPES).expect("seed list is nonempty")
    }

    pub fn assay_formats() -> Self {
        Self::new(ASSAY_FORMATS).expect("seed list is nonempty")
    }

    pub fn contains(&self, label: &str) -> bool {
        self.entries.contains(&normalize_label(label))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(String::as_str)
    }
}

#[derive(Debug, Clone)]
pub struct CorpusSchema {
    pub types: Vocabulary,
    pub formats: Vocabulary,
}

impl Default for CorpusSchema {
    fn default() -> Self {
        CorpusSchema {
            types: Vocabulary::assay_types(),
            formats: Vocabulary::assay_formats(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineWarning {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParsedCorpus {
    pub assays: Vec<AnnotatedAssay>,
    pub warnings: Vec<LineWarning>,
}

const RECORD_KEYS: &[&str] = &["id", "title", "text", "statements", "assay_type", "assay_format"];
const STATEMENT_KEYS: &[&str] = &["property", "value", "property_uri", "value_uri"];

/// Parses a JSON Lines corpus with the default vocabularies.
pub fn parse_corpus<R: BufRead>(source: R) -> Result<ParsedCorpus, CorpusError> {
    parse_corpus_with(source, &CorpusSchema::default())
}

pub fn parse_corpus_with<R: BufRead>(mut source: R, schema: &CorpusSchema) -> Result<ParsedCorpus, CorpusError> {
    let mut parsed = ParsedCorpus::default();
    let mut ids = HashSet::new();
    let mut buf = Vec::new();
    let mut line_no = 0;
    loop {
        buf.clear();
        if source.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        line_no += 1;
        let mut warn = |message: String| parsed.warnings.push(LineWarning { line: line_no, message });
        let Ok(line) = std::str::from_utf8(&buf) else {
            warn("line is not valid UTF-8".into());
            continue;
        };
        if line.trim().is_empty() {
            continue;
        }
        match parse_record(line, schema, &mut warn) {
            Some(assay) if !ids.insert(assay.id.clone()) => {
                warn(format!("duplicate assay id {:?}; record skipped", assay.id));
            }
            Some(assay) => parsed.assays.push(assay),
            None => {}
        }
    }
    Ok(parsed)
}

fn parse_record(line: &str, schema: &CorpusSchema, warn: &mut impl FnMut(String)) -> Option<AnnotatedAssay> {
    let value: Value = match serde_json::from_str(line) {
        Ok(v) => v,
        Err(e) => {
            warn(format!("invalid JSON: {e}"));
            return None;
        }
    };
    let Value::Object(record) = value else {
        warn("record is not a JSON object".into());
        return None;
    };
    for key in record.keys().filter(|k| !RECORD_KEYS.contains(&k.as_str())) {
        warn(format!("unknown key {key:?} ignored"));
    }

    let id = match record.get("id") {
        Some(Value::String(s)) if !s.trim().is_empty() => s.trim().to_string(),
        Some(Value::Number(n)) => n.to_string(),
        _ => {
            warn("missing or empty \"id\"".into());
            return None;
        }
    };
    let text = match record.get("text") {
        Some(Value::String(s)) if !s.trim().is_empty() => s.clone(),
        Some(Value::String(_)) => {
            warn(format!("assay {id}: empty \"text\"; record skipped"));
            return None;
        }
        _ => {
            warn(format!("assay {id}: missing \"text\"; record skipped"));
            return None;
        }
    };
    let Some(Value::Array(raw_statements)) = record.get("statements") else {
        warn(format!("assay {id}: missing \"statements\" array; record skipped"));
        return None;
    };

    let mut seen = HashSet::new();
    let mut statements = Vec::with_capacity(raw_statements.len());
    for (i, raw) in raw_statements.iter().enumerate() {
        let Some(st) = parse_statement(raw, &id, i, warn) else {
            continue;
        };
        if seen.insert(st.key()) {
            statements.push(st);
        } else {
            warn(format!(
                "assay {id}: duplicate statement ({:?}, {:?}) collapsed",
                st.property, st.value
            ));
        }
    }

    let title = optional_string(&record, "title", &id, warn);
    let assay_type = optional_string(&record, "assay_type", &id, warn);
    let assay_format = optional_string(&record, "assay_format", &id, warn);
    if let Some(t) = &assay_type {
        if !schema.types.contains(t) {
            warn(format!("assay {id}: assay type {t:?} is not in the type vocabulary"));
        }
    }
    if let Some(f) = &assay_format {
        if !schema.formats.contains(f) {
            warn(format!("assay {id}: assay format {f:?} is not in the format vocabulary"));
        }
    }

    Some(AnnotatedAssay {
        id,
        title,
        text,
        statements,
        assay_type,
        assay_format,
    })
}

fn optional_string(record: &Map<String, Value>, key: &str, id: &str, warn: &mut impl FnMut(String)) -> Option<String> {
    match record.get(key) {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) if s.trim().is_empty() => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => {
            warn(format!("assay {id}: {key:?} is not a string; ignored"));
            None
        }
    }
}

fn parse_statement(raw: &Value, id: &str, index: usize, warn: &mut impl FnMut(String)) -> Option<AnnotatedStatement> {
    let Value::Object(obj) = raw else {
        warn(format!("assay {id}: statement {index} is not an object; dropped"));
        return None;
    };
    for key in obj.keys().filter(|k| !STATEMENT_KEYS.contains(&k.as_str())) {
        warn(format!("assay {id}: statement {index}: unknown key {key:?} ignored"));
    }
    let field = |name: &str| match obj.get(name) {
        Some(Value::String(s)) if !s.trim().is_empty() => Some(s.clone()),
        _ => None,
    };
    let (Some(property), Some(value)) = (field("property"), field("value")) else {
        warn(format!("assay {id}: statement {index} lacks a nonempty property or value; dropped"));
        return None;
    };
    let mut uri = |name: &str| {
        let u = field(name)?;
        if is_absolute_uri(&u) {
            Some(u)
        } else {
            warn(format!("assay {id}: statement {index}: {name} {u:?} is not an absolute URI; ignored"));
            None
        }
    };
    Some(AnnotatedStatement {
        property_uri: uri("property_uri"),
        value_uri: uri("value_uri"),
        property,
        value,
    })
}

/// Writes assays as JSON Lines; [`parse_corpus`] reads them back unchanged.
pub fn write_corpus<W: Write>(assays: &[AnnotatedAssay], mut out: W) -> io::Result<()> {
    for assay in assays {
        serde_json::to_writer(&mut out, assay)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub assay_count: usize,
    pub statements_min: Option<usize>,
    pub statements_max: Option<usize>,
    pub statements_mean: f64,
    pub distinct_types: usize,
    pub distinct_formats: usize,
    /// Number of assays carrying each `property :: value` label.
    pub per_label_frequency: BTreeMap<String, usize>,
}

pub fn compute_stats(corpus: &[AnnotatedAssay]) -> CorpusStats {
    let counts: Vec<usize> = corpus.iter().map(|a| a.statement_keys().len()).collect();
    let total: usize = counts.iter().sum();
    let distinct = |pick: fn(&AnnotatedAssay) -> Option<&String>| {
        corpus
            .iter()
            .filter_map(pick)
            .map(|s| normalize_label(s))
            .collect::<BTreeSet<_>>()
            .len()
    };
    let mut per_label_frequency = BTreeMap::new();
    for assay in corpus {
        for (p, v) in assay.statement_keys() {
            *per_label_frequency.entry(format!("{p} :: {v}")).or_insert(0) += 1;
        }
    }
    CorpusStats {
        assay_count: corpus.len(),
        statements_min: counts.iter().copied().min(),
        statements_max: counts.iter().copied().max(),
        statements_mean: if corpus.is_empty() {
            0.0
        } else {
            total as f64 / corpus.len() as f64
        },
        distinct_types: distinct(|a| a.assay_type.as_ref()),
        distinct_formats: distinct(|a| a.assay_format.as_ref()),
        per_label_frequency,
    }
}

pub const META_ASSAY_ID: &str = "assay_id";
pub const META_ASSAY_TYPE: &str = "assay_type";
pub const META_ASSAY_FORMAT: &str = "assay_format";

/// Records an assay as one paper with one contribution holding its gold
/// statements. Re-ingesting an assay id reuses its contribution.
pub fn to_graph(assay: &AnnotatedAssay, graph: &mut Graph) -> Result<(NodeId, NodeId), GraphError> {
    let existing = graph
        .papers()
        .find(|p| p.metadata.get(META_ASSAY_ID) == Some(&assay.id))
        .map(|p| p.id);
    let (paper, contribution) = match existing.and_then(|p| graph.contributions_of(p).next().map(|c| (p, c.id))) {
        Some(pair) => pair,
        None => {
            let mut metadata = BTreeMap::new();
            metadata.insert(META_ASSAY_ID.to_string(), assay.id.clone());
            if let Some(t) = &assay.assay_type {
                metadata.insert(META_ASSAY_TYPE.to_string(), t.clone());
            }
            if let Some(f) = &assay.assay_format {
                metadata.insert(META_ASSAY_FORMAT.to_string(), f.clone());
            }
            let title = assay.title.as_deref().filter(|t| !t.trim().is_empty()).unwrap_or(&assay.id);
            let paper = match existing {
                Some(p) => p,
                None => graph.create_paper(title, metadata)?,
            };
            (paper, graph.create_contribution(paper, &assay.id)?)
        }
    };
    let mut seen = HashSet::new();
    for st in &assay.statements {
        if !seen.insert(st.key()) {
            continue;
        }
        match graph.add_statement(
            contribution,
            &st.property,
            st.property_uri.as_deref(),
            &st.value,
            st.value_uri.as_deref(),
        ) {
            Ok(_) | Err(GraphError::DuplicateStatement(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok((paper, contribution))
}

/// Views each contribution in the graph as an assay record (statement labels
/// plus the type/format metadata of its paper), without assay text.
pub fn assays_from_graph(graph: &Graph) -> Vec<AnnotatedAssay> {
    graph
        .contributions()
        .map(|c| {
            let paper = graph.paper(c.paper);
            let meta = |key: &str| paper.and_then(|p| p.metadata.get(key).cloned());
            let statements = graph
                .subject_statements(c.id)
                .map(|st| AnnotatedStatement {
                    property: graph.node_label(st.predicate).unwrap_or_default().to_string(),
                    value: graph.object_label(&st.object).unwrap_or_default(),
                    property_uri: graph.node_uri(st.predicate).map(str::to_string),
                    value_uri: match &st.object {
                        Object::Node(id) => graph.node_uri(*id).map(str::to_string),
                        Object::Literal(_) => None,
                    },
                })
                .collect();
            AnnotatedAssay {
                id: c.id.to_string(),
                title: paper.map(|p| p.title.clone()),
                text: String::new(),
                statements,
                assay_type: meta(META_ASSAY_TYPE),
                assay_format: meta(META_ASSAY_FORMAT),
            }
        })
        .collect()
}
