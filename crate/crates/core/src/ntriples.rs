//! N-Triples export and import.

use std::fmt::Write as _;
use std::io::BufRead;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Datatype, Graph, GraphError, Literal, NodeId, NodeKind, Object, Statement};
use crate::uri::is_absolute_uri;

pub const DEFAULT_BASE_URI: &str = "http://example.org/assaykg/";

const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
const RDF_LANG_STRING: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";

#[derive(Debug, Error)]
pub enum ImportError {
    #[error("base URI {0:?} must be absolute and end with '/'")]
    InvalidBaseUri(String),
    #[error("line {line}: {message}")]
    Parse {
        line: usize,
        message: String,
        /// What partial mode had already applied; `None` in transactional mode.
        applied: Option<ImportReport>,
    },
    #[error("read failed: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("base URI {0:?} must be absolute and end with '/'")]
pub struct InvalidBaseUri(pub String);

fn check_base(base_uri: &str) -> Result<(), InvalidBaseUri> {
    if is_absolute_uri(base_uri) && base_uri.ends_with('/') {
        Ok(())
    } else {
        Err(InvalidBaseUri(base_uri.to_string()))
    }
}

fn node_iri(graph: &Graph, base_uri: &str, id: NodeId) -> String {
    match graph.node_uri(id) {
        Some(uri) => uri.to_string(),
        None if id.kind() == NodeKind::Predicate => format!("{base_uri}predicate/{id}"),
        None => format!("{base_uri}resource/{id}"),
    }
}

/// Escapes a literal body per the N-Triples `STRING_LITERAL_QUOTE` rule.
pub fn escape_literal(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    for c in value.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            '\u{8}' => out.push_str("\\b"),
            '\u{c}' => out.push_str("\\f"),
            c if c.is_control() && (c as u32) <= 0xFFFF => write!(out, "\\u{:04X}", c as u32).unwrap(),
            c if c.is_control() => write!(out, "\\U{:08X}", c as u32).unwrap(),
            c => out.push(c),
        }
    }
    out
}

fn literal_term(lit: &Literal) -> String {
    let body = escape_literal(lit.value());
    match lit.datatype() {
        Datatype::String => format!("\"{body}\""),
        Datatype::Integer => format!("\"{body}\"^^<{XSD}integer>"),
        Datatype::Decimal => format!("\"{body}\"^^<{XSD}decimal>"),
    }
}

/// One line per statement, sorted bytewise. Each line ends with `" .\n"`.
pub fn export_lines(graph: &Graph, base_uri: &str) -> Result<Vec<String>, InvalidBaseUri> {
    check_base(base_uri)?;
    let mut lines: Vec<String> = graph
        .statements()
        .map(|st| {
            let object = match &st.object {
                Object::Node(id) => format!("<{}>", node_iri(graph, base_uri, *id)),
                Object::Literal(lit) => literal_term(lit),
            };
            format!(
                "<{}> <{}> {object} .\n",
                node_iri(graph, base_uri, st.subject),
                node_iri(graph, base_uri, st.predicate)
            )
        })
        .collect();
    lines.sort();
    Ok(lines)
}

pub fn export_ntriples(graph: &Graph, base_uri: &str) -> Result<String, InvalidBaseUri> {
    Ok(export_lines(graph, base_uri)?.concat())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Iri(String),
    Blank(String),
    Literal {
        value: String,
        datatype: Option<String>,
        language: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triple {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
}

struct Cursor<'a> {
    rest: &'a str,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        self.rest = self.rest.trim_start_matches([' ', '\t']);
    }

    fn eat(&mut self, c: char) -> bool {
        match self.rest.strip_prefix(c) {
            Some(r) => {
                self.rest = r;
                true
            }
            None => false,
        }
    }

    fn next_char(&mut self) -> Option<char> {
        let c = self.rest.chars().next()?;
        self.rest = &self.rest[c.len_utf8()..];
        Some(c)
    }

    fn hex(&mut self, digits: usize) -> Result<char, String> {
        if self.rest.len() < digits || !self.rest.is_char_boundary(digits) {
            return Err("truncated \\u escape".into());
        }
        let (h, r) = self.rest.split_at(digits);
        let code = u32::from_str_radix(h, 16).map_err(|_| format!("bad hex escape {h:?}"))?;
        self.rest = r;
        char::from_u32(code).ok_or_else(|| format!("escape U+{code:X} is not a scalar value"))
    }

    fn uchar(&mut self) -> Result<char, String> {
        match self.next_char() {
            Some('u') => self.hex(4),
            Some('U') => self.hex(8),
            _ => Err("invalid escape in IRI".into()),
        }
    }

    fn iri(&mut self) -> Result<String, String> {
        if !self.eat('<') {
            return Err("expected '<'".into());
        }
        let mut out = String::new();
        loop {
            match self.next_char() {
                None => return Err("unterminated IRI".into()),
                Some('>') => break,
                Some('\\') => out.push(self.uchar()?),
                Some(c) if c <= ' ' || "<\"{}|^`".contains(c) => {
                    return Err(format!("character {c:?} not allowed in IRI"));
                }
                Some(c) => out.push(c),
            }
        }
        if !is_absolute_uri(&out) {
            return Err(format!("IRI {out:?} is not absolute"));
        }
        Ok(out)
    }

    fn blank(&mut self) -> Result<String, String> {
        if !self.rest.starts_with("_:") {
            return Err("expected blank node".into());
        }
        self.rest = &self.rest[2..];
        let end = self
            .rest
            .find(|c: char| !(c.is_alphanumeric() || "_-.".contains(c)))
            .unwrap_or(self.rest.len());
        let label = self.rest[..end].trim_end_matches('.');
        if label.is_empty() {
            return Err("empty blank node label".into());
        }
        self.rest = &self.rest[label.len()..];
        Ok(label.to_string())
    }

    fn literal(&mut self) -> Result<Term, String> {
        self.eat('"');
        let mut value = String::new();
        loop {
            match self.next_char() {
                None => return Err("unterminated literal".into()),
                Some('"') => break,
                Some('\n') | Some('\r') => return Err("raw line break in literal".into()),
                Some('\\') => {
                    let c = match self.next_char() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.hex(4)?,
                        Some('U') => self.hex(8)?,
                        other => return Err(format!("invalid escape \\{}", other.unwrap_or(' '))),
                    };
                    value.push(c);
                }
                Some(c) => value.push(c),
            }
        }
        if self.rest.starts_with("^^") {
            self.rest = &self.rest[2..];
            let datatype = self.iri()?;
            return Ok(Term::Literal {
                value,
                datatype: Some(datatype),
                language: None,
            });
        }
        if self.eat('@') {
            let end = self
                .rest
                .find(|c: char| !(c.is_ascii_alphanumeric() || c == '-'))
                .unwrap_or(self.rest.len());
            let tag = &self.rest[..end];
            if tag.is_empty() || !tag.starts_with(|c: char| c.is_ascii_alphabetic()) {
                return Err("invalid language tag".into());
            }
            self.rest = &self.rest[end..];
            return Ok(Term::Literal {
                value,
                datatype: None,
                language: Some(tag.to_string()),
            });
        }
        Ok(Term::Literal {
            value,
            datatype: None,
            language: None,
        })
    }

    fn term(&mut self, allow_literal: bool) -> Result<Term, String> {
        match self.rest.chars().next() {
            Some('<') => self.iri().map(Term::Iri),
            Some('_') => self.blank().map(Term::Blank),
            Some('"') if allow_literal => self.literal(),
            _ => Err("expected a term".into()),
        }
    }
}

/// Parses one N-Triples line. Blank and comment-only lines give `Ok(None)`.
pub fn parse_line(line: &str) -> Result<Option<Triple>, String> {
    let line = line.strip_suffix('\n').unwrap_or(line);
    let line = line.strip_suffix('\r').unwrap_or(line);
    let mut cur = Cursor { rest: line };
    cur.skip_ws();
    if cur.rest.is_empty() || cur.rest.starts_with('#') {
        return Ok(None);
    }
    let subject = cur.term(false)?;
    cur.skip_ws();
    let predicate = match cur.term(false)? {
        Term::Iri(iri) => Term::Iri(iri),
        _ => return Err("predicate must be an IRI".into()),
    };
    cur.skip_ws();
    let object = cur.term(true)?;
    cur.skip_ws();
    if !cur.eat('.') {
        return Err("expected '.' at end of triple".into());
    }
    cur.skip_ws();
    if !(cur.rest.is_empty() || cur.rest.starts_with('#')) {
        return Err(format!("trailing content {:?}", cur.rest));
    }
    Ok(Some(Triple {
        subject,
        predicate,
        object,
    }))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ImportMode {
    /// All lines apply or none do.
    #[default]
    Transactional,
    /// Lines before the first bad one stay applied.
    Partial,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ImportReport {
    pub lines_read: usize,
    pub triples: usize,
    pub statements_added: usize,
    pub duplicates: usize,
    pub new_resources: Vec<NodeId>,
    pub new_predicates: Vec<NodeId>,
}

fn local_name(iri: &str) -> &str {
    let trimmed = iri.trim_end_matches(['/', '#']);
    let cut = trimmed.rfind(['/', '#', ':']).map_or(0, |i| i + 1);
    match &trimmed[cut..] {
        "" => iri,
        name => name,
    }
}

struct Importer<'g> {
    graph: &'g mut Graph,
    base_uri: &'g str,
    report: ImportReport,
}

impl Importer<'_> {
    fn minted(&self, iri: &str, segment: &str) -> Option<NodeId> {
        let id = iri.strip_prefix(self.base_uri)?.strip_prefix(segment)?;
        let id: NodeId = id.parse().ok()?;
        // a node with its own uri is never exported under a minted one
        (self.graph.has_node(id) && self.graph.node_uri(id).is_none()).then_some(id)
    }

    fn node(&mut self, term: &Term) -> Result<NodeId, String> {
        let iri = match term {
            Term::Iri(iri) => iri,
            Term::Blank(_) => return Err("blank nodes are not supported".into()),
            Term::Literal { .. } => return Err("literal in node position".into()),
        };
        if let Some(id) = self.minted(iri, "resource/") {
            if matches!(id.kind(), NodeKind::Contribution | NodeKind::Resource) {
                return Ok(id);
            }
        }
        if let Some(id) = self.graph.resource_by_uri(iri) {
            return Ok(id);
        }
        let id = self
            .graph
            .ensure_resource(local_name(iri), Some(iri))
            .map_err(|e| e.to_string())?;
        self.report.new_resources.push(id);
        Ok(id)
    }

    fn predicate(&mut self, iri: &str) -> Result<NodeId, String> {
        if let Some(id) = self.minted(iri, "predicate/") {
            if id.kind() == NodeKind::Predicate {
                return Ok(id);
            }
        }
        if let Some(id) = self.graph.predicate_by_uri(iri) {
            return Ok(id);
        }
        // labels are unique, so fall back to longer names when taken
        let candidates = [local_name(iri).to_string(), iri.to_string()];
        let label = candidates
            .into_iter()
            .chain((2..).map(|n| format!("{iri} ({n})")))
            .find(|l| self.graph.predicate_by_label(l).is_none())
            .expect("unbounded candidates");
        let id = self.graph.ensure_predicate(&label, Some(iri)).map_err(|e| e.to_string())?;
        self.report.new_predicates.push(id);
        Ok(id)
    }

    fn object(&mut self, term: &Term) -> Result<Object, String> {
        let Term::Literal {
            value,
            datatype,
            language,
        } = term
        else {
            return self.node(term).map(Object::Node);
        };
        let datatype = match (datatype.as_deref(), language) {
            (None, _) => Datatype::String,
            (Some(dt), _) if dt == RDF_LANG_STRING => Datatype::String,
            (Some(dt), _) => match dt.strip_prefix(XSD) {
                Some("string") => Datatype::String,
                Some("integer") => Datatype::Integer,
                Some("decimal") => Datatype::Decimal,
                _ => return Err(format!("unsupported datatype <{dt}>")),
            },
        };
        Literal::new(value.clone(), datatype)
            .map(Object::Literal)
            .map_err(|e| e.to_string())
    }

    fn apply(&mut self, triple: &Triple) -> Result<(), String> {
        let Term::Iri(pred_iri) = &triple.predicate else {
            return Err("predicate must be an IRI".into());
        };
        // validate the whole triple before creating any node
        if matches!(triple.subject, Term::Blank(_)) || matches!(triple.object, Term::Blank(_)) {
            return Err("blank nodes are not supported".into());
        }
        if let Term::Literal { datatype: Some(dt), .. } = &triple.object {
            let known = dt == RDF_LANG_STRING
                || matches!(dt.strip_prefix(XSD), Some("string" | "integer" | "decimal"));
            if !known {
                return Err(format!("unsupported datatype <{dt}>"));
            }
        }
        if let Term::Literal { value, datatype: Some(dt), .. } = &triple.object {
            let datatype = match dt.strip_prefix(XSD) {
                Some("integer") => Some(Datatype::Integer),
                Some("decimal") => Some(Datatype::Decimal),
                _ => None,
            };
            if let Some(datatype) = datatype {
                Literal::new(value.clone(), datatype).map_err(|e| e.to_string())?;
            }
        }
        let subject = self.node(&triple.subject)?;
        let predicate = self.predicate(pred_iri)?;
        let object = self.object(&triple.object)?;
        let statement = Statement {
            subject,
            predicate,
            object,
        };
        match self.graph.insert_statement(statement) {
            Ok(()) => self.report.statements_added += 1,
            Err(GraphError::DuplicateStatement(_)) => self.report.duplicates += 1,
            Err(e) => return Err(e.to_string()),
        }
        Ok(())
    }
}

fn run_import<R: BufRead>(graph: &mut Graph, mut reader: R, base_uri: &str) -> Result<ImportReport, (usize, String, ImportReport)> {
    let mut importer = Importer {
        graph,
        base_uri,
        report: ImportReport::default(),
    };
    let mut buf = Vec::new();
    let mut line_no = 0;
    loop {
        buf.clear();
        match reader.read_until(b'\n', &mut buf) {
            Ok(0) => break,
            Ok(_) => {}
            Err(e) => return Err((line_no + 1, format!("read failed: {e}"), importer.report)),
        }
        line_no += 1;
        importer.report.lines_read = line_no;
        let outcome = std::str::from_utf8(&buf)
            .map_err(|_| "line is not valid UTF-8".to_string())
            .and_then(parse_line)
            .and_then(|t| match t {
                Some(triple) => {
                    importer.report.triples += 1;
                    importer.apply(&triple)
                }
                None => Ok(()),
            });
        if let Err(message) = outcome {
            return Err((line_no, message, importer.report));
        }
    }
    Ok(importer.report)
}

/// Reads N-Triples into `graph`.
///
/// IRIs minted under `base_uri` for an existing node resolve to that node,
/// IRIs equal to a stored ontology URI resolve to its node, and any other IRI
/// becomes a new resource (or predicate) carrying the IRI as its URI.
pub fn import_ntriples<R: BufRead>(
    graph: &mut Graph,
    reader: R,
    base_uri: &str,
    mode: ImportMode,
) -> Result<ImportReport, ImportError> {
    check_base(base_uri).map_err(|e| ImportError::InvalidBaseUri(e.0))?;
    match mode {
        ImportMode::Transactional => {
            let mut scratch = graph.clone();
            match run_import(&mut scratch, reader, base_uri) {
                Ok(report) => {
                    *graph = scratch;
                    Ok(report)
                }
                Err((line, message, _)) => Err(ImportError::Parse {
                    line,
                    message,
                    applied: None,
                }),
            }
        }
        ImportMode::Partial => run_import(graph, reader, base_uri).map_err(|(line, message, report)| ImportError::Parse {
            line,
            message,
            applied: Some(report),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{BTreeMap, BTreeSet};

    const BAO_FORMAT: &str = "http://www.bioassayontology.org/bao#BAO_0000205";
    const BAO_TISSUE: &str = "http://www.bioassayontology.org/bao#BAO_0000221";

    fn sample() -> (Graph, NodeId) {
        let mut g = Graph::new();
        let p = g.create_paper("AID 1", BTreeMap::new()).unwrap();
        let c = g.create_contribution(p, "AID 1").unwrap();
        g.add_statement(c, "has assay format", Some(BAO_FORMAT), "tissue-based format", Some(BAO_TISSUE))
            .unwrap();
        g.add_statement(c, "has assay method", None, "reporter gene", None).unwrap();
        g.add_literal_statement(c, "has note", None, Literal::string("say \"hi\"\n\tok\\")).unwrap();
        g.add_literal_statement(c, "has replicate count", None, Literal::new("3", Datatype::Integer).unwrap())
            .unwrap();
        (g, c)
    }

    fn line_set(text: &str) -> BTreeSet<String> {
        text.lines().map(str::to_string).collect()
    }

    #[test]
    fn ontology_uris_verbatim() {
        let (g, _) = sample();
        let out = export_ntriples(&g, DEFAULT_BASE_URI).unwrap();
        let expected = format!("<{DEFAULT_BASE_URI}resource/C1> <{BAO_FORMAT}> <{BAO_TISSUE}> .");
        assert!(out.lines().any(|l| l == expected), "{out}");
        assert!(out.contains(&format!("<{DEFAULT_BASE_URI}predicate/PR2> <{DEFAULT_BASE_URI}resource/R2>")));
    }

    #[test]
    fn literal_escaping() {
        let (g, _) = sample();
        let out = export_ntriples(&g, DEFAULT_BASE_URI).unwrap();
        assert!(out.contains(r#""say \"hi\"\n\tok\\" ."#), "{out}");
        assert!(out.contains("\"3\"^^<http://www.w3.org/2001/XMLSchema#integer> ."));
        assert_eq!(escape_literal("\u{1}"), "\\u0001");
    }

    #[test]
    fn sorted_and_terminated() {
        let (g, _) = sample();
        let lines = export_lines(&g, DEFAULT_BASE_URI).unwrap();
        assert_eq!(lines.len(), g.statement_count());
        assert!(lines.windows(2).all(|w| w[0] < w[1]));
        assert!(lines.iter().all(|l| l.ends_with(" .\n")));
    }

    #[test]
    fn empty_graph_exports_nothing() {
        assert_eq!(export_ntriples(&Graph::new(), DEFAULT_BASE_URI).unwrap(), "");
    }

    #[test]
    fn base_uri_checked() {
        let g = Graph::new();
        assert!(export_ntriples(&g, "http://example.org/no-slash").is_err());
        assert!(export_ntriples(&g, "relative/").is_err());
        let err = import_ntriples(&mut Graph::new(), "".as_bytes(), "nope", ImportMode::Transactional).unwrap_err();
        assert!(matches!(err, ImportError::InvalidBaseUri(_)));
    }

    #[test]
    fn reimport_adds_nothing() {
        let (mut g, _) = sample();
        let text = export_ntriples(&g, DEFAULT_BASE_URI).unwrap();
        let before = g.clone();
        let report = import_ntriples(&mut g, text.as_bytes(), DEFAULT_BASE_URI, ImportMode::Transactional).unwrap();
        assert_eq!(report.statements_added, 0);
        assert_eq!(report.duplicates, 4);
        assert!(report.new_resources.is_empty() && report.new_predicates.is_empty());
        assert_eq!(g, before);
    }

    #[test]
    fn fixed_point_through_empty_graph() {
        let (g, _) = sample();
        let first = export_ntriples(&g, DEFAULT_BASE_URI).unwrap();
        let mut fresh = Graph::new();
        import_ntriples(&mut fresh, first.as_bytes(), DEFAULT_BASE_URI, ImportMode::Transactional).unwrap();
        let second = export_ntriples(&fresh, DEFAULT_BASE_URI).unwrap();
        assert_eq!(line_set(&first), line_set(&second));
        fresh.check_integrity().unwrap();
    }

    #[test]
    fn unknown_predicate_reported() {
        let (mut g, _) = sample();
        let line = format!("<{DEFAULT_BASE_URI}resource/C1> <http://purl.org/x#detects> <{BAO_TISSUE}> .\n");
        let report = import_ntriples(&mut g, line.as_bytes(), DEFAULT_BASE_URI, ImportMode::Transactional).unwrap();
        assert_eq!(report.statements_added, 1);
        assert_eq!(report.new_predicates.len(), 1);
        let p = g.predicate(report.new_predicates[0]).unwrap();
        assert_eq!(p.label, "detects");
        assert_eq!(p.uri.as_deref(), Some("http://purl.org/x#detects"));
        assert!(report.new_resources.is_empty());
    }

    fn three_lines_bad_third() -> String {
        format!(
            "<{b}resource/C1> <{b}predicate/PR9x> \"one\" .\n<http://x.org/a> <http://x.org/p> \"two\" .\n<broken\n",
            b = DEFAULT_BASE_URI
        )
    }

    #[test]
    fn transactional_rolls_back() {
        let (mut g, _) = sample();
        let before = g.clone();
        let err = import_ntriples(&mut g, three_lines_bad_third().as_bytes(), DEFAULT_BASE_URI, ImportMode::Transactional)
            .unwrap_err();
        assert!(matches!(err, ImportError::Parse { line: 3, applied: None, .. }), "{err:?}");
        assert_eq!(g, before);
    }

    #[test]
    fn partial_keeps_earlier_lines() {
        let (mut g, _) = sample();
        let before = g.statement_count();
        let err = import_ntriples(&mut g, three_lines_bad_third().as_bytes(), DEFAULT_BASE_URI, ImportMode::Partial)
            .unwrap_err();
        let ImportError::Parse { line, applied, .. } = err else {
            panic!("expected a parse error");
        };
        assert_eq!(line, 3);
        assert_eq!(applied.unwrap().statements_added, 2);
        assert_eq!(g.statement_count(), before + 2);
    }

    #[test]
    fn parser_grammar() {
        assert_eq!(parse_line("  # comment").unwrap(), None);
        assert_eq!(parse_line("").unwrap(), None);
        let t = parse_line("<http://a.org/s> <http://a.org/p> \"x\\u00E9\"@en . # tail").unwrap().unwrap();
        assert_eq!(
            t.object,
            Term::Literal {
                value: "xé".into(),
                datatype: None,
                language: Some("en".into())
            }
        );
        assert!(parse_line("<http://a.org/s> <http://a.org/p> <http://a.org/o>").is_err());
        assert!(parse_line("\"lit\" <http://a.org/p> <http://a.org/o> .").is_err());
        assert!(parse_line("<http://a.org/s> _:b <http://a.org/o> .").is_err());
        assert!(parse_line("<http://a.org/s> <http://a.org/p> \"bad \\q\" .").is_err());
        assert!(parse_line("<http://a.org/s> <http://a.org/p> <http://a.org/o> . extra").is_err());
        assert!(parse_line("<rel> <http://a.org/p> <http://a.org/o> .").is_err());
    }

    #[test]
    fn bad_typed_literal_rejected_without_side_effects() {
        let (mut g, _) = sample();
        let before = g.clone();
        let line = "<http://x.org/new> <http://x.org/count> \"3.5\"^^<http://www.w3.org/2001/XMLSchema#integer> .\n";
        let err = import_ntriples(&mut g, line.as_bytes(), DEFAULT_BASE_URI, ImportMode::Partial).unwrap_err();
        assert!(matches!(err, ImportError::Parse { line: 1, .. }));
        assert_eq!(g, before);
    }

    #[test]
    fn local_names() {
        assert_eq!(local_name("http://a.org/x/y#Z"), "Z");
        assert_eq!(local_name("http://a.org/x/"), "x");
        assert_eq!(local_name("urn:isbn:123"), "123");
    }
}
