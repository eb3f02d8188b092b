//! In-memory knowledge graph of papers, contributions, predicates, resources
//! and the statements linking them.
//!
//! Node identifiers are prefix-typed (`P` paper, `C` contribution, `R`
//! resource, `PR` predicate) and drawn from per-kind counters that only ever
//! grow, so an identifier is never handed out twice even after compaction.
//!
//! Predicates and resources are created on demand by label. Two resources are
//! the same node when their [`normalize_label`] forms and ontology URIs are
//! equal; predicates are unique per normalized label, and a predicate URI also
//! identifies the predicate it was first attached to.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use indexmap::{IndexMap, IndexSet};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::uri::is_absolute_uri;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("paper title is empty")]
    EmptyTitle,
    #[error("label is empty")]
    EmptyLabel,
    #[error("unknown contribution {0}")]
    UnknownContribution(NodeId),
    #[error("unknown paper {0}")]
    UnknownPaper(NodeId),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("statement already exists: {0}")]
    DuplicateStatement(Statement),
    #[error("not an absolute URI: {0:?}")]
    InvalidUri(String),
    #[error("{value:?} is not a valid {datatype} literal")]
    InvalidLiteral { value: String, datatype: Datatype },
    #[error("predicate {label:?} is bound to <{existing}>, not <{requested}>")]
    PredicateUriConflict {
        label: String,
        existing: String,
        requested: String,
    },
    #[error("malformed node id {0:?}")]
    InvalidNodeId(String),
    #[error("graph integrity violated: {0}")]
    Integrity(String),
    #[error("node {id} cannot be used as a {role}")]
    WrongKind { id: NodeId, role: &'static str },
}

pub type Result<T, E = GraphError> = std::result::Result<T, E>;

/// Lowercases, trims, and collapses internal whitespace runs to one space.
pub fn normalize_label(label: &str) -> String {
    label
        .split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    Paper,
    Contribution,
    Resource,
    Predicate,
}

impl NodeKind {
    pub fn prefix(self) -> &'static str {
        match self {
            NodeKind::Paper => "P",
            NodeKind::Contribution => "C",
            NodeKind::Resource => "R",
            NodeKind::Predicate => "PR",
        }
    }
}

/// Prefix-typed node identifier such as `C12` or `PR3`.
///
/// Ordering is by kind, then numerically by sequence number, so `C2 < C10`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct NodeId {
    kind: NodeKind,
    seq: u64,
}

impl NodeId {
    pub fn new(kind: NodeKind, seq: u64) -> Self {
        NodeId { kind, seq }
    }

    pub fn kind(&self) -> NodeKind {
        self.kind
    }

    pub fn seq(&self) -> u64 {
        self.seq
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind.prefix(), self.seq)
    }
}

impl FromStr for NodeId {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, digits) = if let Some(rest) = s.strip_prefix("PR") {
            (NodeKind::Predicate, rest)
        } else if let Some(rest) = s.strip_prefix('P') {
            (NodeKind::Paper, rest)
        } else if let Some(rest) = s.strip_prefix('C') {
            (NodeKind::Contribution, rest)
        } else if let Some(rest) = s.strip_prefix('R') {
            (NodeKind::Resource, rest)
        } else {
            return Err(GraphError::InvalidNodeId(s.to_string()));
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
            return Err(GraphError::InvalidNodeId(s.to_string()));
        }
        let seq = digits
            .parse()
            .map_err(|_| GraphError::InvalidNodeId(s.to_string()))?;
        Ok(NodeId { kind, seq })
    }
}

impl TryFrom<String> for NodeId {
    type Error = GraphError;

    fn try_from(value: String) -> Result<Self> {
        value.parse()
    }
}

impl From<NodeId> for String {
    fn from(id: NodeId) -> String {
        id.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Datatype {
    String,
    Integer,
    Decimal,
}

impl fmt::Display for Datatype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Datatype::String => "string",
            Datatype::Integer => "integer",
            Datatype::Decimal => "decimal",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    value: String,
    datatype: Datatype,
}

impl Literal {
    pub fn new(value: impl Into<String>, datatype: Datatype) -> Result<Self> {
        let value = value.into();
        let valid = match datatype {
            Datatype::String => true,
            Datatype::Integer => is_integer_lexical(&value),
            Datatype::Decimal => is_decimal_lexical(&value),
        };
        if !valid {
            return Err(GraphError::InvalidLiteral { value, datatype });
        }
        Ok(Literal { value, datatype })
    }

    pub fn string(value: impl Into<String>) -> Self {
        Literal {
            value: value.into(),
            datatype: Datatype::String,
        }
    }

    pub fn value(&self) -> &str {
        &self.value
    }

    pub fn datatype(&self) -> Datatype {
        self.datatype
    }
}

fn strip_sign(s: &str) -> &str {
    s.strip_prefix(['+', '-']).unwrap_or(s)
}

fn is_integer_lexical(s: &str) -> bool {
    let digits = strip_sign(s);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

fn is_decimal_lexical(s: &str) -> bool {
    let body = strip_sign(s);
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    let all_digits = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
    (!int.is_empty() || !frac.is_empty()) && all_digits(int) && all_digits(frac) && body != "."
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Object {
    Node(NodeId),
    Literal(Literal),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Statement {
    pub subject: NodeId,
    pub predicate: NodeId,
    pub object: Object,
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.object {
            Object::Node(id) => write!(f, "({}, {}, {})", self.subject, self.predicate, id),
            Object::Literal(lit) => write!(f, "({}, {}, {:?})", self.subject, self.predicate, lit.value),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Paper {
    pub id: NodeId,
    pub title: String,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contribution {
    pub id: NodeId,
    pub paper: NodeId,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Predicate {
    pub id: NodeId,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uri: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resource {
    pub id: NodeId,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uri: Option<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
struct Counters {
    paper: u64,
    contribution: u64,
    resource: u64,
    predicate: u64,
}

impl Counters {
    fn next(&mut self, kind: NodeKind) -> NodeId {
        let slot = match kind {
            NodeKind::Paper => &mut self.paper,
            NodeKind::Contribution => &mut self.contribution,
            NodeKind::Resource => &mut self.resource,
            NodeKind::Predicate => &mut self.predicate,
        };
        *slot += 1;
        NodeId::new(kind, *slot)
    }

    fn covers(&self, id: NodeId) -> bool {
        let last = match id.kind {
            NodeKind::Paper => self.paper,
            NodeKind::Contribution => self.contribution,
            NodeKind::Resource => self.resource,
            NodeKind::Predicate => self.predicate,
        };
        id.seq <= last
    }
}

/// Nodes removed by [`Graph::compact`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Compaction {
    pub resources: Vec<NodeId>,
    pub predicates: Vec<NodeId>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(try_from = "GraphRecord", into = "GraphRecord")]
pub struct Graph {
    counters: Counters,
    papers: IndexMap<NodeId, Paper>,
    contributions: IndexMap<NodeId, Contribution>,
    predicates: IndexMap<NodeId, Predicate>,
    resources: IndexMap<NodeId, Resource>,
    /// Statements grouped by subject; both levels keep insertion order.
    statements: IndexMap<NodeId, IndexSet<Statement>>,
    statement_count: usize,
    predicate_by_label: HashMap<String, NodeId>,
    predicate_by_uri: HashMap<String, NodeId>,
    resource_by_key: HashMap<(String, Option<String>), NodeId>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.counters == other.counters
            && self.papers == other.papers
            && self.contributions == other.contributions
            && self.predicates == other.predicates
            && self.resources == other.resources
            && self.statements == other.statements
    }
}

fn validate_uri(uri: Option<&str>) -> Result<Option<String>> {
    match uri {
        None => Ok(None),
        Some(u) if is_absolute_uri(u) => Ok(Some(u.to_string())),
        Some(u) => Err(GraphError::InvalidUri(u.to_string())),
    }
}

fn require_label(label: &str) -> Result<&str> {
    let trimmed = label.trim();
    if trimmed.is_empty() {
        Err(GraphError::EmptyLabel)
    } else {
        Ok(trimmed)
    }
}

/// How a predicate label/URI pair resolves against the graph.
enum PredicateSlot {
    Existing(NodeId),
    /// Existing predicate that will gain the requested URI.
    Upgrade(NodeId, String),
    Fresh(String, Option<String>),
}

enum ResourceSlot {
    Existing(NodeId),
    Fresh(String, Option<String>),
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn create_paper(&mut self, title: &str, metadata: BTreeMap<String, String>) -> Result<NodeId> {
        let title = title.trim();
        if title.is_empty() {
            return Err(GraphError::EmptyTitle);
        }
        let id = self.counters.next(NodeKind::Paper);
        self.papers.insert(
            id,
            Paper {
                id,
                title: title.to_string(),
                metadata,
            },
        );
        Ok(id)
    }

    pub fn create_contribution(&mut self, paper: NodeId, label: &str) -> Result<NodeId> {
        if !self.papers.contains_key(&paper) {
            return Err(GraphError::UnknownPaper(paper));
        }
        let id = self.counters.next(NodeKind::Contribution);
        self.contributions.insert(
            id,
            Contribution {
                id,
                paper,
                label: label.trim().to_string(),
            },
        );
        Ok(id)
    }

    /// Adds `(contribution, predicate, object)` where predicate and object are
    /// looked up (or created) by label and optional ontology URI.
    ///
    /// A [`GraphError::DuplicateStatement`] leaves the graph untouched.
    pub fn add_statement(
        &mut self,
        contribution: NodeId,
        predicate_label: &str,
        predicate_uri: Option<&str>,
        object_label: &str,
        object_uri: Option<&str>,
    ) -> Result<Statement> {
        self.require_contribution(contribution)?;
        let predicate = self.resolve_predicate(predicate_label, predicate_uri)?;
        let object = self.resolve_resource(object_label, object_uri)?;
        if let (Some(pid), ResourceSlot::Existing(oid)) = (predicate.existing_id(), &object) {
            let candidate = Statement {
                subject: contribution,
                predicate: pid,
                object: Object::Node(*oid),
            };
            if self.contains(&candidate) {
                return Err(GraphError::DuplicateStatement(candidate));
            }
        }
        let predicate = self.commit_predicate(predicate);
        let object = self.commit_resource(object);
        let statement = Statement {
            subject: contribution,
            predicate,
            object: Object::Node(object),
        };
        self.push_statement(statement.clone());
        Ok(statement)
    }

    /// Adds a statement whose object is a typed literal.
    pub fn add_literal_statement(
        &mut self,
        subject: NodeId,
        predicate_label: &str,
        predicate_uri: Option<&str>,
        literal: Literal,
    ) -> Result<Statement> {
        self.require_subject(subject)?;
        let predicate = self.resolve_predicate(predicate_label, predicate_uri)?;
        if let Some(pid) = predicate.existing_id() {
            let candidate = Statement {
                subject,
                predicate: pid,
                object: Object::Literal(literal.clone()),
            };
            if self.contains(&candidate) {
                return Err(GraphError::DuplicateStatement(candidate));
            }
        }
        let predicate = self.commit_predicate(predicate);
        let statement = Statement {
            subject,
            predicate,
            object: Object::Literal(literal),
        };
        self.push_statement(statement.clone());
        Ok(statement)
    }

    /// Inserts a statement over existing nodes, checking referential integrity.
    pub fn insert_statement(&mut self, statement: Statement) -> Result<()> {
        self.require_subject(statement.subject)?;
        if !self.predicates.contains_key(&statement.predicate) {
            return Err(if statement.predicate.kind == NodeKind::Predicate {
                GraphError::UnknownNode(statement.predicate)
            } else {
                GraphError::WrongKind {
                    id: statement.predicate,
                    role: "predicate",
                }
            });
        }
        if let Object::Node(id) = &statement.object {
            self.require_object(*id)?;
        }
        if self.contains(&statement) {
            return Err(GraphError::DuplicateStatement(statement));
        }
        self.push_statement(statement);
        Ok(())
    }

    /// Returns the predicate for `label`/`uri`, creating it if needed.
    pub fn ensure_predicate(&mut self, label: &str, uri: Option<&str>) -> Result<NodeId> {
        let slot = self.resolve_predicate(label, uri)?;
        Ok(self.commit_predicate(slot))
    }

    /// Returns the resource for `label`/`uri`, creating it if needed.
    pub fn ensure_resource(&mut self, label: &str, uri: Option<&str>) -> Result<NodeId> {
        let slot = self.resolve_resource(label, uri)?;
        Ok(self.commit_resource(slot))
    }

    pub fn remove_statement(&mut self, statement: &Statement) -> bool {
        let Some(group) = self.statements.get_mut(&statement.subject) else {
            return false;
        };
        if !group.shift_remove(statement) {
            return false;
        }
        if group.is_empty() {
            self.statements.shift_remove(&statement.subject);
        }
        self.statement_count -= 1;
        true
    }

    /// Drops resources and predicates that no statement references.
    pub fn compact(&mut self) -> Compaction {
        let mut used: HashSet<NodeId> = HashSet::new();
        for st in self.statements() {
            used.insert(st.subject);
            used.insert(st.predicate);
            if let Object::Node(id) = &st.object {
                used.insert(*id);
            }
        }
        let mut report = Compaction::default();
        self.resources.retain(|id, _| {
            let keep = used.contains(id);
            if !keep {
                report.resources.push(*id);
            }
            keep
        });
        self.predicates.retain(|id, _| {
            let keep = used.contains(id);
            if !keep {
                report.predicates.push(*id);
            }
            keep
        });
        self.rebuild_indexes();
        report
    }

    /// Statements whose subject is `contribution`, in insertion order.
    pub fn statements_of(&self, contribution: NodeId) -> Result<Vec<Statement>> {
        self.require_contribution(contribution)?;
        Ok(self.subject_statements(contribution).cloned().collect())
    }

    pub fn subject_statements(&self, subject: NodeId) -> impl Iterator<Item = &Statement> {
        self.statements.get(&subject).into_iter().flatten()
    }

    pub fn statements(&self) -> impl Iterator<Item = &Statement> {
        self.statements.values().flatten()
    }

    pub fn statement_count(&self) -> usize {
        self.statement_count
    }

    pub fn contains(&self, statement: &Statement) -> bool {
        self.statements
            .get(&statement.subject)
            .is_some_and(|group| group.contains(statement))
    }

    pub fn paper(&self, id: NodeId) -> Option<&Paper> {
        self.papers.get(&id)
    }

    pub fn contribution(&self, id: NodeId) -> Option<&Contribution> {
        self.contributions.get(&id)
    }

    pub fn predicate(&self, id: NodeId) -> Option<&Predicate> {
        self.predicates.get(&id)
    }

    pub fn resource(&self, id: NodeId) -> Option<&Resource> {
        self.resources.get(&id)
    }

    pub fn papers(&self) -> impl Iterator<Item = &Paper> {
        self.papers.values()
    }

    pub fn contributions(&self) -> impl Iterator<Item = &Contribution> {
        self.contributions.values()
    }

    pub fn predicates(&self) -> impl Iterator<Item = &Predicate> {
        self.predicates.values()
    }

    pub fn resources(&self) -> impl Iterator<Item = &Resource> {
        self.resources.values()
    }

    pub fn contributions_of(&self, paper: NodeId) -> impl Iterator<Item = &Contribution> {
        self.contributions.values().filter(move |c| c.paper == paper)
    }

    pub fn predicate_by_uri(&self, uri: &str) -> Option<NodeId> {
        self.predicate_by_uri.get(uri).copied()
    }

    pub fn predicate_by_label(&self, label: &str) -> Option<NodeId> {
        self.predicate_by_label.get(&normalize_label(label)).copied()
    }

    pub fn resource_by_uri(&self, uri: &str) -> Option<NodeId> {
        self.resources
            .values()
            .find(|r| r.uri.as_deref() == Some(uri))
            .map(|r| r.id)
    }

    /// Label of any node: paper title, contribution label, or term label.
    pub fn node_label(&self, id: NodeId) -> Option<&str> {
        match id.kind {
            NodeKind::Paper => self.papers.get(&id).map(|p| p.title.as_str()),
            NodeKind::Contribution => self.contributions.get(&id).map(|c| c.label.as_str()),
            NodeKind::Resource => self.resources.get(&id).map(|r| r.label.as_str()),
            NodeKind::Predicate => self.predicates.get(&id).map(|p| p.label.as_str()),
        }
    }

    /// Ontology URI attached to a predicate or resource.
    pub fn node_uri(&self, id: NodeId) -> Option<&str> {
        match id.kind {
            NodeKind::Resource => self.resources.get(&id).and_then(|r| r.uri.as_deref()),
            NodeKind::Predicate => self.predicates.get(&id).and_then(|p| p.uri.as_deref()),
            _ => None,
        }
    }

    pub fn object_label(&self, object: &Object) -> Option<String> {
        match object {
            Object::Node(id) => self.node_label(*id).map(str::to_string),
            Object::Literal(lit) => Some(lit.value.clone()),
        }
    }

    pub fn has_node(&self, id: NodeId) -> bool {
        match id.kind {
            NodeKind::Paper => self.papers.contains_key(&id),
            NodeKind::Contribution => self.contributions.contains_key(&id),
            NodeKind::Resource => self.resources.contains_key(&id),
            NodeKind::Predicate => self.predicates.contains_key(&id),
        }
    }

    /// Verifies referential integrity and the dedup invariants.
    pub fn check_integrity(&self) -> Result<()> {
        for c in self.contributions.values() {
            if !self.papers.contains_key(&c.paper) {
                return Err(GraphError::UnknownPaper(c.paper));
            }
        }
        for st in self.statements() {
            for id in [Some(st.subject), Some(st.predicate), st.object.node()].into_iter().flatten() {
                if !self.has_node(id) {
                    return Err(GraphError::UnknownNode(id));
                }
            }
        }
        let all_ids = self
            .papers
            .keys()
            .chain(self.contributions.keys())
            .chain(self.predicates.keys())
            .chain(self.resources.keys());
        for id in all_ids {
            if !self.counters.covers(*id) {
                return Err(GraphError::Integrity(format!("{id} is ahead of its id counter")));
            }
        }
        let mut labels = HashSet::new();
        for p in self.predicates.values() {
            if !labels.insert(normalize_label(&p.label)) {
                return Err(GraphError::Integrity(format!("predicate label {:?} is not unique", p.label)));
            }
        }
        let mut keys = HashSet::new();
        for r in self.resources.values() {
            if !keys.insert((normalize_label(&r.label), r.uri.clone())) {
                return Err(GraphError::Integrity(format!("resource {} duplicates an earlier resource", r.id)));
            }
        }
        Ok(())
    }

    fn require_contribution(&self, id: NodeId) -> Result<()> {
        if self.contributions.contains_key(&id) {
            Ok(())
        } else {
            Err(GraphError::UnknownContribution(id))
        }
    }

    fn require_subject(&self, id: NodeId) -> Result<()> {
        match id.kind {
            NodeKind::Contribution => self.require_contribution(id),
            NodeKind::Resource if self.resources.contains_key(&id) => Ok(()),
            NodeKind::Resource => Err(GraphError::UnknownNode(id)),
            _ => Err(GraphError::WrongKind { id, role: "subject" }),
        }
    }

    fn require_object(&self, id: NodeId) -> Result<()> {
        match id.kind {
            NodeKind::Contribution | NodeKind::Resource if self.has_node(id) => Ok(()),
            NodeKind::Contribution | NodeKind::Resource => Err(GraphError::UnknownNode(id)),
            _ => Err(GraphError::WrongKind { id, role: "object" }),
        }
    }

    fn resolve_predicate(&self, label: &str, uri: Option<&str>) -> Result<PredicateSlot> {
        let label = require_label(label)?;
        let uri = validate_uri(uri)?;
        if let Some(u) = &uri {
            if let Some(id) = self.predicate_by_uri.get(u) {
                return Ok(PredicateSlot::Existing(*id));
            }
        }
        match self.predicate_by_label.get(&normalize_label(label)) {
            Some(id) => {
                let existing = &self.predicates[id];
                match (&existing.uri, uri) {
                    (_, None) => Ok(PredicateSlot::Existing(*id)),
                    (None, Some(u)) => Ok(PredicateSlot::Upgrade(*id, u)),
                    (Some(have), Some(u)) => Err(GraphError::PredicateUriConflict {
                        label: existing.label.clone(),
                        existing: have.clone(),
                        requested: u,
                    }),
                }
            }
            None => Ok(PredicateSlot::Fresh(label.to_string(), uri)),
        }
    }

    fn commit_predicate(&mut self, slot: PredicateSlot) -> NodeId {
        match slot {
            PredicateSlot::Existing(id) => id,
            PredicateSlot::Upgrade(id, uri) => {
                self.predicate_by_uri.insert(uri.clone(), id);
                self.predicates[&id].uri = Some(uri);
                id
            }
            PredicateSlot::Fresh(label, uri) => {
                let id = self.counters.next(NodeKind::Predicate);
                self.predicate_by_label.insert(normalize_label(&label), id);
                if let Some(u) = &uri {
                    self.predicate_by_uri.insert(u.clone(), id);
                }
                self.predicates.insert(id, Predicate { id, label, uri });
                id
            }
        }
    }

    fn resolve_resource(&self, label: &str, uri: Option<&str>) -> Result<ResourceSlot> {
        let label = require_label(label)?;
        let uri = validate_uri(uri)?;
        let key = (normalize_label(label), uri);
        Ok(match self.resource_by_key.get(&key) {
            Some(id) => ResourceSlot::Existing(*id),
            None => ResourceSlot::Fresh(label.to_string(), key.1),
        })
    }

    fn commit_resource(&mut self, slot: ResourceSlot) -> NodeId {
        match slot {
            ResourceSlot::Existing(id) => id,
            ResourceSlot::Fresh(label, uri) => {
                let id = self.counters.next(NodeKind::Resource);
                self.resource_by_key
                    .insert((normalize_label(&label), uri.clone()), id);
                self.resources.insert(id, Resource { id, label, uri });
                id
            }
        }
    }

    fn push_statement(&mut self, statement: Statement) {
        if self
            .statements
            .entry(statement.subject)
            .or_default()
            .insert(statement)
        {
            self.statement_count += 1;
        }
    }

    fn rebuild_indexes(&mut self) {
        self.predicate_by_label = self
            .predicates
            .values()
            .map(|p| (normalize_label(&p.label), p.id))
            .collect();
        self.predicate_by_uri = self
            .predicates
            .values()
            .filter_map(|p| p.uri.clone().map(|u| (u, p.id)))
            .collect();
        self.resource_by_key = self
            .resources
            .values()
            .map(|r| ((normalize_label(&r.label), r.uri.clone()), r.id))
            .collect();
        self.statement_count = self.statements.values().map(IndexSet::len).sum();
    }
}

impl PredicateSlot {
    fn existing_id(&self) -> Option<NodeId> {
        match self {
            PredicateSlot::Existing(id) | PredicateSlot::Upgrade(id, _) => Some(*id),
            PredicateSlot::Fresh(..) => None,
        }
    }
}

impl Object {
    pub fn node(&self) -> Option<NodeId> {
        match self {
            Object::Node(id) => Some(*id),
            Object::Literal(_) => None,
        }
    }
}

/// Serialized form of a [`Graph`]; lookup indexes are rebuilt on load.
#[derive(Serialize, Deserialize)]
struct GraphRecord {
    counters: Counters,
    papers: Vec<Paper>,
    contributions: Vec<Contribution>,
    predicates: Vec<Predicate>,
    resources: Vec<Resource>,
    statements: Vec<Statement>,
}

impl From<Graph> for GraphRecord {
    fn from(g: Graph) -> Self {
        GraphRecord {
            counters: g.counters,
            statements: g.statements.into_values().flatten().collect(),
            papers: g.papers.into_values().collect(),
            contributions: g.contributions.into_values().collect(),
            predicates: g.predicates.into_values().collect(),
            resources: g.resources.into_values().collect(),
        }
    }
}

impl TryFrom<GraphRecord> for Graph {
    type Error = GraphError;

    fn try_from(record: GraphRecord) -> Result<Self> {
        let mut graph = Graph {
            counters: record.counters,
            papers: record.papers.into_iter().map(|p| (p.id, p)).collect(),
            contributions: record.contributions.into_iter().map(|c| (c.id, c)).collect(),
            predicates: record.predicates.into_iter().map(|p| (p.id, p)).collect(),
            resources: record.resources.into_iter().map(|r| (r.id, r)).collect(),
            ..Graph::default()
        };
        for st in record.statements {
            graph.push_statement(st);
        }
        graph.rebuild_indexes();
        graph.check_integrity()?;
        Ok(graph)
    }
}
