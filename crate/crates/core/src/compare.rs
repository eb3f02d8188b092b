//! Survey-style comparison tables and similar-contribution search.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{normalize_label, Graph, NodeId};
use crate::semantifier::KEY_SEPARATOR;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompareError {
    #[error("no contributions selected")]
    EmptySelection,
    #[error("unknown contribution {0}")]
    UnknownContribution(String),
    #[error("contribution {0} selected more than once")]
    DuplicateSelection(NodeId),
    #[error("k must be at least 1")]
    InvalidK,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub contribution: NodeId,
    pub paper: NodeId,
    pub paper_title: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub property: String,
    #[serde(default)]
    pub property_uri: Option<String>,
    /// One cell per column: the sorted labels of every matching object.
    pub cells: Vec<Vec<String>>,
    pub coverage: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub columns: Vec<Column>,
    pub rows: Vec<Row>,
}

impl ComparisonTable {
    pub fn row(&self, property: &str) -> Option<&Row> {
        let key = normalize_label(property);
        self.rows.iter().find(|r| normalize_label(&r.property) == key)
    }

    pub fn column_index(&self, contribution: NodeId) -> Option<usize> {
        self.columns.iter().position(|c| c.contribution == contribution)
    }
}

/// Aligns the selected contributions on their predicates.
///
/// Rows are ordered by coverage (number of non-empty cells) descending, then
/// by property label case-insensitively.
pub fn build_comparison(graph: &Graph, contributions: &[NodeId]) -> Result<ComparisonTable, CompareError> {
    if contributions.is_empty() {
        return Err(CompareError::EmptySelection);
    }
    let mut columns = Vec::with_capacity(contributions.len());
    let mut seen = BTreeSet::new();
    for &id in contributions {
        if !seen.insert(id) {
            return Err(CompareError::DuplicateSelection(id));
        }
        let c = graph
            .contribution(id)
            .ok_or_else(|| CompareError::UnknownContribution(id.to_string()))?;
        columns.push(Column {
            contribution: id,
            paper: c.paper,
            paper_title: graph.paper(c.paper).map(|p| p.title.clone()).unwrap_or_default(),
        });
    }

    // predicates are unique per normalized label and per URI, so the
    // predicate node is the alignment key
    let mut by_predicate: BTreeMap<NodeId, Vec<Vec<String>>> = BTreeMap::new();
    for (col, &id) in contributions.iter().enumerate() {
        for st in graph.subject_statements(id) {
            let cells = by_predicate
                .entry(st.predicate)
                .or_insert_with(|| vec![Vec::new(); contributions.len()]);
            cells[col].push(graph.object_label(&st.object).unwrap_or_default());
        }
    }

    let mut rows: Vec<(NodeId, Row)> = by_predicate
        .into_iter()
        .map(|(pid, mut cells)| {
            for cell in &mut cells {
                cell.sort();
            }
            let coverage = cells.iter().filter(|c| !c.is_empty()).count();
            let row = Row {
                property: graph.node_label(pid).unwrap_or_default().to_string(),
                property_uri: graph.node_uri(pid).map(str::to_string),
                cells,
                coverage,
            };
            (pid, row)
        })
        .collect();
    rows.sort_by(|(pa, a), (pb, b)| {
        b.coverage
            .cmp(&a.coverage)
            .then_with(|| a.property.to_lowercase().cmp(&b.property.to_lowercase()))
            .then_with(|| a.property.cmp(&b.property))
            .then_with(|| pa.cmp(pb))
    });
    Ok(ComparisonTable {
        columns,
        rows: rows.into_iter().map(|(_, r)| r).collect(),
    })
}

const EMPTY_CELL: &str = "-";

pub fn render_text(table: &ComparisonTable) -> String {
    let mut grid: Vec<Vec<String>> = Vec::with_capacity(table.rows.len() + 2);
    let mut header = vec!["property".to_string()];
    header.extend(table.columns.iter().map(|c| c.contribution.to_string()));
    let mut titles = vec![String::new()];
    titles.extend(table.columns.iter().map(|c| c.paper_title.clone()));
    grid.push(header);
    grid.push(titles);
    for row in &table.rows {
        let mut line = vec![row.property.clone()];
        line.extend(row.cells.iter().map(|cell| {
            if cell.is_empty() {
                EMPTY_CELL.to_string()
            } else {
                cell.join(", ")
            }
        }));
        grid.push(line);
    }
    let widths: Vec<usize> = (0..=table.columns.len())
        .map(|i| grid.iter().map(|l| l[i].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (n, line) in grid.iter().enumerate() {
        let cells: Vec<String> = line
            .iter()
            .zip(&widths)
            .map(|(cell, w)| format!("{cell:<w$}"))
            .collect();
        writeln!(out, "{}", cells.join(" | ").trim_end()).unwrap();
        if n == 1 {
            let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
            writeln!(out, "{}", rule.join("-+-")).unwrap();
        }
    }
    out
}

/// RFC 4180 CSV: header `property,<ids...>`, multi-valued cells joined by
/// `"; "`, empty cells left blank.
pub fn render_csv(table: &ComparisonTable) -> String {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    let mut header = vec!["property".to_string()];
    header.extend(table.columns.iter().map(|c| c.contribution.to_string()));
    writer.write_record(&header).expect("write to Vec");
    for row in &table.rows {
        let mut record = vec![row.property.clone()];
        record.extend(row.cells.iter().map(|c| c.join("; ")));
        writer.write_record(&record).expect("write to Vec");
    }
    String::from_utf8(writer.into_inner().expect("flush to Vec")).expect("csv output is UTF-8")
}

pub fn render_json(table: &ComparisonTable) -> String {
    serde_json::to_string_pretty(table).expect("table serializes")
}

/// `|a ∩ b| / |a ∪ b|`, with two empty sets counted as identical.
pub fn jaccard_similarity<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let shared = a.intersection(b).count();
    shared as f64 / (a.len() + b.len() - shared) as f64
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimilarityMode {
    /// Compare full `property :: value` statements.
    #[default]
    Statements,
    /// Compare the sets of properties only.
    Properties,
}

/// Normalized statement (or property) keys of a contribution.
pub fn statement_keys(graph: &Graph, contribution: NodeId, mode: SimilarityMode) -> BTreeSet<String> {
    graph
        .subject_statements(contribution)
        .map(|st| {
            let property = normalize_label(graph.node_label(st.predicate).unwrap_or_default());
            match mode {
                SimilarityMode::Properties => property,
                SimilarityMode::Statements => {
                    let value = normalize_label(&graph.object_label(&st.object).unwrap_or_default());
                    format!("{property}{KEY_SEPARATOR}{value}")
                }
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityResult {
    pub contribution: NodeId,
    pub score: f64,
}

/// The `k` contributions most similar to `query` (never `query` itself),
/// by score descending and then id ascending.
pub fn find_similar(
    graph: &Graph,
    query: NodeId,
    k: usize,
    mode: SimilarityMode,
) -> Result<Vec<SimilarityResult>, CompareError> {
    if graph.contribution(query).is_none() {
        return Err(CompareError::UnknownContribution(query.to_string()));
    }
    if k == 0 {
        return Err(CompareError::InvalidK);
    }
    let target = statement_keys(graph, query, mode);
    let mut results: Vec<SimilarityResult> = graph
        .contributions()
        .filter(|c| c.id != query)
        .map(|c| SimilarityResult {
            contribution: c.id,
            score: jaccard_similarity(&target, &statement_keys(graph, c.id, mode)),
        })
        .collect();
    results.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.contribution.cmp(&b.contribution)));
    results.truncate(k);
    Ok(results)
}
