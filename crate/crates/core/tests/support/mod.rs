//! Reference implementations shared by the integration and acceptance tests.
//! Everything here is written from the definitions, not from the library.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use assaykg::corpus::{AnnotatedAssay, AnnotatedStatement};
use assaykg::graph::{normalize_label, Graph, NodeId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regex::Regex;

pub const PROPERTY_POOL: &[&str] = &[
    "has assay format",
    "has assay method",
    "has detection technology",
    "has organism",
    "has target",
    "has assay design method",
    "has readout",
    "has cell line",
    "has assay footprint",
    "has assay kit",
    "has participant",
    "has endpoint",
    "has bioassay type",
    "has substance",
    "has significant direction",
];

pub const VALUE_POOL: &[&str] = &[
    "cell-based format",
    "biochemical format",
    "reporter gene",
    "luminescence",
    "fluorescence intensity",
    "homo sapiens",
    "kinase",
    "hek293",
    "1536 well plate",
    "increase",
    "decrease",
    "ic50",
];

/// A graph with up to `max_contributions` contributions drawing statements
/// from the first `max_properties` properties.
pub fn random_graph(rng: &mut ChaCha8Rng, max_contributions: usize, max_properties: usize) -> (Graph, Vec<NodeId>) {
    let mut g = Graph::new();
    let n = rng.random_range(1..=max_contributions);
    let props = &PROPERTY_POOL[..rng.random_range(1..=max_properties.min(PROPERTY_POOL.len()))];
    let mut ids = Vec::new();
    for i in 0..n {
        let p = g.create_paper(&format!("Paper {i}"), BTreeMap::new()).unwrap();
        let c = g.create_contribution(p, &format!("Contribution {i}")).unwrap();
        for _ in 0..rng.random_range(0..=8) {
            let prop = props[rng.random_range(0..props.len())];
            let value = VALUE_POOL[rng.random_range(0..VALUE_POOL.len())];
            let _ = g.add_statement(c, prop, None, value, None);
        }
        ids.push(c);
    }
    (g, ids)
}

fn vary(rng: &mut ChaCha8Rng, s: &str) -> String {
    match rng.random_range(0..3) {
        0 => s.to_string(),
        1 => s.to_uppercase(),
        _ => format!(" {} ", s.replace(' ', "  ")),
    }
}

/// Up to `max_assays` assays whose labels come in case and spacing variants.
pub fn random_corpus(rng: &mut ChaCha8Rng, max_assays: usize) -> Vec<AnnotatedAssay> {
    const TYPES: &[&str] = &["kinase activity", "viability", "cytotoxicity", "gene expression"];
    const FORMATS: &[&str] = &["cell-based format", "biochemical format", "organism-based format"];
    let n = rng.random_range(0..=max_assays);
    (0..n)
        .map(|i| {
            let statements = (0..rng.random_range(0..=8))
                .map(|_| {
                    let p = PROPERTY_POOL[rng.random_range(0..6)];
                    let v = VALUE_POOL[rng.random_range(0..VALUE_POOL.len())];
                    AnnotatedStatement::new(vary(rng, p), vary(rng, v))
                })
                .collect();
            let t = TYPES[rng.random_range(0..TYPES.len())];
            let assay_type = rng.random_bool(0.8).then(|| vary(rng, t));
            let f = FORMATS[rng.random_range(0..FORMATS.len())];
            let assay_format = rng.random_bool(0.8).then(|| vary(rng, f));
            AnnotatedAssay {
                id: format!("R{i}"),
                title: rng.random_bool(0.5).then(|| format!("Assay {i}")),
                text: format!("assay number {i}"),
                statements,
                assay_type,
                assay_format,
            }
        })
        .collect()
}

/// Random subset (nonempty, shuffled) of `ids`.
pub fn random_selection(rng: &mut ChaCha8Rng, ids: &[NodeId]) -> Vec<NodeId> {
    let mut pick = ids.to_vec();
    pick.shuffle(rng);
    pick.truncate(rng.random_range(1..=ids.len()));
    pick
}

#[derive(Debug, Clone, PartialEq)]
pub struct BruteRow {
    pub property: String,
    pub cells: Vec<Vec<String>>,
    pub coverage: usize,
}

/// Union of the selected contributions' properties, one sorted cell per
/// column, rows by coverage then case-insensitive label.
pub fn brute_comparison(g: &Graph, ids: &[NodeId]) -> Vec<BruteRow> {
    let per_column: Vec<BTreeMap<String, Vec<String>>> = ids
        .iter()
        .map(|&c| {
            let mut m: BTreeMap<String, Vec<String>> = BTreeMap::new();
            for st in g.statements().filter(|s| s.subject == c) {
                m.entry(g.node_label(st.predicate).unwrap().to_string())
                    .or_default()
                    .push(g.object_label(&st.object).unwrap());
            }
            m
        })
        .collect();
    let union: BTreeSet<&String> = per_column.iter().flat_map(|m| m.keys()).collect();
    let mut rows: Vec<BruteRow> = union
        .into_iter()
        .map(|p| {
            let cells: Vec<Vec<String>> = per_column
                .iter()
                .map(|m| {
                    let mut v = m.get(p).cloned().unwrap_or_default();
                    v.sort();
                    v
                })
                .collect();
            BruteRow {
                property: p.clone(),
                coverage: cells.iter().filter(|c| !c.is_empty()).count(),
                cells,
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        b.coverage
            .cmp(&a.coverage)
            .then(a.property.to_lowercase().cmp(&b.property.to_lowercase()))
            .then(a.property.cmp(&b.property))
    });
    rows
}

pub fn statement_set(g: &Graph, c: NodeId, properties_only: bool) -> BTreeSet<String> {
    g.statements()
        .filter(|s| s.subject == c)
        .map(|s| {
            let p = normalize_label(g.node_label(s.predicate).unwrap());
            if properties_only {
                p
            } else {
                format!("{p} :: {}", normalize_label(&g.object_label(&s.object).unwrap()))
            }
        })
        .collect()
}

pub fn jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    let union: BTreeSet<&String> = a.union(b).collect();
    if union.is_empty() {
        return 1.0;
    }
    a.intersection(b).count() as f64 / union.len() as f64
}

/// Every other contribution scored against `query`, sorted exhaustively.
pub fn brute_similar(g: &Graph, query: NodeId, k: usize, properties_only: bool) -> Vec<(NodeId, f64)> {
    let q = statement_set(g, query, properties_only);
    let mut all: Vec<(NodeId, f64)> = g
        .contributions()
        .map(|c| c.id)
        .filter(|&c| c != query)
        .map(|c| (c, jaccard(&q, &statement_set(g, c, properties_only))))
        .collect();
    all.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    all.truncate(k);
    all
}

pub type StatsTuple = (Option<usize>, Option<usize>, f64, usize, usize, BTreeMap<String, usize>);

/// Statistics recounted from the corpus definitions: distinct normalized
/// labels per assay, and per-label assay counts.
pub fn brute_stats(corpus: &[AnnotatedAssay]) -> StatsTuple {
    let counts: Vec<usize> = corpus
        .iter()
        .map(|a| {
            a.statements
                .iter()
                .map(|s| (normalize_label(&s.property), normalize_label(&s.value)))
                .collect::<BTreeSet<_>>()
                .len()
        })
        .collect();
    let mean = if counts.is_empty() {
        0.0
    } else {
        counts.iter().sum::<usize>() as f64 / counts.len() as f64
    };
    let distinct = |f: &dyn Fn(&AnnotatedAssay) -> Option<String>| {
        corpus.iter().filter_map(f).map(|s| normalize_label(&s)).collect::<BTreeSet<_>>().len()
    };
    let mut freq = BTreeMap::new();
    for a in corpus {
        let keys: BTreeSet<String> = a
            .statements
            .iter()
            .map(|s| format!("{} :: {}", normalize_label(&s.property), normalize_label(&s.value)))
            .collect();
        for k in keys {
            *freq.entry(k).or_insert(0) += 1;
        }
    }
    (
        counts.iter().copied().min(),
        counts.iter().copied().max(),
        mean,
        distinct(&|a| a.assay_type.clone()),
        distinct(&|a| a.assay_format.clone()),
        freq,
    )
}

/// Line check for the N-Triples grammar, independent of the library parser.
pub struct NtValidator {
    line: Regex,
}

impl NtValidator {
    pub fn new() -> Self {
        let iri = r#"<(?:[^\x00-\x20<>"{}|^`\\]|\\u[0-9A-Fa-f]{4}|\\U[0-9A-Fa-f]{8})*>"#;
        let bnode = r"_:[A-Za-z0-9_](?:[A-Za-z0-9_.\-]*[A-Za-z0-9_\-])?";
        let literal = format!(
            r#""(?:[^"\\\n\r]|\\[tbnrf"'\\]|\\u[0-9A-Fa-f]{{4}}|\\U[0-9A-Fa-f]{{8}})*"(?:\^\^{iri}|@[A-Za-z]+(?:-[A-Za-z0-9]+)*)?"#
        );
        let pattern = format!(r"^[ \t]*(?:{iri}|{bnode})[ \t]+{iri}[ \t]+(?:{iri}|{bnode}|{literal})[ \t]*\.[ \t]*(?:#.*)?$");
        NtValidator {
            line: Regex::new(&pattern).unwrap(),
        }
    }

    pub fn is_valid(&self, line: &str) -> bool {
        self.line.is_match(line)
    }
}

impl Default for NtValidator {
    fn default() -> Self {
        Self::new()
    }
}

/// Assays whose labels each own a unique three-word marker phrase. Every
/// assay carries one to three labels (label `i % labels` always among them)
/// and two filler words drawn from a shared pool.
pub fn separable_corpus(seed: u64, n: usize, labels: usize) -> Vec<AnnotatedAssay> {
    const PROPERTIES: &[&str] = &["has assay method", "has detection technology", "has assay format"];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let mut chosen: Vec<usize> = (0..labels).collect();
            chosen.shuffle(&mut rng);
            chosen.truncate(rng.random_range(1..=3));
            if !chosen.contains(&(i % labels)) {
                chosen[0] = i % labels;
            }
            let mut parts: Vec<String> = chosen
                .iter()
                .map(|l| format!("marker{l}a marker{l}b marker{l}c"))
                .collect();
            for _ in 0..2 {
                parts.push(format!("filler{}", rng.random_range(0..40)));
            }
            AnnotatedAssay {
                id: format!("SYN{i:03}"),
                title: None,
                text: format!("assay of {}", parts.join(". ")),
                statements: chosen
                    .iter()
                    .map(|l| AnnotatedStatement::new(PROPERTIES[l % PROPERTIES.len()], format!("value {l}")))
                    .collect(),
                assay_type: None,
                assay_format: None,
            }
        })
        .collect()
}
