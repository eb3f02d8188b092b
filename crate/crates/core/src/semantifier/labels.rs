use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::SemantifierError;
use crate::corpus::AnnotatedAssay;
use crate::graph::normalize_label;

pub const KEY_SEPARATOR: &str = " :: ";

/// Properties never used as training labels: bibliographic or numeric
/// details that cannot be read off as a class.
pub const DEFAULT_OMITTED_PROPERTIES: &[&str] = &[
    "has title",
    "pubchem aid",
    "deposit date",
    "has incubation time value",
    "has concentration unit",
];

/// One predictable statement: a normalized `(property, value)` pair whose
/// subject is implicitly the contribution being described.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct StatementLabel {
    property: String,
    value: String,
}

impl StatementLabel {
    pub fn new(property: &str, value: &str) -> Result<Self, SemantifierError> {
        let property = normalize_label(property);
        let value = normalize_label(value);
        if property.is_empty() || value.is_empty() {
            return Err(SemantifierError::InvalidLabel("empty property or value".into()));
        }
        let label = StatementLabel { property, value };
        // the key must split back into exactly these parts
        match label.key().split_once(KEY_SEPARATOR) {
            Some((p, v)) if p == label.property && v == label.value && !v.contains(KEY_SEPARATOR) => Ok(label),
            _ => Err(SemantifierError::InvalidLabel(format!(
                "{:?} contains the separator {KEY_SEPARATOR:?}",
                label.key()
            ))),
        }
    }

    pub fn parse_key(key: &str) -> Result<Self, SemantifierError> {
        let (p, v) = key
            .split_once(KEY_SEPARATOR)
            .ok_or_else(|| SemantifierError::InvalidLabel(format!("{key:?} has no separator")))?;
        let label = Self::new(p, v)?;
        if label.key() != key {
            return Err(SemantifierError::InvalidLabel(format!("{key:?} is not in normalized form")));
        }
        Ok(label)
    }

    pub fn key(&self) -> String {
        format!("{}{KEY_SEPARATOR}{}", self.property, self.value)
    }

    pub fn property(&self) -> &str {
        &self.property
    }

    pub fn value(&self) -> &str {
        &self.value
    }
}

impl fmt::Display for StatementLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{KEY_SEPARATOR}{}", self.property, self.value)
    }
}

impl TryFrom<String> for StatementLabel {
    type Error = SemantifierError;

    fn try_from(key: String) -> Result<Self, Self::Error> {
        Self::parse_key(&key)
    }
}

impl From<StatementLabel> for String {
    fn from(label: StatementLabel) -> String {
        label.key()
    }
}

/// Ordered label set plus the properties excluded from it.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "LabelSpaceRecord", into = "LabelSpaceRecord")]
pub struct LabelSpace {
    labels: Vec<StatementLabel>,
    omitted: BTreeSet<String>,
    index: HashMap<StatementLabel, usize>,
}

impl PartialEq for LabelSpace {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.omitted == other.omitted
    }
}

impl LabelSpace {
    /// Builds a label space, dropping labels whose property is omitted and
    /// repeated labels (first occurrence wins).
    pub fn new<I, S>(labels: impl IntoIterator<Item = StatementLabel>, omitted: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let omitted: BTreeSet<String> = omitted.into_iter().map(|p| normalize_label(p.as_ref())).collect();
        let mut seen = HashSet::new();
        let labels: Vec<StatementLabel> = labels
            .into_iter()
            .filter(|l| !omitted.contains(l.property()) && seen.insert(l.clone()))
            .collect();
        let index = labels.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
        LabelSpace { labels, omitted, index }
    }

    pub fn labels(&self) -> &[StatementLabel] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn position(&self, label: &StatementLabel) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn omitted_properties(&self) -> &BTreeSet<String> {
        &self.omitted
    }

    pub fn is_omitted(&self, property: &str) -> bool {
        self.omitted.contains(&normalize_label(property))
    }

    /// Copy restricted to the labels for which `keep(index)` holds.
    pub(crate) fn retain_indices(&self, keep: impl Fn(usize) -> bool) -> LabelSpace {
        let labels = self
            .labels
            .iter()
            .enumerate()
            .filter(|(i, _)| keep(*i))
            .map(|(_, l)| l.clone());
        LabelSpace::new(labels, self.omitted.iter())
    }

    /// Gold labels of an assay that survive the omission filter. Pairs that
    /// cannot form a label are skipped.
    pub fn gold_labels(&self, assay: &AnnotatedAssay) -> BTreeSet<StatementLabel> {
        assay
            .statements
            .iter()
            .filter(|st| !self.is_omitted(&st.property))
            .filter_map(|st| StatementLabel::new(&st.property, &st.value).ok())
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct LabelSpaceRecord {
    labels: Vec<StatementLabel>,
    omitted_properties: BTreeSet<String>,
}

impl From<LabelSpace> for LabelSpaceRecord {
    fn from(space: LabelSpace) -> Self {
        LabelSpaceRecord {
            labels: space.labels,
            omitted_properties: space.omitted,
        }
    }
}

impl TryFrom<LabelSpaceRecord> for LabelSpace {
    type Error = SemantifierError;

    fn try_from(record: LabelSpaceRecord) -> Result<Self, Self::Error> {
        let expected = record.labels.len();
        let space = LabelSpace::new(record.labels, record.omitted_properties);
        if space.len() != expected {
            return Err(SemantifierError::MalformedModel(
                "label space repeats a label or includes an omitted property".into(),
            ));
        }
        Ok(space)
    }
}

/// All normalized pairs occurring in at least `min_frequency` assays, minus
/// omitted properties, in first-seen order.
pub fn build_label_space<I, S>(
    corpus: &[AnnotatedAssay],
    omitted: I,
    min_frequency: usize,
) -> Result<LabelSpace, SemantifierError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    if min_frequency == 0 {
        return Err(SemantifierError::InvalidConfig("min_frequency must be at least 1".into()));
    }
    if corpus.is_empty() {
        return Err(SemantifierError::EmptyCorpus);
    }
    let mut counts: IndexMap<StatementLabel, usize> = IndexMap::new();
    for assay in corpus {
        let per_assay: HashSet<StatementLabel> = assay
            .statements
            .iter()
            .filter_map(|st| StatementLabel::new(&st.property, &st.value).ok())
            .collect();
        // first-seen order follows file order, not set order
        for st in &assay.statements {
            if let Ok(label) = StatementLabel::new(&st.property, &st.value) {
                counts.entry(label).or_insert(0);
            }
        }
        for label in per_assay {
            counts[&label] += 1;
        }
    }
    let frequent = counts
        .into_iter()
        .filter(|(_, n)| *n >= min_frequency)
        .map(|(l, _)| l);
    Ok(LabelSpace::new(frequent, omitted))
}
