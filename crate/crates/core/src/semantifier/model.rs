use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::labels::{LabelSpace, StatementLabel};
use super::tokenize::tokenize;
use super::{SemantifierError, StatementScorer};
use crate::corpus::AnnotatedAssay;

pub const MODEL_FORMAT_VERSION: u64 = 1;

/// Threshold for labels with too few calibration positives.
pub const DEFAULT_THRESHOLD: f64 = 0.30;

/// Fewer calibration positives than this fall back to [`DEFAULT_THRESHOLD`].
pub const MIN_CALIBRATION_POSITIVES: usize = 3;

type SparseVector = Vec<(u32, f64)>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub seed: u64,
    /// Fraction of the corpus held out for threshold calibration, in `[0, 1)`.
    pub calibration_split: f64,
    /// Free-form creation stamp carried into the model metadata.
    #[serde(default)]
    pub created_at: Option<String>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            seed: 42,
            calibration_split: 0.2,
            created_at: None,
        }
    }
}

/// Token index with document frequencies and smoothed IDF weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VocabularyRecord", into = "VocabularyRecord")]
pub struct TermVocabulary {
    terms: Vec<String>,
    document_frequency: Vec<u32>,
    documents: usize,
    idf: Vec<f64>,
    index: HashMap<String, u32>,
}

impl TermVocabulary {
    fn build(documents: &[Vec<String>]) -> Self {
        let mut df: BTreeMap<&str, u32> = BTreeMap::new();
        for doc in documents {
            let mut distinct: Vec<&str> = doc.iter().map(String::as_str).collect();
            distinct.sort_unstable();
            distinct.dedup();
            for t in distinct {
                *df.entry(t).or_insert(0) += 1;
            }
        }
        let (terms, document_frequency) = df.into_iter().map(|(t, n)| (t.to_string(), n)).unzip();
        Self::assemble(terms, document_frequency, documents.len())
    }

    fn assemble(terms: Vec<String>, document_frequency: Vec<u32>, documents: usize) -> Self {
        let n = documents as f64;
        let idf = document_frequency
            .iter()
            .map(|&df| ((n + 1.0) / (df as f64 + 1.0)).ln() + 1.0)
            .collect();
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
        TermVocabulary {
            terms,
            document_frequency,
            documents,
            idf,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term(&self, index: u32) -> Option<&str> {
        self.terms.get(index as usize).map(String::as_str)
    }

    pub fn index_of(&self, term: &str) -> Option<u32> {
        self.index.get(term).copied()
    }

    pub fn idf(&self, term: &str) -> Option<f64> {
        self.index_of(term).map(|i| self.idf[i as usize])
    }

    pub fn document_frequency(&self, term: &str) -> Option<u32> {
        self.index_of(term).map(|i| self.document_frequency[i as usize])
    }

    /// L2-normalized TF-IDF vector over in-vocabulary tokens; empty when no
    /// token is known.
    fn vectorize_tokens(&self, tokens: &[String]) -> SparseVector {
        let mut counts: BTreeMap<u32, f64> = BTreeMap::new();
        for t in tokens {
            if let Some(i) = self.index_of(t) {
                *counts.entry(i).or_insert(0.0) += 1.0;
            }
        }
        let vector = counts
            .into_iter()
            .map(|(i, tf)| (i, tf * self.idf[i as usize]))
            .collect();
        l2_normalize(vector)
    }

    fn vectorize(&self, text: &str) -> SparseVector {
        self.vectorize_tokens(&tokenize(text))
    }
}

#[derive(Serialize, Deserialize)]
struct VocabularyRecord {
    documents: usize,
    terms: Vec<String>,
    document_frequency: Vec<u32>,
}

impl From<TermVocabulary> for VocabularyRecord {
    fn from(v: TermVocabulary) -> Self {
        VocabularyRecord {
            documents: v.documents,
            terms: v.terms,
            document_frequency: v.document_frequency,
        }
    }
}

impl TryFrom<VocabularyRecord> for TermVocabulary {
    type Error = SemantifierError;

    fn try_from(r: VocabularyRecord) -> Result<Self, Self::Error> {
        if r.terms.len() != r.document_frequency.len() {
            return Err(SemantifierError::MalformedModel("vocabulary length mismatch".into()));
        }
        if r.terms.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SemantifierError::MalformedModel("vocabulary terms not strictly sorted".into()));
        }
        Ok(TermVocabulary::assemble(r.terms, r.document_frequency, r.documents))
    }
}

fn l2_normalize(mut v: SparseVector) -> SparseVector {
    let norm = v.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Vec::new();
    }
    for (_, w) in &mut v {
        *w /= norm;
    }
    v
}

fn dot(a: &[(u32, f64)], b: &[(u32, f64)]) -> f64 {
    let (mut i, mut j, mut sum) = (0, 0, 0.0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                sum += a[i].1 * b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    sum
}

/// Maps a cosine into `[0, 1]`.
fn unit_score(cosine: f64) -> f64 {
    ((1.0 + cosine.clamp(-1.0, 1.0)) / 2.0).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdSource {
    Calibrated,
    Fallback,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMetadata {
    pub corpus_size: usize,
    pub training_size: usize,
    pub calibration_size: usize,
    pub seed: u64,
    pub calibration_split: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created_at: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: StatementLabel,
    pub score: f64,
    pub accepted_by_threshold: bool,
}

/// Immutable trained classifier: one centroid and one threshold per label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelRecord", into = "ModelRecord")]
pub struct TrainedModel {
    label_space: LabelSpace,
    vocabulary: TermVocabulary,
    centroids: Vec<SparseVector>,
    thresholds: Vec<f64>,
    threshold_sources: Vec<ThresholdSource>,
    metadata: TrainingMetadata,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: TrainedModel,
    /// Labels with no positives in the training split.
    pub dropped: Vec<StatementLabel>,
    pub warnings: Vec<String>,
}

/// Fits vocabulary and centroids on the training split, then calibrates
/// per-label thresholds on the calibration split.
pub fn train(
    corpus: &[AnnotatedAssay],
    label_space: &LabelSpace,
    config: &TrainConfig,
) -> Result<TrainOutcome, SemantifierError> {
    if corpus.is_empty() {
        return Err(SemantifierError::EmptyCorpus);
    }
    if !(0.0..1.0).contains(&config.calibration_split) {
        return Err(SemantifierError::InvalidConfig(format!(
            "calibration_split {} is outside [0, 1)",
            config.calibration_split
        )));
    }
    if let Some(a) = corpus.iter().find(|a| a.text.trim().is_empty()) {
        return Err(SemantifierError::EmptyAssayText(a.id.clone()));
    }

    let mut order: Vec<usize> = (0..corpus.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(config.seed));
    let calibration_size = (corpus.len() as f64 * config.calibration_split).floor() as usize;
    let mut calibration_idx = order[..calibration_size].to_vec();
    let mut training_idx = order[calibration_size..].to_vec();
    calibration_idx.sort_unstable();
    training_idx.sort_unstable();

    let training_tokens: Vec<Vec<String>> = training_idx.iter().map(|&i| tokenize(&corpus[i].text)).collect();
    let vocabulary = TermVocabulary::build(&training_tokens);
    let training_vectors: Vec<SparseVector> = training_tokens.iter().map(|t| vocabulary.vectorize_tokens(t)).collect();
    let gold = |i: usize| label_space.gold_labels(&corpus[i]);
    let training_gold: Vec<_> = training_idx.iter().map(|&i| gold(i)).collect();

    let mut warnings = Vec::new();
    let mut dropped = Vec::new();
    let mut kept = Vec::new();
    let mut centroids = Vec::new();
    for (li, label) in label_space.labels().iter().enumerate() {
        let mut sum: BTreeMap<u32, f64> = BTreeMap::new();
        let mut positives = 0;
        for (vector, labels) in training_vectors.iter().zip(&training_gold) {
            if labels.contains(label) {
                positives += 1;
                for &(i, w) in vector {
                    *sum.entry(i).or_insert(0.0) += w;
                }
            }
        }
        let centroid = l2_normalize(sum.into_iter().collect());
        if positives == 0 || centroid.is_empty() {
            warnings.push(format!("label {label} has no positives in the training split; dropped"));
            dropped.push(label.clone());
            continue;
        }
        kept.push(li);
        centroids.push(centroid);
    }
    let final_space = label_space.retain_indices(|i| kept.binary_search(&i).is_ok());

    let calibration: Vec<(SparseVector, _)> = calibration_idx
        .iter()
        .map(|&i| (vocabulary.vectorize(&corpus[i].text), gold(i)))
        .collect();
    let mut thresholds = Vec::with_capacity(centroids.len());
    let mut threshold_sources = Vec::with_capacity(centroids.len());
    for (label, centroid) in final_space.labels().iter().zip(&centroids) {
        let scored: Vec<(f64, bool)> = calibration
            .iter()
            .map(|(v, labels)| {
                let score = if v.is_empty() { 0.0 } else { unit_score(dot(v, centroid)) };
                (score, labels.contains(label))
            })
            .collect();
        let positives = scored.iter().filter(|(_, p)| *p).count();
        if positives < MIN_CALIBRATION_POSITIVES {
            thresholds.push(DEFAULT_THRESHOLD);
            threshold_sources.push(ThresholdSource::Fallback);
        } else {
            thresholds.push(best_f1_threshold(scored));
            threshold_sources.push(ThresholdSource::Calibrated);
        }
    }

    Ok(TrainOutcome {
        model: TrainedModel {
            label_space: final_space,
            vocabulary,
            centroids,
            thresholds,
            threshold_sources,
            metadata: TrainingMetadata {
                corpus_size: corpus.len(),
                training_size: training_idx.len(),
                calibration_size,
                seed: config.seed,
                calibration_split: config.calibration_split,
                created_at: config.created_at.clone(),
            },
        },
        dropped,
        warnings,
    })
}

/// Threshold maximizing F1 when accepting every score at or above it.
///
/// The cut sits halfway between the lowest accepted score and the next lower
/// score; among equal F1 values the highest cut wins.
fn best_f1_threshold(mut scored: Vec<(f64, bool)>) -> f64 {
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let total_pos = scored.iter().filter(|(_, p)| *p).count();
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut best_f1 = -1.0;
    let mut best = DEFAULT_THRESHOLD;
    let mut i = 0;
    while i < scored.len() {
        let cut = scored[i].0;
        while i < scored.len() && scored[i].0 == cut {
            if scored[i].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        let f1 = 2.0 * tp as f64 / (2 * tp + fp + (total_pos - tp)) as f64;
        if f1 > best_f1 {
            best_f1 = f1;
            best = match scored.get(i) {
                Some(&(next, _)) => (cut + next) / 2.0,
                None => cut,
            };
        }
    }
    best.clamp(f64::EPSILON, 1.0)
}

impl TrainedModel {
    pub fn label_space(&self) -> &LabelSpace {
        &self.label_space
    }

    pub fn vocabulary(&self) -> &TermVocabulary {
        &self.vocabulary
    }

    pub fn metadata(&self) -> &TrainingMetadata {
        &self.metadata
    }

    pub fn threshold(&self, label: &StatementLabel) -> Option<f64> {
        self.label_space.position(label).map(|i| self.thresholds[i])
    }

    pub fn threshold_source(&self, label: &StatementLabel) -> Option<ThresholdSource> {
        self.label_space.position(label).map(|i| self.threshold_sources[i])
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    /// Centroid of `label` as `(term, weight)` pairs in vocabulary order.
    pub fn centroid(&self, label: &StatementLabel) -> Option<Vec<(&str, f64)>> {
        let i = self.label_space.position(label)?;
        Some(
            self.centroids[i]
                .iter()
                .map(|&(t, w)| (self.vocabulary.terms[t as usize].as_str(), w))
                .collect(),
        )
    }

    /// Score of every label for `text`, in label-space order; `None` when the
    /// text has no in-vocabulary token.
    pub fn scores(&self, text: &str) -> Option<Vec<f64>> {
        let v = self.vocabulary.vectorize(text);
        if v.is_empty() {
            return None;
        }
        Some(self.centroids.iter().map(|c| unit_score(dot(&v, c))).collect())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut bytes = serde_json::to_vec(self).expect("model serializes");
        bytes.push(b'\n');
        bytes
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, SemantifierError> {
        #[derive(Deserialize)]
        struct Header {
            format_version: u64,
        }
        let header: Header =
            serde_json::from_slice(bytes).map_err(|e| SemantifierError::MalformedModel(e.to_string()))?;
        if header.format_version != MODEL_FORMAT_VERSION {
            return Err(SemantifierError::VersionMismatch {
                found: header.format_version,
                expected: MODEL_FORMAT_VERSION,
            });
        }
        serde_json::from_slice(bytes).map_err(|e| SemantifierError::MalformedModel(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<(), SemantifierError> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, SemantifierError> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}

impl StatementScorer for TrainedModel {
    fn label_space(&self) -> &LabelSpace {
        &self.label_space
    }

    fn predict(&self, text: &str, top_k: usize) -> Result<Vec<Prediction>, SemantifierError> {
        if text.trim().is_empty() {
            return Err(SemantifierError::EmptyText);
        }
        if top_k == 0 {
            return Err(SemantifierError::InvalidTopK);
        }
        let Some(scores) = self.scores(text) else {
            return Ok(Vec::new());
        };
        let mut ranked: Vec<usize> = (0..scores.len()).collect();
        // stable sort keeps label-space order among equal scores
        ranked.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
        Ok(ranked
            .into_iter()
            .take(top_k)
            .map(|i| Prediction {
                label: self.label_space.labels()[i].clone(),
                score: scores[i],
                accepted_by_threshold: scores[i] >= self.thresholds[i],
            })
            .collect())
    }
}

#[derive(Serialize, Deserialize)]
struct ModelRecord {
    format_version: u64,
    metadata: TrainingMetadata,
    label_space: LabelSpace,
    thresholds: Vec<f64>,
    threshold_sources: Vec<ThresholdSource>,
    vocabulary: TermVocabulary,
    centroids: Vec<SparseVector>,
}

impl From<TrainedModel> for ModelRecord {
    fn from(m: TrainedModel) -> Self {
        ModelRecord {
            format_version: MODEL_FORMAT_VERSION,
            metadata: m.metadata,
            label_space: m.label_space,
            thresholds: m.thresholds,
            threshold_sources: m.threshold_sources,
            vocabulary: m.vocabulary,
            centroids: m.centroids,
        }
    }
}

impl TryFrom<ModelRecord> for TrainedModel {
    type Error = SemantifierError;

    fn try_from(r: ModelRecord) -> Result<Self, Self::Error> {
        let n = r.label_space.len();
        if r.format_version != MODEL_FORMAT_VERSION {
            return Err(SemantifierError::VersionMismatch {
                found: r.format_version,
                expected: MODEL_FORMAT_VERSION,
            });
        }
        if r.centroids.len() != n || r.thresholds.len() != n || r.threshold_sources.len() != n {
            return Err(SemantifierError::MalformedModel(
                "labels, centroids and thresholds differ in length".into(),
            ));
        }
        if r.thresholds.iter().any(|t| !(*t > 0.0 && *t <= 1.0)) {
            return Err(SemantifierError::MalformedModel("threshold outside (0, 1]".into()));
        }
        let vocab_len = r.vocabulary.len() as u32;
        if r.centroids.iter().flatten().any(|(i, _)| *i >= vocab_len) {
            return Err(SemantifierError::MalformedModel("centroid term out of range".into()));
        }
        Ok(TrainedModel {
            label_space: r.label_space,
            vocabulary: r.vocabulary,
            centroids: r.centroids,
            thresholds: r.thresholds,
            threshold_sources: r.threshold_sources,
            metadata: r.metadata,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::AnnotatedStatement;
    use crate::semantifier::build_label_space;

    fn assay(id: &str, text: &str, pairs: &[(&str, &str)]) -> AnnotatedAssay {
        AnnotatedAssay {
            id: id.into(),
            title: None,
            text: text.into(),
            statements: pairs.iter().map(|(p, v)| AnnotatedStatement::new(*p, *v)).collect(),
            assay_type: None,
            assay_format: None,
        }
    }

    fn no_split(seed: u64) -> TrainConfig {
        TrainConfig {
            seed,
            calibration_split: 0.0,
            created_at: None,
        }
    }

    #[test]
    fn idf_formula() {
        let docs = vec![vec!["aa".to_string(), "bb".to_string()], vec!["aa".to_string()]];
        let v = TermVocabulary::build(&docs);
        // ln(3/3) + 1 and ln(3/2) + 1
        assert_eq!(v.idf("aa"), Some(1.0));
        assert!((v.idf("bb").unwrap() - (1.5f64.ln() + 1.0)).abs() < 1e-15);
        assert_eq!(v.document_frequency("aa"), Some(2));
    }

    #[test]
    fn best_threshold_separates() {
        let t = best_f1_threshold(vec![(0.9, true), (0.8, true), (0.6, false), (0.55, false), (0.85, true)]);
        assert!((t - 0.7).abs() < 1e-12, "{t}");
        // a positive below a negative: accepting all three positives gives F1 6/7
        let t = best_f1_threshold(vec![(0.9, true), (0.8, false), (0.7, true), (0.6, true), (0.5, false)]);
        assert!((t - 0.55).abs() < 1e-12, "{t}");
    }

    #[test]
    fn calibration_split_zero_uses_fallback() {
        let corpus = [
            assay("a", "luciferase reporter cells", &[("has assay method", "reporter gene")]),
            assay("b", "kinase phosphorylation", &[("has assay method", "kinase")]),
        ];
        let space = build_label_space(&corpus, Vec::<String>::new(), 1).unwrap();
        let model = train(&corpus, &space, &no_split(1)).unwrap().model;
        assert!(model.thresholds().iter().all(|&t| t == DEFAULT_THRESHOLD));
        assert_eq!(model.metadata().calibration_size, 0);
    }

    #[test]
    fn invalid_inputs() {
        let space = LabelSpace::new(Vec::new(), Vec::<String>::new());
        assert!(matches!(train(&[], &space, &no_split(0)), Err(SemantifierError::EmptyCorpus)));
        let blank = [assay("x", "  ", &[])];
        assert!(matches!(
            train(&blank, &space, &no_split(0)),
            Err(SemantifierError::EmptyAssayText(_))
        ));
        let ok = [assay("x", "text", &[])];
        let bad = TrainConfig {
            calibration_split: 1.0,
            ..no_split(0)
        };
        assert!(matches!(train(&ok, &space, &bad), Err(SemantifierError::InvalidConfig(_))));
    }

    #[test]
    fn degenerate_label_dropped() {
        let corpus = [
            assay("a", "alpha beta", &[("p", "one")]),
            assay("b", "gamma delta", &[("p", "two")]),
            assay("c", "epsilon zeta", &[("p", "two")]),
        ];
        let space = build_label_space(&corpus, Vec::<String>::new(), 1).unwrap();
        // with a 1/3 calibration split exactly one assay is held out
        let mut dropped_any = false;
        for seed in 0..20 {
            let cfg = TrainConfig {
                seed,
                calibration_split: 0.34,
                created_at: None,
            };
            let out = train(&corpus, &space, &cfg).unwrap();
            assert_eq!(out.model.label_space().len() + out.dropped.len(), 2);
            assert_eq!(out.dropped.len(), out.warnings.len());
            dropped_any |= !out.dropped.is_empty();
        }
        assert!(dropped_any);
    }

    #[test]
    fn predict_contract() {
        let corpus = [
            assay("a", "luciferase reporter gene", &[("m", "reporter")]),
            assay("b", "kinase activity", &[("m", "kinase")]),
        ];
        let space = build_label_space(&corpus, Vec::<String>::new(), 1).unwrap();
        let model = train(&corpus, &space, &no_split(0)).unwrap().model;
        assert!(matches!(model.predict("  ", 3), Err(SemantifierError::EmptyText)));
        assert!(matches!(model.predict("kinase", 0), Err(SemantifierError::InvalidTopK)));
        assert!(model.predict("unrelated words only", 5).unwrap().is_empty());
        let top = model.predict("kinase", 1).unwrap();
        assert_eq!(top.len(), 1);
        assert_eq!(top[0].label.value(), "kinase");
        let all = model.predict("kinase", 10).unwrap();
        assert_eq!(all.len(), 2);
        assert!(all[0].score >= all[1].score);
        assert!(all.iter().all(|p| (0.0..=1.0).contains(&p.score)));
    }

    #[test]
    fn bytes_round_trip_and_version_check() {
        let corpus = [assay("a", "luciferase reporter", &[("m", "reporter")])];
        let space = build_label_space(&corpus, Vec::<String>::new(), 1).unwrap();
        let model = train(&corpus, &space, &no_split(0)).unwrap().model;
        let bytes = model.to_bytes();
        let back = TrainedModel::from_bytes(&bytes).unwrap();
        assert_eq!(back, model);
        assert_eq!(back.to_bytes(), bytes);
        let text = String::from_utf8(bytes).unwrap();
        assert!(text.starts_with("{\"format_version\":1,"));
        let bumped = text.replacen("\"format_version\":1", "\"format_version\":2", 1);
        assert!(matches!(
            TrainedModel::from_bytes(bumped.as_bytes()),
            Err(SemantifierError::VersionMismatch { found: 2, .. })
        ));
    }
}
