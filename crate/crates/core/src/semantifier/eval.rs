use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::labels::{build_label_space, StatementLabel};
use super::model::{train, TrainConfig};
use super::{SemantifierError, StatementScorer};
use crate::corpus::AnnotatedAssay;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssayEvaluation {
    pub assay_id: String,
    pub gold: usize,
    pub accepted: usize,
    pub true_positives: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Accepted labels absent from the gold set, left for a curator to judge.
    pub unmatched_accepted: Vec<String>,
    pub missed_gold: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub micro_precision: f64,
    pub micro_recall: f64,
    pub micro_f1: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub gold_total: usize,
    pub accepted_total: usize,
    pub true_positive_total: usize,
    pub assays: Vec<AssayEvaluation>,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn f1(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Compares accepted label keys against a gold key set.
pub fn score_assay(assay_id: &str, gold: &BTreeSet<String>, accepted: &[String]) -> AssayEvaluation {
    let accepted_set: BTreeSet<&String> = accepted.iter().collect();
    let true_positives = accepted_set.iter().filter(|k| gold.contains(**k)).count();
    let precision = ratio(true_positives, accepted_set.len());
    let recall = ratio(true_positives, gold.len());
    AssayEvaluation {
        assay_id: assay_id.to_string(),
        gold: gold.len(),
        accepted: accepted_set.len(),
        true_positives,
        precision,
        recall,
        f1: f1(precision, recall),
        unmatched_accepted: accepted_set
            .iter()
            .filter(|k| !gold.contains(**k))
            .map(|k| k.to_string())
            .collect(),
        missed_gold: gold
            .iter()
            .filter(|k| !accepted_set.contains(k))
            .cloned()
            .collect(),
    }
}

/// Pools per-assay results: micro metrics over summed counts, macro metrics
/// averaged over assays that have at least one gold label.
pub fn aggregate(assays: Vec<AssayEvaluation>) -> Metrics {
    let gold_total = assays.iter().map(|a| a.gold).sum();
    let accepted_total = assays.iter().map(|a| a.accepted).sum();
    let true_positive_total = assays.iter().map(|a| a.true_positives).sum();
    let micro_precision = ratio(true_positive_total, accepted_total);
    let micro_recall = ratio(true_positive_total, gold_total);
    let counted: Vec<&AssayEvaluation> = assays.iter().filter(|a| a.gold > 0).collect();
    let mean = |pick: fn(&AssayEvaluation) -> f64| {
        if counted.is_empty() {
            0.0
        } else {
            counted.iter().map(|a| pick(a)).sum::<f64>() / counted.len() as f64
        }
    };
    Metrics {
        micro_precision,
        micro_recall,
        micro_f1: f1(micro_precision, micro_recall),
        macro_precision: mean(|a| a.precision),
        macro_recall: mean(|a| a.recall),
        macro_f1: mean(|a| a.f1),
        gold_total,
        accepted_total,
        true_positive_total,
        assays,
    }
}

/// Runs the scorer over every gold assay and compares its accepted labels
/// with the gold statements whose property is not omitted.
pub fn evaluate<S>(scorer: &S, gold_corpus: &[AnnotatedAssay]) -> Result<Metrics, SemantifierError>
where
    S: StatementScorer + ?Sized,
{
    if gold_corpus.is_empty() {
        return Err(SemantifierError::EmptyCorpus);
    }
    let space = scorer.label_space();
    let top_k = space.len().max(1);
    let mut per_assay = Vec::with_capacity(gold_corpus.len());
    for assay in gold_corpus {
        let gold: BTreeSet<String> = space.gold_labels(assay).iter().map(StatementLabel::key).collect();
        let accepted: Vec<String> = scorer
            .predict(&assay.text, top_k)?
            .into_iter()
            .filter(|p| p.accepted_by_threshold)
            .map(|p| p.label.key())
            .collect();
        per_assay.push(score_assay(&assay.id, &gold, &accepted));
    }
    Ok(aggregate(per_assay))
}

/// Leave-one-out: each assay is scored by a model trained (label space
/// included) on all the others.
pub fn leave_one_out<S: AsRef<str>>(
    corpus: &[AnnotatedAssay],
    omitted: &[S],
    min_frequency: usize,
    config: &TrainConfig,
) -> Result<Metrics, SemantifierError> {
    if corpus.len() < 2 {
        return Err(SemantifierError::EmptyCorpus);
    }
    let mut per_assay = Vec::with_capacity(corpus.len());
    for held_out in 0..corpus.len() {
        let rest: Vec<AnnotatedAssay> = corpus
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != held_out)
            .map(|(_, a)| a.clone())
            .collect();
        let space = build_label_space(&rest, omitted.iter().map(AsRef::as_ref), min_frequency)?;
        let model = train(&rest, &space, config)?.model;
        let fold = evaluate(&model, std::slice::from_ref(&corpus[held_out]))?;
        per_assay.extend(fold.assays);
    }
    Ok(aggregate(per_assay))
}

/// Shuffles with `seed`, holds out `test_fraction` of the corpus (at least
/// one assay), trains on the rest and evaluates on the held-out part.
pub fn holdout<S: AsRef<str>>(
    corpus: &[AnnotatedAssay],
    test_fraction: f64,
    omitted: &[S],
    min_frequency: usize,
    config: &TrainConfig,
) -> Result<Metrics, SemantifierError> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(SemantifierError::InvalidConfig(format!(
            "test fraction {test_fraction} is outside (0, 1)"
        )));
    }
    if corpus.len() < 2 {
        return Err(SemantifierError::EmptyCorpus);
    }
    let mut order: Vec<usize> = (0..corpus.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(config.seed));
    let test_size = ((corpus.len() as f64 * test_fraction).round() as usize).clamp(1, corpus.len() - 1);
    let mut test_idx = order[..test_size].to_vec();
    let mut train_idx = order[test_size..].to_vec();
    test_idx.sort_unstable();
    train_idx.sort_unstable();
    let pick = |idx: &[usize]| idx.iter().map(|&i| corpus[i].clone()).collect::<Vec<_>>();
    let (train_set, test_set) = (pick(&train_idx), pick(&test_idx));
    let space = build_label_space(&train_set, omitted.iter().map(AsRef::as_ref), min_frequency)?;
    let model = train(&train_set, &space, config)?.model;
    evaluate(&model, &test_set)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn keys(items: &[&str]) -> Vec<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn sixteen_gold_fourteen_accepted_twelve_matched() {
        let gold: BTreeSet<String> = (0..16).map(|i| format!("p :: gold{i}")).collect();
        let mut accepted: Vec<String> = (0..12).map(|i| format!("p :: gold{i}")).collect();
        accepted.extend(keys(&["p :: extra1", "p :: extra2"]));
        let e = score_assay("AID1", &gold, &accepted);
        assert_eq!(e.true_positives, 12);
        assert_eq!(e.recall, 0.75);
        assert!((e.precision - 12.0 / 14.0).abs() < 1e-12);
        assert_eq!(e.unmatched_accepted, keys(&["p :: extra1", "p :: extra2"]));
        assert_eq!(e.missed_gold.len(), 4);
    }

    #[test]
    fn perfect_and_empty() {
        let gold: BTreeSet<String> = keys(&["a :: b", "c :: d"]).into_iter().collect();
        let perfect = score_assay("x", &gold, &keys(&["c :: d", "a :: b"]));
        assert_eq!((perfect.precision, perfect.recall, perfect.f1), (1.0, 1.0, 1.0));
        let none = score_assay("x", &gold, &[]);
        assert_eq!((none.precision, none.recall, none.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn macro_skips_assays_without_gold() {
        let gold: BTreeSet<String> = keys(&["a :: b"]).into_iter().collect();
        let m = aggregate(vec![
            score_assay("1", &gold, &keys(&["a :: b"])),
            score_assay("2", &BTreeSet::new(), &keys(&["z :: z"])),
        ]);
        assert_eq!(m.macro_recall, 1.0);
        assert_eq!(m.macro_precision, 1.0);
        assert_eq!(m.micro_precision, 0.5);
        assert_eq!(m.micro_recall, 1.0);
    }
}
