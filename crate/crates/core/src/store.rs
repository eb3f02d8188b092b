//! The stateful store behind both the HTTP API and the command line: graph,
//! training corpus, submitted assays, curation sessions and the model
//! reference. Every user-visible operation goes through a method here.

use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::compare::{build_comparison, find_similar, CompareError, ComparisonTable, SimilarityMode, SimilarityResult};
use crate::corpus::{
    assays_from_graph, compute_stats, to_graph, AnnotatedAssay, CorpusError, CorpusStats, ParsedCorpus, META_ASSAY_ID,
};
use crate::curation::{CurationError, CurationSession, FinalizeOutcome, ProposedStatement, Verdict};
use crate::graph::{Graph, GraphError, NodeId, NodeKind};
use crate::ntriples::{export_ntriples, import_ntriples, ImportError, ImportMode, ImportReport, InvalidBaseUri};
use crate::semantifier::{
    build_label_space, holdout, train, Metrics, SemantifierError, StatementLabel, StatementScorer, TrainConfig,
    TrainOutcome, TrainedModel, DEFAULT_OMITTED_PROPERTIES,
};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("assay text is empty")]
    EmptyText,
    #[error("unknown assay {0}")]
    UnknownAssay(String),
    #[error("unknown session {0}")]
    UnknownSession(String),
    #[error("no trained model is available: {0}")]
    ModelUnavailable(String),
    #[error("model file {path} does not match its recorded checksum")]
    ModelChecksumMismatch { path: String },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Semantifier(#[from] SemantifierError),
    #[error(transparent)]
    Curation(#[from] CurationError),
    #[error(transparent)]
    Compare(#[from] CompareError),
    #[error(transparent)]
    Import(#[from] ImportError),
    #[error(transparent)]
    InvalidBaseUri(#[from] InvalidBaseUri),
}

pub type Result<T, E = StoreError> = std::result::Result<T, E>;

/// Where the trained model lives and what its bytes hash to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelRef {
    pub path: String,
    pub sha256: String,
}

/// An assay submitted for semantification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubmittedAssay {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub session: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestReport {
    pub added: usize,
    pub skipped: Vec<String>,
    pub contributions: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemantifyOutcome {
    pub session_id: String,
    pub proposals: Vec<ProposedStatement>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finalized: Option<FinalizeOutcome>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Store {
    pub graph: Graph,
    corpus: Vec<AnnotatedAssay>,
    assays: IndexMap<String, SubmittedAssay>,
    sessions: IndexMap<String, CurationSession>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    model: Option<ModelRef>,
    next_assay: u64,
    next_session: u64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Store {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn corpus(&self) -> &[AnnotatedAssay] {
        &self.corpus
    }

    pub fn assays(&self) -> impl Iterator<Item = &SubmittedAssay> {
        self.assays.values()
    }

    pub fn assay(&self, id: &str) -> Option<&SubmittedAssay> {
        self.assays.get(id)
    }

    pub fn sessions(&self) -> impl Iterator<Item = &CurationSession> {
        self.sessions.values()
    }

    pub fn session(&self, id: &str) -> Result<&CurationSession> {
        self.sessions.get(id).ok_or_else(|| StoreError::UnknownSession(id.to_string()))
    }

    fn session_mut(&mut self, id: &str) -> Result<&mut CurationSession> {
        self.sessions.get_mut(id).ok_or_else(|| StoreError::UnknownSession(id.to_string()))
    }

    pub fn model_ref(&self) -> Option<&ModelRef> {
        self.model.as_ref()
    }

    /// Adds the parsed assays to the training corpus and to the graph, one
    /// paper and contribution each. Ids already in the corpus are skipped.
    pub fn ingest(&mut self, parsed: ParsedCorpus) -> Result<IngestReport> {
        let mut report = IngestReport {
            added: 0,
            skipped: Vec::new(),
            contributions: Vec::new(),
        };
        let mut graph = self.graph.clone();
        let mut added = Vec::new();
        for assay in parsed.assays {
            if self.corpus.iter().chain(&added).any(|a: &AnnotatedAssay| a.id == assay.id) {
                report.skipped.push(assay.id);
                continue;
            }
            let (_, contribution) = to_graph(&assay, &mut graph)?;
            report.contributions.push(contribution);
            added.push(assay);
        }
        report.added = added.len();
        self.graph = graph;
        self.corpus.extend(added);
        Ok(report)
    }

    /// Registers new assay text. Identical texts get distinct ids.
    pub fn submit_assay(&mut self, title: Option<&str>, text: &str) -> Result<String> {
        if text.trim().is_empty() {
            return Err(StoreError::EmptyText);
        }
        let id = loop {
            self.next_assay += 1;
            let candidate = format!("A{}", self.next_assay);
            if !self.assays.contains_key(&candidate) && !self.corpus.iter().any(|a| a.id == candidate) {
                break candidate;
            }
        };
        self.assays.insert(
            id.clone(),
            SubmittedAssay {
                id: id.clone(),
                title: title.map(str::trim).filter(|t| !t.is_empty()).map(str::to_string),
                text: text.to_string(),
                session: None,
            },
        );
        Ok(id)
    }

    /// True for submitted assays and for corpus assays.
    pub fn has_assay(&self, assay_id: &str) -> bool {
        self.assay_text(assay_id).is_ok()
    }

    fn assay_text(&self, assay_id: &str) -> Result<(String, Option<String>)> {
        if let Some(a) = self.assays.get(assay_id) {
            return Ok((a.text.clone(), a.title.clone()));
        }
        self.corpus
            .iter()
            .find(|a| a.id == assay_id)
            .map(|a| (a.text.clone(), a.title.clone()))
            .ok_or_else(|| StoreError::UnknownAssay(assay_id.to_string()))
    }

    /// Runs the scorer over an assay and opens a curation session with its
    /// accepted predictions. `top_k` defaults to the whole label space. With
    /// `auto_accept` every proposal is accepted and the session finalized.
    pub fn semantify(
        &mut self,
        assay_id: &str,
        scorer: Option<&dyn StatementScorer>,
        top_k: Option<usize>,
        auto_accept: bool,
    ) -> Result<SemantifyOutcome> {
        let (text, _) = self.assay_text(assay_id)?;
        let scorer = scorer.ok_or_else(|| StoreError::ModelUnavailable("train or load a model first".into()))?;
        let top_k = top_k.unwrap_or_else(|| scorer.label_space().len().max(1));
        let predictions = scorer.predict(&text, top_k)?;
        self.next_session += 1;
        let session_id = format!("S{}", self.next_session);
        let session = CurationSession::open(session_id.clone(), Some(assay_id.to_string()), &text, &predictions)?;
        let proposals = session.proposals().to_vec();
        self.sessions.insert(session_id.clone(), session);
        if let Some(a) = self.assays.get_mut(assay_id) {
            a.session = Some(session_id.clone());
        }
        let finalized = if auto_accept {
            self.session_mut(&session_id)?.accept_pending()?;
            Some(self.finalize(&session_id, None)?)
        } else {
            None
        };
        Ok(SemantifyOutcome {
            session_id,
            proposals,
            finalized,
        })
    }

    pub fn decide(&mut self, session_id: &str, proposal_id: &str, verdict: Verdict) -> Result<ProposedStatement> {
        Ok(self.session_mut(session_id)?.decide(proposal_id, verdict)?.clone())
    }

    pub fn add_manual(&mut self, session_id: &str, property: &str, value: &str) -> Result<StatementLabel> {
        Ok(self.session_mut(session_id)?.add_manual(property, value)?.clone())
    }

    pub fn discard(&mut self, session_id: &str) -> Result<()> {
        Ok(self.session_mut(session_id)?.discard()?)
    }

    /// Finalizes a session; without a title the assay title (or id) is used.
    pub fn finalize(&mut self, session_id: &str, paper_title: Option<&str>) -> Result<FinalizeOutcome> {
        let session = self.session(session_id)?;
        let title = match paper_title.map(str::trim).filter(|t| !t.is_empty()) {
            Some(t) => t.to_string(),
            None => {
                let assay = session.assay_id().map(str::to_string);
                let from_assay = assay.as_deref().and_then(|a| self.assay_text(a).ok()).and_then(|(_, t)| t);
                from_assay.or(assay).unwrap_or_else(|| session_id.to_string())
            }
        };
        let session = self.sessions.get_mut(session_id).expect("checked above");
        Ok(session.finalize(&mut self.graph, &title)?)
    }

    /// Resolves a contribution id (`C3`), a corpus assay id, or a submitted
    /// assay id whose session was finalized.
    pub fn resolve_contribution(&self, reference: &str) -> Result<NodeId, CompareError> {
        let unknown = || CompareError::UnknownContribution(reference.to_string());
        if let Ok(id) = reference.parse::<NodeId>() {
            return match id.kind() {
                NodeKind::Contribution if self.graph.contribution(id).is_some() => Ok(id),
                _ => Err(unknown()),
            };
        }
        if let Some(a) = self.assays.get(reference) {
            return a
                .session
                .as_ref()
                .and_then(|s| self.sessions.get(s))
                .and_then(CurationSession::contribution)
                .ok_or_else(unknown);
        }
        self.graph
            .papers()
            .find(|p| p.metadata.get(META_ASSAY_ID).map(String::as_str) == Some(reference))
            .and_then(|p| self.graph.contributions_of(p.id).next())
            .map(|c| c.id)
            .ok_or_else(unknown)
    }

    pub fn compare(&self, references: &[&str]) -> Result<ComparisonTable> {
        let ids = references
            .iter()
            .map(|r| self.resolve_contribution(r))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(build_comparison(&self.graph, &ids)?)
    }

    pub fn similar(&self, reference: &str, k: usize, mode: SimilarityMode) -> Result<Vec<SimilarityResult>> {
        let id = self.resolve_contribution(reference)?;
        Ok(find_similar(&self.graph, id, k, mode)?)
    }

    /// Statistics over every contribution in the graph.
    pub fn stats(&self) -> CorpusStats {
        compute_stats(&assays_from_graph(&self.graph))
    }

    pub fn train(&self, min_frequency: usize, config: &TrainConfig) -> Result<TrainOutcome> {
        let space = build_label_space(&self.corpus, DEFAULT_OMITTED_PROPERTIES, min_frequency)?;
        Ok(train(&self.corpus, &space, config)?)
    }

    pub fn evaluate(&self, test_fraction: f64, min_frequency: usize, config: &TrainConfig) -> Result<Metrics> {
        Ok(holdout(
            &self.corpus,
            test_fraction,
            DEFAULT_OMITTED_PROPERTIES,
            min_frequency,
            config,
        )?)
    }

    /// Writes `model` to `path` and records the reference.
    pub fn attach_model(&mut self, model: &TrainedModel, path: &Path) -> Result<ModelRef> {
        let bytes = model.to_bytes();
        std::fs::write(path, &bytes).map_err(SemantifierError::Io)?;
        let reference = ModelRef {
            path: path.to_string_lossy().into_owned(),
            sha256: sha256_hex(&bytes),
        };
        self.model = Some(reference.clone());
        Ok(reference)
    }

    /// Loads the referenced model, checking its bytes against the recorded
    /// checksum.
    pub fn load_model(&self) -> Result<TrainedModel> {
        let reference = self
            .model
            .as_ref()
            .ok_or_else(|| StoreError::ModelUnavailable("no model has been trained".into()))?;
        let path = PathBuf::from(&reference.path);
        let bytes = std::fs::read(&path)
            .map_err(|e| StoreError::ModelUnavailable(format!("cannot read {}: {e}", path.display())))?;
        if sha256_hex(&bytes) != reference.sha256 {
            return Err(StoreError::ModelChecksumMismatch {
                path: reference.path.clone(),
            });
        }
        Ok(TrainedModel::from_bytes(&bytes)?)
    }

    pub fn export_ntriples(&self, base_uri: &str) -> Result<String> {
        Ok(export_ntriples(&self.graph, base_uri)?)
    }

    pub fn import_ntriples(&mut self, text: &[u8], base_uri: &str, mode: ImportMode) -> Result<ImportReport> {
        Ok(import_ntriples(&mut self.graph, text, base_uri, mode)?)
    }
}
