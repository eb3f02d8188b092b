//! State shared by the API and the command line: the store, where it lives on
//! disk, and the loaded model. Operations that touch more than the store
//! (model files, snapshot flushes) live here so both front ends share them.

use std::io::BufRead;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use assaykg::corpus::{parse_corpus, LineWarning};
use assaykg::curation::{CurationSession, Decision, ProposedStatement, SessionState};
use assaykg::graph::NodeId;
use assaykg::semantifier::{StatementLabel, TrainConfig, TrainedModel};
use assaykg::snapshot::{load_snapshot, save_snapshot};
use assaykg::store::{IngestReport, ModelRef, Store};
use serde::{Deserialize, Serialize};

use crate::error::ServiceError;

pub const DEFAULT_STORE_PATH: &str = "assaykg.store.json";
pub const STORE_ENV: &str = "ASSAYKG_STORE";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProposalView {
    pub proposal_id: String,
    pub property: String,
    pub value: String,
    pub score: f64,
    pub accepted_by_threshold: bool,
    pub decision: Decision,
}

impl From<&ProposedStatement> for ProposalView {
    fn from(p: &ProposedStatement) -> Self {
        ProposalView {
            proposal_id: p.proposal_id.clone(),
            property: p.label.property().to_string(),
            value: p.label.value().to_string(),
            score: p.score,
            // sessions only open with proposals that cleared their threshold
            accepted_by_threshold: true,
            decision: p.decision,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelView {
    pub property: String,
    pub value: String,
}

impl From<&StatementLabel> for LabelView {
    fn from(l: &StatementLabel) -> Self {
        LabelView {
            property: l.property().to_string(),
            value: l.value().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    pub session_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assay_id: Option<String>,
    pub state: SessionState,
    pub pending: usize,
    pub proposals: Vec<ProposalView>,
    pub manual_additions: Vec<LabelView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contribution_id: Option<NodeId>,
}

impl From<&CurationSession> for SessionView {
    fn from(s: &CurationSession) -> Self {
        SessionView {
            session_id: s.id().to_string(),
            assay_id: s.assay_id().map(str::to_string),
            state: s.state(),
            pending: s.proposals().iter().filter(|p| p.decision == Decision::Pending).count(),
            proposals: s.proposals().iter().map(ProposalView::from).collect(),
            manual_additions: s.manual_additions().iter().map(LabelView::from).collect(),
            contribution_id: s.contribution(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestSummary {
    #[serde(flatten)]
    pub report: IngestReport,
    pub warnings: Vec<LineWarning>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainSummary {
    pub labels: usize,
    pub dropped: Vec<StatementLabel>,
    pub warnings: Vec<String>,
    pub model: ModelRef,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemantifySummary {
    pub assay_id: String,
    pub session_id: String,
    pub proposals: Vec<ProposalView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contribution_id: Option<NodeId>,
}

/// Training settings with unset values taken from the defaults.
pub fn train_config(seed: Option<u64>, calibration_split: Option<f64>) -> TrainConfig {
    let mut config = TrainConfig::default();
    if let Some(seed) = seed {
        config.seed = seed;
    }
    if let Some(split) = calibration_split {
        config.calibration_split = split;
    }
    config
}

pub struct App {
    pub store: Store,
    path: PathBuf,
    model: Option<(String, Arc<TrainedModel>)>,
    dirty: bool,
}

impl App {
    /// Opens the snapshot at `path`, or starts empty when there is none.
    pub fn open(path: impl Into<PathBuf>) -> Result<App, ServiceError> {
        let path = path.into();
        let store = if path.exists() {
            load_snapshot(&path)?
        } else {
            Store::new()
        };
        Ok(App {
            store,
            path,
            model: None,
            dirty: false,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Where a trained model is written: beside the store, as an absolute
    /// path so the reference survives a change of working directory.
    pub fn model_path(&self) -> PathBuf {
        let mut name = self.path.as_os_str().to_owned();
        name.push(".model.json");
        let path = PathBuf::from(name);
        std::path::absolute(&path).unwrap_or(path)
    }

    pub fn mark_dirty(&mut self) {
        self.dirty = true;
    }

    pub fn is_dirty(&self) -> bool {
        self.dirty
    }

    pub fn save(&mut self) -> Result<String, ServiceError> {
        let sum = save_snapshot(&self.store, &self.path)?;
        self.dirty = false;
        Ok(sum)
    }

    /// Saves only when something changed since the last save.
    pub fn flush(&mut self) -> Result<Option<String>, ServiceError> {
        if self.dirty {
            self.save().map(Some)
        } else {
            Ok(None)
        }
    }

    /// Replaces the store with a verified snapshot from elsewhere.
    pub fn replace_from(&mut self, snapshot: &Path) -> Result<(), ServiceError> {
        self.store = load_snapshot(snapshot)?;
        self.model = None;
        self.dirty = true;
        Ok(())
    }

    pub fn ingest<R: BufRead>(&mut self, source: R) -> Result<IngestSummary, ServiceError> {
        let parsed = parse_corpus(source).map_err(assaykg::store::StoreError::from)?;
        let warnings = parsed.warnings.clone();
        let report = self.store.ingest(parsed)?;
        self.dirty = true;
        Ok(IngestSummary { report, warnings })
    }

    pub fn train(&mut self, min_frequency: usize, config: &TrainConfig) -> Result<TrainSummary, ServiceError> {
        let outcome = self.store.train(min_frequency, config)?;
        let model = self.store.attach_model(&outcome.model, &self.model_path())?;
        self.model = Some((model.sha256.clone(), Arc::new(outcome.model)));
        self.dirty = true;
        let labels = self.model.as_ref().map_or(0, |(_, m)| m.label_space().len());
        Ok(TrainSummary {
            labels,
            dropped: outcome.dropped,
            warnings: outcome.warnings,
            model,
        })
    }

    /// The referenced model, read from disk once and then reused while the
    /// reference is unchanged.
    pub fn model(&mut self) -> Result<Arc<TrainedModel>, ServiceError> {
        let current = self.store.model_ref().map(|r| r.sha256.clone());
        if let (Some((sum, model)), Some(current)) = (&self.model, &current) {
            if sum == current {
                return Ok(model.clone());
            }
        }
        let model = Arc::new(self.store.load_model()?);
        self.model = current.map(|sum| (sum, model.clone()));
        Ok(model)
    }

    pub fn semantify(
        &mut self,
        assay_id: &str,
        top_k: Option<usize>,
        auto_accept: bool,
    ) -> Result<SemantifySummary, ServiceError> {
        // an unknown assay is reported before a missing model
        if !self.store.has_assay(assay_id) {
            return Err(assaykg::store::StoreError::UnknownAssay(assay_id.to_string()).into());
        }
        let model = self.model()?;
        let outcome = self.store.semantify(assay_id, Some(model.as_ref()), top_k, auto_accept)?;
        self.dirty = true;
        Ok(SemantifySummary {
            assay_id: assay_id.to_string(),
            session_id: outcome.session_id,
            proposals: outcome.proposals.iter().map(ProposalView::from).collect(),
            contribution_id: outcome.finalized.map(|f| f.contribution),
        })
    }

    pub fn session_view(&self, id: &str) -> Result<SessionView, ServiceError> {
        Ok(SessionView::from(self.store.session(id)?))
    }
}
