//! Human-in-the-loop review of predicted statements.
//!
//! A session starts with one pending proposal per accepted prediction. The
//! curator accepts or rejects each proposal (decisions can be revised while
//! the session is open) and may add statements the model missed. Finalizing
//! writes exactly the accepted proposals plus the manual additions into the
//! graph under a new paper and contribution. Every mutation is appended to the
//! session's audit history.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError, NodeId};
use crate::semantifier::{Prediction, StatementLabel};

#[derive(Debug, Error)]
pub enum CurationError {
    #[error("assay text is empty")]
    EmptyText,
    #[error("session {0} is closed")]
    SessionClosed(String),
    #[error("unknown proposal {0}")]
    UnknownProposal(String),
    #[error("statement {0} is already part of this session")]
    DuplicateStatementInSession(String),
    #[error("property and value must both be nonempty")]
    EmptyLabel,
    #[error("invalid statement: {0}")]
    InvalidLabel(String),
    #[error("{0} proposal(s) are still pending")]
    PendingProposalsRemain(usize),
    #[error("invalid decision {0:?}")]
    InvalidDecision(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Pending,
    Accepted,
    Rejected,
}

/// A curator's call on one proposal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
}

impl FromStr for Verdict {
    type Err = CurationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "accept" | "accepted" => Ok(Verdict::Accept),
            "reject" | "rejected" => Ok(Verdict::Reject),
            _ => Err(CurationError::InvalidDecision(s.to_string())),
        }
    }
}

impl From<Verdict> for Decision {
    fn from(v: Verdict) -> Decision {
        match v {
            Verdict::Accept => Decision::Accepted,
            Verdict::Reject => Decision::Rejected,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SessionState {
    Open,
    Finalized,
    Discarded,
}

impl fmt::Display for SessionState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SessionState::Open => "open",
            SessionState::Finalized => "finalized",
            SessionState::Discarded => "discarded",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProposedStatement {
    pub proposal_id: String,
    pub label: StatementLabel,
    pub score: f64,
    pub decision: Decision,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum CurationEventKind {
    Opened { proposals: usize },
    Decided { proposal_id: String, decision: Decision },
    ManualAdded { label: StatementLabel },
    Finalized { paper: NodeId, contribution: NodeId },
    Discarded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurationEvent {
    pub seq: u64,
    pub at: DateTime<Utc>,
    #[serde(flatten)]
    pub kind: CurationEventKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalizeOutcome {
    pub paper: NodeId,
    pub contribution: NodeId,
    pub statement_count: usize,
    pub warnings: Vec<String>,
}

pub const META_SESSION: &str = "curation_session";
pub const META_SOURCE_ASSAY: &str = "source_assay";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurationSession {
    id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    assay_id: Option<String>,
    assay_text: String,
    proposals: Vec<ProposedStatement>,
    manual_additions: Vec<StatementLabel>,
    state: SessionState,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    contribution: Option<NodeId>,
    history: Vec<CurationEvent>,
}

impl CurationSession {
    /// Opens a session with one pending proposal per accepted prediction,
    /// highest score first.
    pub fn open(
        id: impl Into<String>,
        assay_id: Option<String>,
        assay_text: &str,
        predictions: &[Prediction],
    ) -> Result<Self, CurationError> {
        if assay_text.trim().is_empty() {
            return Err(CurationError::EmptyText);
        }
        let mut accepted: Vec<&Prediction> = predictions.iter().filter(|p| p.accepted_by_threshold).collect();
        accepted.sort_by(|a, b| b.score.total_cmp(&a.score));
        let mut seen = BTreeSet::new();
        let proposals: Vec<ProposedStatement> = accepted
            .into_iter()
            .filter(|p| seen.insert(p.label.clone()))
            .enumerate()
            .map(|(i, p)| ProposedStatement {
                proposal_id: format!("p{}", i + 1),
                label: p.label.clone(),
                score: p.score,
                decision: Decision::Pending,
            })
            .collect();
        let mut session = CurationSession {
            id: id.into(),
            assay_id,
            assay_text: assay_text.to_string(),
            proposals,
            manual_additions: Vec::new(),
            state: SessionState::Open,
            contribution: None,
            history: Vec::new(),
        };
        session.record(CurationEventKind::Opened {
            proposals: session.proposals.len(),
        });
        Ok(session)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn assay_id(&self) -> Option<&str> {
        self.assay_id.as_deref()
    }

    pub fn assay_text(&self) -> &str {
        &self.assay_text
    }

    pub fn state(&self) -> SessionState {
        self.state
    }

    pub fn proposals(&self) -> &[ProposedStatement] {
        &self.proposals
    }

    pub fn proposal(&self, proposal_id: &str) -> Option<&ProposedStatement> {
        self.proposals.iter().find(|p| p.proposal_id == proposal_id)
    }

    pub fn manual_additions(&self) -> &[StatementLabel] {
        &self.manual_additions
    }

    pub fn history(&self) -> &[CurationEvent] {
        &self.history
    }

    /// Contribution created by [`CurationSession::finalize`].
    pub fn contribution(&self) -> Option<NodeId> {
        self.contribution
    }

    pub fn pending_count(&self) -> usize {
        self.proposals.iter().filter(|p| p.decision == Decision::Pending).count()
    }

    pub fn accepted_labels(&self) -> impl Iterator<Item = &StatementLabel> {
        self.proposals
            .iter()
            .filter(|p| p.decision == Decision::Accepted)
            .map(|p| &p.label)
    }

    /// Labels that finalization writes: accepted proposals, then manual
    /// additions.
    pub fn final_labels(&self) -> Vec<StatementLabel> {
        self.accepted_labels().chain(&self.manual_additions).cloned().collect()
    }

    pub fn decide(&mut self, proposal_id: &str, verdict: Verdict) -> Result<&ProposedStatement, CurationError> {
        self.require_open()?;
        let idx = self
            .proposals
            .iter()
            .position(|p| p.proposal_id == proposal_id)
            .ok_or_else(|| CurationError::UnknownProposal(proposal_id.to_string()))?;
        let decision = Decision::from(verdict);
        if decision == Decision::Accepted && self.manual_additions.contains(&self.proposals[idx].label) {
            return Err(CurationError::DuplicateStatementInSession(self.proposals[idx].label.key()));
        }
        self.proposals[idx].decision = decision;
        self.record(CurationEventKind::Decided {
            proposal_id: proposal_id.to_string(),
            decision,
        });
        Ok(&self.proposals[idx])
    }

    /// Accepts every proposal still pending.
    pub fn accept_pending(&mut self) -> Result<usize, CurationError> {
        let pending: Vec<String> = self
            .proposals
            .iter()
            .filter(|p| p.decision == Decision::Pending)
            .map(|p| p.proposal_id.clone())
            .collect();
        for id in &pending {
            self.decide(id, Verdict::Accept)?;
        }
        Ok(pending.len())
    }

    pub fn add_manual(&mut self, property: &str, value: &str) -> Result<&StatementLabel, CurationError> {
        self.require_open()?;
        if property.trim().is_empty() || value.trim().is_empty() {
            return Err(CurationError::EmptyLabel);
        }
        let label = StatementLabel::new(property, value).map_err(|e| CurationError::InvalidLabel(e.to_string()))?;
        if self.manual_additions.contains(&label) || self.accepted_labels().any(|l| *l == label) {
            return Err(CurationError::DuplicateStatementInSession(label.key()));
        }
        self.manual_additions.push(label.clone());
        self.record(CurationEventKind::ManualAdded { label });
        Ok(self.manual_additions.last().expect("just pushed"))
    }

    /// Writes the curated statements into `graph` as a new paper and
    /// contribution and closes the session.
    pub fn finalize(&mut self, graph: &mut Graph, paper_title: &str) -> Result<FinalizeOutcome, CurationError> {
        self.require_open()?;
        let pending = self.pending_count();
        if pending > 0 {
            return Err(CurationError::PendingProposalsRemain(pending));
        }
        if paper_title.trim().is_empty() {
            return Err(GraphError::EmptyTitle.into());
        }
        let labels = self.final_labels();
        let mut metadata = BTreeMap::new();
        metadata.insert(META_SESSION.to_string(), self.id.clone());
        if let Some(a) = &self.assay_id {
            metadata.insert(META_SOURCE_ASSAY.to_string(), a.clone());
        }
        let paper = graph.create_paper(paper_title, metadata)?;
        let contribution = graph.create_contribution(paper, paper_title)?;
        for label in &labels {
            graph.add_statement(contribution, label.property(), None, label.value(), None)?;
        }
        let mut warnings = Vec::new();
        if labels.is_empty() {
            warnings.push(format!("session {} finalized without any statements", self.id));
        }
        self.state = SessionState::Finalized;
        self.contribution = Some(contribution);
        self.record(CurationEventKind::Finalized { paper, contribution });
        Ok(FinalizeOutcome {
            paper,
            contribution,
            statement_count: labels.len(),
            warnings,
        })
    }

    pub fn discard(&mut self) -> Result<(), CurationError> {
        self.require_open()?;
        self.state = SessionState::Discarded;
        self.record(CurationEventKind::Discarded);
        Ok(())
    }

    fn require_open(&self) -> Result<(), CurationError> {
        match self.state {
            SessionState::Open => Ok(()),
            _ => Err(CurationError::SessionClosed(self.id.clone())),
        }
    }

    fn record(&mut self, kind: CurationEventKind) {
        self.history.push(CurationEvent {
            seq: self.history.len() as u64 + 1,
            at: Utc::now(),
            kind,
        });
    }
}

/// One line of a decisions file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DecisionRecord {
    Proposal {
        proposal_id: String,
        decision: String,
    },
    Manual {
        property: String,
        value: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        decision: Option<String>,
    },
}

#[derive(Debug, Error)]
#[error("decisions line {line}: {source}")]
pub struct DecisionLineError {
    pub line: usize,
    #[source]
    pub source: CurationError,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AppliedDecisions {
    pub decisions: usize,
    pub manual_additions: usize,
}

/// Applies a JSON Lines decisions file in order, stopping at the first
/// failing line. Lines before the failure stay applied.
pub fn apply_decisions<R: BufRead>(
    session: &mut CurationSession,
    reader: R,
) -> Result<AppliedDecisions, DecisionLineError> {
    let mut applied = AppliedDecisions::default();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let fail = |source| DecisionLineError { line: line_no, source };
        let line = line.map_err(|e| fail(CurationError::InvalidDecision(e.to_string())))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: DecisionRecord =
            serde_json::from_str(&line).map_err(|e| fail(CurationError::InvalidDecision(e.to_string())))?;
        match record {
            DecisionRecord::Proposal { proposal_id, decision } => {
                let verdict = decision.parse().map_err(fail)?;
                session.decide(&proposal_id, verdict).map_err(fail)?;
                applied.decisions += 1;
            }
            DecisionRecord::Manual { property, value, decision } => {
                if let Some(d) = decision.filter(|d| !matches!(d.to_ascii_lowercase().as_str(), "add" | "accept" | "accepted")) {
                    return Err(fail(CurationError::InvalidDecision(d)));
                }
                session.add_manual(&property, &value).map_err(fail)?;
                applied.manual_additions += 1;
            }
        }
    }
    Ok(applied)
}
