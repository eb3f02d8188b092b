//! One error type for the API and the command line. Each module error maps to
//! a fixed (status, code) pair; the code is the module's variant name.

use assaykg::compare::CompareError;
use assaykg::corpus::CorpusError;
use assaykg::curation::CurationError;
use assaykg::graph::GraphError;
use assaykg::ntriples::ImportError;
use assaykg::semantifier::SemantifierError;
use assaykg::snapshot::SnapshotError;
use assaykg::store::StoreError;
use axum::http::StatusCode;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Snapshot(#[from] SnapshotError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    InvalidRequest(String),
}

impl ServiceError {
    pub fn io(path: impl std::fmt::Display) -> impl FnOnce(std::io::Error) -> ServiceError {
        let path = path.to_string();
        move |source| ServiceError::Io { path, source }
    }

    pub fn code(&self) -> &'static str {
        self.classify().1
    }

    pub fn status(&self) -> StatusCode {
        self.classify().0
    }

    pub fn classify(&self) -> (StatusCode, &'static str) {
        match self {
            ServiceError::Store(e) => store(e),
            ServiceError::Snapshot(e) => snapshot(e),
            ServiceError::Io { .. } => (StatusCode::INTERNAL_SERVER_ERROR, "IoFailure"),
            ServiceError::InvalidRequest(_) => (StatusCode::BAD_REQUEST, "InvalidRequest"),
        }
    }
}

impl From<CurationError> for ServiceError {
    fn from(e: CurationError) -> Self {
        ServiceError::Store(e.into())
    }
}

impl From<CompareError> for ServiceError {
    fn from(e: CompareError) -> Self {
        ServiceError::Store(e.into())
    }
}

impl From<SemantifierError> for ServiceError {
    fn from(e: SemantifierError) -> Self {
        ServiceError::Store(e.into())
    }
}

const BAD: StatusCode = StatusCode::BAD_REQUEST;
const MISSING: StatusCode = StatusCode::NOT_FOUND;
const CONFLICT: StatusCode = StatusCode::CONFLICT;
const FAULT: StatusCode = StatusCode::INTERNAL_SERVER_ERROR;

fn store(e: &StoreError) -> (StatusCode, &'static str) {
    match e {
        StoreError::EmptyText => (BAD, "EmptyText"),
        StoreError::UnknownAssay(_) => (MISSING, "UnknownAssay"),
        StoreError::UnknownSession(_) => (MISSING, "UnknownSession"),
        StoreError::ModelUnavailable(_) => (CONFLICT, "ModelUnavailable"),
        StoreError::ModelChecksumMismatch { .. } => (FAULT, "ModelChecksumMismatch"),
        StoreError::Corpus(e) => corpus(e),
        StoreError::Graph(e) => graph(e),
        StoreError::Semantifier(e) => semantifier(e),
        StoreError::Curation(e) => curation(e),
        StoreError::Compare(e) => compare(e),
        StoreError::Import(e) => import(e),
        StoreError::InvalidBaseUri(_) => (BAD, "InvalidBaseUri"),
    }
}

fn corpus(e: &CorpusError) -> (StatusCode, &'static str) {
    match e {
        CorpusError::UnreadableSource(_) => (BAD, "UnreadableSource"),
        CorpusError::EmptyVocabulary => (BAD, "EmptyVocabulary"),
    }
}

fn graph(e: &GraphError) -> (StatusCode, &'static str) {
    match e {
        GraphError::EmptyTitle => (BAD, "EmptyTitle"),
        GraphError::EmptyLabel => (BAD, "EmptyLabel"),
        GraphError::UnknownContribution(_) => (MISSING, "UnknownContribution"),
        GraphError::UnknownPaper(_) => (MISSING, "UnknownPaper"),
        GraphError::UnknownNode(_) => (MISSING, "UnknownNode"),
        GraphError::DuplicateStatement(_) => (CONFLICT, "DuplicateStatement"),
        GraphError::InvalidUri(_) => (BAD, "InvalidUri"),
        GraphError::InvalidLiteral { .. } => (BAD, "InvalidLiteral"),
        GraphError::PredicateUriConflict { .. } => (CONFLICT, "PredicateUriConflict"),
        GraphError::InvalidNodeId(_) => (BAD, "InvalidNodeId"),
        GraphError::Integrity(_) => (FAULT, "Integrity"),
        GraphError::WrongKind { .. } => (BAD, "WrongKind"),
    }
}

fn semantifier(e: &SemantifierError) -> (StatusCode, &'static str) {
    match e {
        SemantifierError::EmptyCorpus => (CONFLICT, "EmptyCorpus"),
        SemantifierError::EmptyText => (BAD, "EmptyText"),
        SemantifierError::EmptyAssayText(_) => (BAD, "EmptyAssayText"),
        SemantifierError::InvalidLabel(_) => (BAD, "InvalidLabel"),
        SemantifierError::InvalidConfig(_) => (BAD, "InvalidConfig"),
        SemantifierError::InvalidTopK => (BAD, "InvalidTopK"),
        SemantifierError::VersionMismatch { .. } => (FAULT, "VersionMismatch"),
        SemantifierError::MalformedModel(_) => (FAULT, "MalformedModel"),
        SemantifierError::Io(_) => (FAULT, "IoFailure"),
    }
}

fn curation(e: &CurationError) -> (StatusCode, &'static str) {
    match e {
        CurationError::EmptyText => (BAD, "EmptyText"),
        CurationError::SessionClosed(_) => (CONFLICT, "SessionClosed"),
        CurationError::UnknownProposal(_) => (MISSING, "UnknownProposal"),
        CurationError::DuplicateStatementInSession(_) => (CONFLICT, "DuplicateStatementInSession"),
        CurationError::EmptyLabel => (BAD, "EmptyLabel"),
        CurationError::InvalidLabel(_) => (BAD, "InvalidLabel"),
        CurationError::PendingProposalsRemain(_) => (CONFLICT, "PendingProposalsRemain"),
        CurationError::InvalidDecision(_) => (BAD, "InvalidDecision"),
        CurationError::Graph(e) => graph(e),
    }
}

fn compare(e: &CompareError) -> (StatusCode, &'static str) {
    match e {
        CompareError::EmptySelection => (BAD, "EmptySelection"),
        CompareError::UnknownContribution(_) => (MISSING, "UnknownContribution"),
        CompareError::DuplicateSelection(_) => (BAD, "DuplicateSelection"),
        CompareError::InvalidK => (BAD, "InvalidK"),
    }
}

fn import(e: &ImportError) -> (StatusCode, &'static str) {
    match e {
        ImportError::InvalidBaseUri(_) => (BAD, "InvalidBaseUri"),
        ImportError::Parse { .. } => (BAD, "ParseError"),
        ImportError::Io(_) => (FAULT, "IoFailure"),
    }
}

fn snapshot(e: &SnapshotError) -> (StatusCode, &'static str) {
    match e {
        SnapshotError::Io { .. } => (FAULT, "IoFailure"),
        SnapshotError::VersionMismatch { .. } => (FAULT, "VersionMismatch"),
        SnapshotError::ChecksumMismatch { .. } => (FAULT, "ChecksumMismatch"),
        SnapshotError::Malformed(_) => (FAULT, "MalformedSnapshot"),
    }
}
