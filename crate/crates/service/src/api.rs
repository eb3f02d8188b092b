//! HTTP/JSON API over a shared [`App`].
//!
//! Mutations take the write lock, so they apply one at a time; reads share
//! the read lock and see a consistent store.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use assaykg::compare::{render_csv, render_text, SimilarityMode};
use assaykg::curation::Verdict;
use assaykg::ntriples::{ImportMode, DEFAULT_BASE_URI};
use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, patch, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tokio::sync::RwLock;

use crate::app::{train_config, App, LabelView, ProposalView};
use crate::error::ServiceError;

pub type Shared = Arc<RwLock<App>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiError {
    pub status: u16,
    pub code: String,
    pub message: String,
}

impl From<&ServiceError> for ApiError {
    fn from(e: &ServiceError) -> Self {
        let (status, code) = e.classify();
        ApiError {
            status: status.as_u16(),
            code: code.to_string(),
            message: e.to_string(),
        }
    }
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let body = ApiError::from(&self);
        if self.status().is_server_error() {
            tracing::error!(code = %body.code, "{}", body.message);
        }
        (self.status(), Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ServiceError>;

/// Empty bodies read as the default value so optional-only payloads can be
/// omitted.
fn body<T: DeserializeOwned + Default>(bytes: &Bytes) -> ApiResult<T> {
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Ok(T::default());
    }
    serde_json::from_slice(bytes).map_err(|e| ServiceError::InvalidRequest(format!("invalid JSON body: {e}")))
}

fn query<T: DeserializeOwned>(q: Result<Query<T>, axum::extract::rejection::QueryRejection>) -> ApiResult<T> {
    q.map(|Query(t)| t).map_err(|e| ServiceError::InvalidRequest(e.body_text()))
}

pub fn router(state: Shared) -> Router {
    Router::new()
        .route("/api/corpus", post(ingest))
        .route("/api/model", get(model_info))
        .route("/api/model/train", post(train))
        .route("/api/eval", get(evaluate))
        .route("/api/assays", post(submit_assay))
        .route("/api/assays/{id}", get(get_assay))
        .route("/api/assays/{id}/semantify", post(semantify))
        .route("/api/assays/{id}/similar", get(similar))
        .route("/api/sessions/{id}", get(get_session))
        .route("/api/sessions/{id}/proposals/{pid}", patch(decide))
        .route("/api/sessions/{id}/statements", post(add_statement))
        .route("/api/sessions/{id}/finalize", post(finalize))
        .route("/api/sessions/{id}/discard", post(discard))
        .route("/api/comparisons", get(compare))
        .route("/api/stats", get(stats))
        .route("/api/export", get(export))
        .route("/api/import", post(import))
        .route("/api/snapshot", post(snapshot))
        .fallback(not_found)
        .with_state(state)
}

async fn not_found() -> impl IntoResponse {
    let body = ApiError {
        status: 404,
        code: "NotFound".into(),
        message: "no such endpoint".into(),
    };
    (StatusCode::NOT_FOUND, Json(body))
}

async fn ingest(State(s): State<Shared>, bytes: Bytes) -> ApiResult<impl IntoResponse> {
    let summary = s.write().await.ingest(bytes.as_ref())?;
    Ok(Json(summary))
}

async fn model_info(State(s): State<Shared>) -> impl IntoResponse {
    Json(serde_json::json!({ "model": s.read().await.store.model_ref() }))
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrainBody {
    min_freq: Option<usize>,
    seed: Option<u64>,
    calibration_split: Option<f64>,
}

pub const DEFAULT_MIN_FREQ: usize = 1;

async fn train(State(s): State<Shared>, bytes: Bytes) -> ApiResult<impl IntoResponse> {
    let b: TrainBody = body(&bytes)?;
    let summary = s.write().await.train(b.min_freq.unwrap_or(DEFAULT_MIN_FREQ), &train_config(b.seed, b.calibration_split))?;
    Ok((StatusCode::CREATED, Json(summary)))
}

#[derive(Debug, Deserialize)]
struct EvalQuery {
    split: Option<f64>,
    seed: Option<u64>,
    min_freq: Option<usize>,
}

pub const DEFAULT_EVAL_SPLIT: f64 = 0.2;

async fn evaluate(State(s): State<Shared>, q: Result<Query<EvalQuery>, axum::extract::rejection::QueryRejection>) -> ApiResult<impl IntoResponse> {
    let q = query(q)?;
    let config = train_config(q.seed, None);
    let metrics = s.read().await.store.evaluate(
        q.split.unwrap_or(DEFAULT_EVAL_SPLIT),
        q.min_freq.unwrap_or(DEFAULT_MIN_FREQ),
        &config,
    )?;
    Ok(Json(metrics))
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct AssayBody {
    title: Option<String>,
    #[serde(default)]
    text: String,
}

async fn submit_assay(State(s): State<Shared>, bytes: Bytes) -> ApiResult<impl IntoResponse> {
    let b: AssayBody = body(&bytes)?;
    let mut app = s.write().await;
    let assay_id = app.store.submit_assay(b.title.as_deref(), &b.text)?;
    app.mark_dirty();
    Ok((StatusCode::CREATED, Json(serde_json::json!({ "assay_id": assay_id }))))
}

async fn get_assay(State(s): State<Shared>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    let app = s.read().await;
    let assay = app
        .store
        .assay(&id)
        .ok_or_else(|| assaykg::store::StoreError::UnknownAssay(id.clone()))?;
    Ok(Json(assay.clone()))
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SemantifyBody {
    top_k: Option<usize>,
    #[serde(default)]
    auto_accept: bool,
}

async fn semantify(State(s): State<Shared>, Path(id): Path<String>, bytes: Bytes) -> ApiResult<impl IntoResponse> {
    let b: SemantifyBody = body(&bytes)?;
    let summary = s.write().await.semantify(&id, b.top_k, b.auto_accept)?;
    Ok((StatusCode::CREATED, Json(summary)))
}

#[derive(Debug, Deserialize)]
struct SimilarQuery {
    k: Option<usize>,
    #[serde(default)]
    mode: SimilarityMode,
}

pub const DEFAULT_K: usize = 5;

async fn similar(
    State(s): State<Shared>,
    Path(id): Path<String>,
    q: Result<Query<SimilarQuery>, axum::extract::rejection::QueryRejection>,
) -> ApiResult<impl IntoResponse> {
    let q = query(q)?;
    let results = s.read().await.store.similar(&id, q.k.unwrap_or(DEFAULT_K), q.mode)?;
    Ok(Json(results))
}

async fn get_session(State(s): State<Shared>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(s.read().await.session_view(&id)?))
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct DecisionBody {
    #[serde(default)]
    decision: String,
}

async fn decide(
    State(s): State<Shared>,
    Path((id, pid)): Path<(String, String)>,
    bytes: Bytes,
) -> ApiResult<impl IntoResponse> {
    let b: DecisionBody = body(&bytes)?;
    let verdict: Verdict = b.decision.parse()?;
    let mut app = s.write().await;
    let proposal = app.store.decide(&id, &pid, verdict)?;
    app.mark_dirty();
    Ok(Json(ProposalView::from(&proposal)))
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct StatementBody {
    #[serde(default)]
    property: String,
    #[serde(default)]
    value: String,
}

async fn add_statement(State(s): State<Shared>, Path(id): Path<String>, bytes: Bytes) -> ApiResult<impl IntoResponse> {
    let b: StatementBody = body(&bytes)?;
    let mut app = s.write().await;
    let label = app.store.add_manual(&id, &b.property, &b.value)?;
    app.mark_dirty();
    Ok((StatusCode::CREATED, Json(LabelView::from(&label))))
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FinalizeBody {
    paper_title: Option<String>,
}

async fn finalize(State(s): State<Shared>, Path(id): Path<String>, bytes: Bytes) -> ApiResult<impl IntoResponse> {
    let b: FinalizeBody = body(&bytes)?;
    let mut app = s.write().await;
    let outcome = app.store.finalize(&id, b.paper_title.as_deref())?;
    app.mark_dirty();
    Ok((
        StatusCode::CREATED,
        Json(serde_json::json!({
            "contribution_id": outcome.contribution,
            "paper_id": outcome.paper,
            "statement_count": outcome.statement_count,
            "warnings": outcome.warnings,
        })),
    ))
}

async fn discard(State(s): State<Shared>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    let mut app = s.write().await;
    app.store.discard(&id)?;
    app.mark_dirty();
    Ok(Json(app.session_view(&id)?))
}

#[derive(Debug, Deserialize)]
struct CompareQuery {
    #[serde(default)]
    contributions: String,
    #[serde(default)]
    format: OutputFormat,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Text,
    Csv,
    #[default]
    Json,
}

async fn compare(
    State(s): State<Shared>,
    q: Result<Query<CompareQuery>, axum::extract::rejection::QueryRejection>,
) -> ApiResult<Response> {
    let q = query(q)?;
    let refs: Vec<&str> = q.contributions.split(',').map(str::trim).filter(|r| !r.is_empty()).collect();
    let table = s.read().await.store.compare(&refs)?;
    Ok(match q.format {
        OutputFormat::Json => Json(table).into_response(),
        OutputFormat::Csv => ([(header::CONTENT_TYPE, "text/csv; charset=utf-8")], render_csv(&table)).into_response(),
        OutputFormat::Text => render_text(&table).into_response(),
    })
}

async fn stats(State(s): State<Shared>) -> impl IntoResponse {
    Json(s.read().await.store.stats())
}

#[derive(Debug, Deserialize)]
struct ExportQuery {
    base_uri: Option<String>,
    #[serde(default)]
    partial: bool,
}

async fn export(
    State(s): State<Shared>,
    q: Result<Query<ExportQuery>, axum::extract::rejection::QueryRejection>,
) -> ApiResult<impl IntoResponse> {
    let q = query(q)?;
    let text = s
        .read()
        .await
        .store
        .export_ntriples(q.base_uri.as_deref().unwrap_or(DEFAULT_BASE_URI))?;
    Ok(([(header::CONTENT_TYPE, "application/n-triples")], text))
}

async fn import(
    State(s): State<Shared>,
    q: Result<Query<ExportQuery>, axum::extract::rejection::QueryRejection>,
    bytes: Bytes,
) -> ApiResult<impl IntoResponse> {
    let q = query(q)?;
    let mode = if q.partial { ImportMode::Partial } else { ImportMode::Transactional };
    let mut app = s.write().await;
    let result = app
        .store
        .import_ntriples(&bytes, q.base_uri.as_deref().unwrap_or(DEFAULT_BASE_URI), mode);
    // a partial import can fail after applying lines
    if result.is_ok() || mode == ImportMode::Partial {
        app.mark_dirty();
    }
    Ok(Json(result?))
}

async fn snapshot(State(s): State<Shared>) -> ApiResult<impl IntoResponse> {
    let mut app = s.write().await;
    let sha256 = app.save()?;
    Ok(Json(serde_json::json!({ "path": app.path(), "sha256": sha256 })))
}

pub struct ServeOptions {
    pub addr: SocketAddr,
    pub flush_interval: Duration,
}

/// Serves until interrupted, flushing dirty state every interval and once
/// more on shutdown.
pub async fn serve(app: App, options: ServeOptions) -> Result<(), ServiceError> {
    let store_path: PathBuf = app.path().to_path_buf();
    let shared: Shared = Arc::new(RwLock::new(app));
    let listener = tokio::net::TcpListener::bind(options.addr)
        .await
        .map_err(ServiceError::io(options.addr))?;
    tracing::info!(addr = %options.addr, store = %store_path.display(), "listening");

    let flusher = {
        let shared = shared.clone();
        tokio::spawn(async move {
            let mut tick = tokio::time::interval(options.flush_interval);
            tick.tick().await;
            loop {
                tick.tick().await;
                if let Err(e) = shared.write().await.flush() {
                    tracing::error!("flush failed: {e}");
                }
            }
        })
    };

    let served = axum::serve(listener, router(shared.clone()))
        .with_graceful_shutdown(shutdown_signal())
        .await
        .map_err(ServiceError::io(options.addr));
    flusher.abort();
    shared.write().await.flush()?;
    tracing::info!("store flushed, shutting down");
    served
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = term => {},
    }
}
