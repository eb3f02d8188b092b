//! In-process harness: a router over a store in a temporary directory.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::Arc;

use assaykg_service::api::{router, Shared};
use assaykg_service::app::App;
use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::Value;
use tokio::sync::RwLock;
use tower::ServiceExt;

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

pub struct Harness {
    pub dir: tempfile::TempDir,
    pub state: Shared,
    pub router: Router,
}

impl Harness {
    pub fn new() -> Harness {
        let dir = tempfile::tempdir().unwrap();
        let app = App::open(dir.path().join("store.json")).unwrap();
        let state: Shared = Arc::new(RwLock::new(app));
        Harness {
            router: router(state.clone()),
            state,
            dir,
        }
    }

    pub async fn raw(&self, method: Method, uri: &str, body: impl Into<Body>) -> (StatusCode, String) {
        let request = Request::builder()
            .method(method)
            .uri(uri)
            .header("content-type", "application/json")
            .body(body.into())
            .unwrap();
        let response = self.router.clone().oneshot(request).await.unwrap();
        let status = response.status();
        let bytes = response.into_body().collect().await.unwrap().to_bytes();
        (status, String::from_utf8(bytes.to_vec()).unwrap())
    }

    pub async fn call(&self, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
        let body = body.map(|b| b.to_string()).unwrap_or_default();
        let (status, text) = self.raw(method, uri, body).await;
        let value = serde_json::from_str(&text).unwrap_or(Value::String(text));
        (status, value)
    }

    pub async fn get(&self, uri: &str) -> (StatusCode, Value) {
        self.call(Method::GET, uri, None).await
    }

    pub async fn post(&self, uri: &str, body: Value) -> (StatusCode, Value) {
        self.call(Method::POST, uri, Some(body)).await
    }

    pub async fn patch(&self, uri: &str, body: Value) -> (StatusCode, Value) {
        self.call(Method::PATCH, uri, Some(body)).await
    }

    /// Ingests the semantifier and three-assay fixtures and trains on them.
    pub async fn trained() -> Harness {
        let h = Harness::new();
        for name in ["semantifier_six.jsonl", "three_assays.jsonl"] {
            let (status, _) = h.raw(Method::POST, "/api/corpus", fixture_text(name)).await;
            assert_eq!(status, StatusCode::OK);
        }
        let (status, body) = h.post("/api/model/train", serde_json::json!({})).await;
        assert_eq!(status, StatusCode::CREATED, "{body}");
        h
    }
}
