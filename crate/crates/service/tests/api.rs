mod common;

use std::collections::BTreeSet;

use assaykg::compare::build_comparison;
use assaykg::graph::normalize_label;
use assaykg::snapshot::load_snapshot;
use axum::http::{Method, StatusCode};
use common::Harness;
use serde_json::{json, Value};

const LUCIFERASE: &str = "Luciferase reporter assay in cells with luminescence readout.";

async fn open_session(h: &Harness, text: &str) -> (String, Vec<Value>) {
    let (status, body) = h.post("/api/assays", json!({ "text": text })).await;
    assert_eq!(status, StatusCode::CREATED);
    let assay = body["assay_id"].as_str().unwrap().to_string();
    let (status, body) = h.post(&format!("/api/assays/{assay}/semantify"), json!({})).await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    (
        body["session_id"].as_str().unwrap().to_string(),
        body["proposals"].as_array().unwrap().clone(),
    )
}

#[tokio::test]
async fn submit_assay_contract() {
    let h = Harness::new();
    let (status, a) = h.post("/api/assays", json!({"title": "t", "text": "some text"})).await;
    assert_eq!(status, StatusCode::CREATED);
    let (_, b) = h.post("/api/assays", json!({"text": "some text"})).await;
    assert_ne!(a["assay_id"], b["assay_id"]);

    let (status, err) = h.post("/api/assays", json!({"text": ""})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(err["code"], "EmptyText");
    assert_eq!(err["status"], 400);

    let (status, err) = h.raw(Method::POST, "/api/assays", "{not json").await;
    assert_eq!(status, StatusCode::BAD_REQUEST, "{err}");
}

#[tokio::test]
async fn semantify_contract() {
    let h = Harness::new();
    let (status, err) = h.post("/api/assays/A9/semantify", json!({})).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(err["code"], "UnknownAssay");

    let (_, a) = h.post("/api/assays", json!({"text": LUCIFERASE})).await;
    let uri = format!("/api/assays/{}/semantify", a["assay_id"].as_str().unwrap());
    let (status, err) = h.post(&uri, json!({})).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(err["code"], "ModelUnavailable");

    let h = Harness::trained().await;
    let (session, proposals) = open_session(&h, LUCIFERASE).await;
    assert!(!proposals.is_empty());
    let scores: Vec<f64> = proposals.iter().map(|p| p["score"].as_f64().unwrap()).collect();
    assert!(scores.windows(2).all(|w| w[0] >= w[1]), "{scores:?}");
    for p in &proposals {
        for key in ["proposal_id", "property", "value", "score", "accepted_by_threshold"] {
            assert!(p.get(key).is_some(), "{key} missing in {p}");
        }
    }
    assert_eq!(proposals[0]["value"], "reporter gene");
    let (status, view) = h.get(&format!("/api/sessions/{session}")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(view["pending"], proposals.len());

    let (_, a) = h.post("/api/assays", json!({"text": LUCIFERASE})).await;
    let uri = format!("/api/assays/{}/semantify", a["assay_id"].as_str().unwrap());
    let (_, one) = h.post(&uri, json!({"top_k": 1})).await;
    assert!(one["proposals"].as_array().unwrap().len() <= 1);
    let (status, err) = h.post(&uri, json!({"top_k": 0})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(err["code"], "InvalidTopK");
}

#[tokio::test]
async fn curation_contract() {
    let h = Harness::trained().await;
    let (session, proposals) = open_session(&h, LUCIFERASE).await;
    let base = format!("/api/sessions/{session}");

    let (status, err) = h.post(&format!("{base}/finalize"), json!({"paper_title": "x"})).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(err["code"], "PendingProposalsRemain");

    let (status, err) = h.patch(&format!("{base}/proposals/p1"), json!({"decision": "maybe"})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(err["code"], "InvalidDecision");
    let (status, err) = h.patch(&format!("{base}/proposals/p999"), json!({"decision": "accept"})).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(err["code"], "UnknownProposal");

    let mut accepted = BTreeSet::new();
    for (i, p) in proposals.iter().enumerate() {
        let decision = if i % 2 == 0 { "accept" } else { "reject" };
        let pid = p["proposal_id"].as_str().unwrap();
        let (status, updated) = h.patch(&format!("{base}/proposals/{pid}"), json!({ "decision": decision })).await;
        assert_eq!(status, StatusCode::OK);
        assert_eq!(updated["decision"], if i % 2 == 0 { "accepted" } else { "rejected" });
        if i % 2 == 0 {
            accepted.insert((p["property"].as_str().unwrap().to_string(), p["value"].as_str().unwrap().to_string()));
        }
    }
    let manual = json!({"property": "Has  Note", "value": "Reviewed by hand"});
    let (status, added) = h.post(&format!("{base}/statements"), manual.clone()).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(added, json!({"property": "has note", "value": "reviewed by hand"}));
    let (status, err) = h.post(&format!("{base}/statements"), manual).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(err["code"], "DuplicateStatementInSession");
    accepted.insert(("has note".into(), "reviewed by hand".into()));

    let (status, done) = h.post(&format!("{base}/finalize"), json!({"paper_title": "Reporter screen"})).await;
    assert_eq!(status, StatusCode::CREATED, "{done}");
    assert_eq!(done["statement_count"], accepted.len());

    let c = done["contribution_id"].as_str().unwrap();
    let app = h.state.read().await;
    let g = &app.store.graph;
    let id = c.parse().unwrap();
    let stored: BTreeSet<(String, String)> = g
        .subject_statements(id)
        .map(|s| {
            (
                normalize_label(g.node_label(s.predicate).unwrap()),
                normalize_label(&g.object_label(&s.object).unwrap()),
            )
        })
        .collect();
    assert_eq!(stored, accepted);
    drop(app);

    let (status, err) = h.patch(&format!("{base}/proposals/p1"), json!({"decision": "reject"})).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(err["code"], "SessionClosed");
}

#[tokio::test]
async fn comparison_and_similarity_contract() {
    let h = Harness::trained().await;
    let (status, table) = h.get("/api/comparisons?contributions=AID1996,AID1259,AID504847").await;
    assert_eq!(status, StatusCode::OK);
    let app = h.state.read().await;
    let ids: Vec<_> = ["AID1996", "AID1259", "AID504847"]
        .iter()
        .map(|r| app.store.resolve_contribution(r).unwrap())
        .collect();
    let expected = serde_json::to_value(build_comparison(&app.store.graph, &ids).unwrap()).unwrap();
    drop(app);
    assert_eq!(table, expected);
    assert_eq!(table["columns"].as_array().unwrap().len(), 3);

    let (status, csv) = h.raw(Method::GET, "/api/comparisons?contributions=C7,C8,C9&format=csv", "").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(csv.lines().next().unwrap(), "property,C7,C8,C9");

    let (status, err) = h.get("/api/comparisons?contributions=AID1996,C999").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(err["code"], "UnknownContribution");
    assert!(err["message"].as_str().unwrap().contains("C999"));
    let (status, err) = h.get("/api/comparisons").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(err["code"], "EmptySelection");

    let (status, sims) = h.get("/api/assays/AID1259/similar?k=2").await;
    assert_eq!(status, StatusCode::OK);
    let sims = sims.as_array().unwrap();
    assert_eq!(sims.len(), 2);
    assert!(sims[0]["score"].as_f64() >= sims[1]["score"].as_f64());
    let (status, err) = h.get("/api/assays/AID1259/similar?k=0").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(err["code"], "InvalidK");
    let (status, err) = h.get("/api/assays/AID1259/similar?k=lots").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(err["code"], "InvalidRequest");
}

#[tokio::test]
async fn stats_export_import_and_snapshot() {
    let h = Harness::new();
    h.raw(Method::POST, "/api/corpus", common::fixture_text("three_assays.jsonl")).await;
    let (status, stats) = h.get("/api/stats").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!((stats["statements_min"].clone(), stats["statements_max"].clone()), (json!(5), json!(92)));
    assert_eq!(stats["statements_mean"], 50.0);

    let (status, nt) = h.raw(Method::GET, "/api/export", "").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(nt.lines().count(), 150);
    let (status, report) = h.raw(Method::POST, "/api/import", nt.clone()).await;
    assert_eq!(status, StatusCode::OK, "{report}");
    let report: Value = serde_json::from_str(&report).unwrap();
    assert_eq!(report["statements_added"], 0);
    let (status, err) = h.call(Method::POST, "/api/import", None).await;
    assert_eq!(status, StatusCode::OK, "{err}");
    let (status, err) = h.raw(Method::POST, "/api/import", "<a:b> <a:c> <a:d> .\nnot a triple\n").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(err.contains("ParseError") && err.contains("line 2"), "{err}");
    let (status, err) = h.raw(Method::GET, "/api/export?base_uri=relative", "").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(err.contains("InvalidBaseUri"));

    let (status, saved) = h.post("/api/snapshot", json!({})).await;
    assert_eq!(status, StatusCode::OK);
    let path = saved["path"].as_str().unwrap();
    let reloaded = load_snapshot(std::path::Path::new(path)).unwrap();
    assert_eq!(reloaded, h.state.read().await.store);

    let (status, err) = h.get("/api/nothing").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(err["code"], "NotFound");
}

/// Sessions on different assays driven concurrently end up exactly as if run
/// one after another.
#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn interleaved_sessions_stay_independent() {
    let h = std::sync::Arc::new(Harness::trained().await);
    let texts = [
        LUCIFERASE,
        "Purified enzyme absorbance assay.",
        "Luciferase luminescence in reporter cells.",
        "Enzyme kinetics by absorbance.",
    ];
    let mut tasks = Vec::new();
    for (i, text) in texts.iter().cycle().take(16).enumerate() {
        let h = h.clone();
        let text = text.to_string();
        tasks.push(tokio::spawn(async move {
            let (session, proposals) = open_session(&h, &text).await;
            let base = format!("/api/sessions/{session}");
            let mut expected = BTreeSet::new();
            for (j, p) in proposals.iter().enumerate() {
                let accept = (i + j) % 2 == 0;
                let pid = p["proposal_id"].as_str().unwrap();
                let decision = if accept { "accept" } else { "reject" };
                let (status, _) = h.patch(&format!("{base}/proposals/{pid}"), json!({ "decision": decision })).await;
                assert_eq!(status, StatusCode::OK);
                if accept {
                    expected.insert(format!("{} :: {}", p["property"].as_str().unwrap(), p["value"].as_str().unwrap()));
                }
                tokio::task::yield_now().await;
            }
            let manual = format!("has note :: session {i}");
            h.post(&format!("{base}/statements"), json!({"property": "has note", "value": format!("session {i}")}))
                .await;
            expected.insert(manual);
            let (status, done) = h.post(&format!("{base}/finalize"), json!({})).await;
            assert_eq!(status, StatusCode::CREATED, "{done}");
            (done["contribution_id"].as_str().unwrap().to_string(), expected)
        }));
    }
    let mut contributions = BTreeSet::new();
    for t in tasks {
        let (c, expected) = t.await.unwrap();
        assert!(contributions.insert(c.clone()));
        let app = h.state.read().await;
        let g = &app.store.graph;
        let got: BTreeSet<String> = g
            .subject_statements(c.parse().unwrap())
            .map(|s| format!("{} :: {}", g.node_label(s.predicate).unwrap(), g.object_label(&s.object).unwrap()))
            .collect();
        assert_eq!(got, expected);
    }
    h.state.read().await.store.graph.check_integrity().unwrap();
}
