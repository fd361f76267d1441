use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use cerl_cli::{router, AppState};
use cerl_core::{corpus, node_enabled, run_trace, Action, Trace};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

const EXAMPLE3: &str = include_str!("../../../corpus/signal_order.node");

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(match body {
            Some(b) => Body::from(b.to_string()),
            None => Body::empty(),
        })
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let v = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap_or_else(|_| Value::String(String::from_utf8_lossy(&bytes).into()))
    };
    (status, v)
}

async fn session(app: &Router) -> u64 {
    let config: Value = serde_json::from_str(EXAMPLE3).unwrap();
    let (status, v) = call(app, Method::POST, "/sessions", Some(json!({ "node_config": config }))).await;
    assert_eq!(status, StatusCode::CREATED, "{v}");
    v["session_id"].as_u64().unwrap()
}

async fn enabled(app: &Router, id: u64) -> Vec<Value> {
    let (status, v) = call(app, Method::GET, &format!("/sessions/{id}/enabled"), None).await;
    assert_eq!(status, StatusCode::OK);
    v.as_array().unwrap().clone()
}

async fn step(app: &Router, id: u64, index: usize) -> (StatusCode, Value) {
    call(app, Method::POST, &format!("/sessions/{id}/step"), Some(json!({ "index": index }))).await
}

#[tokio::test]
async fn fresh_signal_order_session_has_one_tau() {
    let app = router(AppState::default());
    let id = session(&app).await;
    let en = enabled(&app, id).await;
    assert_eq!(en.len(), 1);
    assert_eq!(en[0]["pid"], 1);
    assert_eq!(en[0]["action"]["kind"], "tau");
}

#[tokio::test]
async fn arrivals_appear_once_both_messages_are_in_flight() {
    let app = router(AppState::default());
    let id = session(&app).await;
    // Process 1 alone is enabled until both of its sends have happened.
    let mut sends = 0;
    while sends < 2 {
        let en = enabled(&app, id).await;
        let i = en.iter().position(|e| e["pid"] == 1).expect("process 1 still runs");
        if en[i]["action"]["kind"] == "send" {
            sends += 1;
        }
        assert_eq!(step(&app, id, i).await.0, StatusCode::OK);
    }
    let (_, trace) = call(&app, Method::GET, &format!("/sessions/{id}/trace"), None).await;
    let trace: Trace = serde_json::from_value(trace).unwrap();
    let node = run_trace(&corpus::signal_order_node(), &trace).unwrap();
    let expected: Vec<Value> = node_enabled(&node)
        .into_iter()
        .map(|(pid, a)| json!({ "pid": pid, "action": a }))
        .collect();
    let got: Vec<Value> = enabled(&app, id)
        .await
        .into_iter()
        .map(|e| json!({ "pid": e["pid"], "action": e["action"] }))
        .collect();
    assert_eq!(got, expected);
    let arrivals: Vec<Action> = got
        .iter()
        .filter_map(|e| serde_json::from_value::<Action>(e["action"].clone()).ok())
        .filter(|a| matches!(a, Action::Arrive { .. }))
        .collect();
    assert_eq!(arrivals.len(), 2);
}

#[tokio::test]
async fn undo_restores_the_initial_state() {
    let app = router(AppState::default());
    let id = session(&app).await;
    let (_, before) = call(&app, Method::GET, &format!("/sessions/{id}/state"), None).await;
    assert_eq!(step(&app, id, 0).await.0, StatusCode::OK);
    let (status, _) = call(&app, Method::POST, &format!("/sessions/{id}/undo"), None).await;
    assert_eq!(status, StatusCode::OK);
    let (_, after) = call(&app, Method::GET, &format!("/sessions/{id}/state"), None).await;
    assert_eq!(before, after);
    let (_, trace) = call(&app, Method::GET, &format!("/sessions/{id}/trace"), None).await;
    assert_eq!(trace, json!([]));
}

#[tokio::test]
async fn error_statuses() {
    let app = router(AppState::default());
    assert_eq!(call(&app, Method::GET, "/sessions/99/state", None).await.0, StatusCode::NOT_FOUND);
    let id = session(&app).await;
    assert_eq!(step(&app, id, 5).await.0, StatusCode::CONFLICT);
    let stale = json!({ "index": 0, "pid": 2 });
    let (status, _) = call(&app, Method::POST, &format!("/sessions/{id}/step"), Some(stale)).await;
    assert_eq!(status, StatusCode::CONFLICT);
    let bad = json!({ "processes": [{ "pid": 1, "expr": "let X = in X" }] });
    assert_eq!(call(&app, Method::POST, "/sessions", Some(bad)).await.0, StatusCode::UNPROCESSABLE_ENTITY);
    let dup = json!({ "processes": [{ "pid": 1, "expr": "1" }, { "pid": 1, "expr": "2" }] });
    assert_eq!(call(&app, Method::POST, "/sessions", Some(dup)).await.0, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn auto_runs_replay_and_interleave_with_undo() {
    let app = router(AppState::default());
    let id = session(&app).await;
    let (status, v) = call(
        &app,
        Method::POST,
        &format!("/sessions/{id}/auto"),
        Some(json!({ "policy": "random", "steps": 15, "seed": 4 })),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{v}");
    call(&app, Method::POST, &format!("/sessions/{id}/undo"), None).await;
    call(&app, Method::POST, &format!("/sessions/{id}/undo"), None).await;
    let (status, _) = call(
        &app,
        Method::POST,
        &format!("/sessions/{id}/auto"),
        Some(json!({ "policy": "tau-only", "steps": 5, "seed": 1 })),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    let (_, trace) = call(&app, Method::GET, &format!("/sessions/{id}/trace"), None).await;
    let trace: Trace = serde_json::from_value(trace).unwrap();
    assert!(trace.iter().skip(13).all(|s| s.action.is_tau()));
    let replayed = run_trace(&corpus::signal_order_node(), &trace).unwrap();
    let (_, state) = call(&app, Method::GET, &format!("/sessions/{id}/state"), None).await;
    assert_eq!(state, serde_json::to_value(cerl_core::config::NodeView::of(&replayed)).unwrap());
}
