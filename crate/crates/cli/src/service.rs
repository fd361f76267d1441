//! In-memory stepping sessions over HTTP.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use cerl_core::config::{NodeConfigDoc, NodeView};
use cerl_core::explore::{random_tau_run, TraceStep};
use cerl_core::{node_enabled, node_step, random_run, Action, Node, Pid, Trace};
use serde::{Deserialize, Serialize};
use serde_json::json;

pub struct Session {
    pub initial: Node,
    pub current: Node,
    pub undo: Vec<Node>,
    pub trace: Trace,
    pub enabled: Vec<(Pid, Action)>,
}

impl Session {
    fn new(node: Node) -> Self {
        let enabled = node_enabled(&node);
        Session {
            initial: node.clone(),
            current: node,
            undo: Vec::new(),
            trace: Trace::new(),
            enabled,
        }
    }

    fn advance(&mut self, pid: Pid, action: Action, next: Node) {
        let prev = std::mem::replace(&mut self.current, next);
        self.undo.push(prev);
        self.trace.push(pid, action);
        self.enabled = node_enabled(&self.current);
    }

    fn undo(&mut self) -> bool {
        let Some(prev) = self.undo.pop() else { return false };
        self.current = prev;
        self.trace.0.pop();
        self.enabled = node_enabled(&self.current);
        true
    }
}

#[derive(Clone, Default)]
pub struct AppState {
    sessions: Arc<Mutex<HashMap<u64, Arc<Mutex<Session>>>>>,
    next_id: Arc<AtomicU64>,
}

impl AppState {
    fn session(&self, id: u64) -> Result<Arc<Mutex<Session>>, ApiError> {
        self.sessions
            .lock()
            .expect("session table lock")
            .get(&id)
            .cloned()
            .ok_or(ApiError::NotFound(id))
    }
}

#[derive(Debug)]
pub enum ApiError {
    NotFound(u64),
    Stale(String),
    Invalid(String),
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, msg) = match self {
            ApiError::NotFound(id) => (StatusCode::NOT_FOUND, format!("unknown session {id}")),
            ApiError::Stale(m) => (StatusCode::CONFLICT, m),
            ApiError::Invalid(m) => (StatusCode::UNPROCESSABLE_ENTITY, m),
        };
        (status, Json(json!({ "error": msg }))).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::Invalid(r.body_text())
    }
}

#[derive(Serialize)]
struct EnabledEntry {
    index: usize,
    pid: Pid,
    action: Action,
    description: String,
}

fn enabled_view(s: &Session) -> Vec<EnabledEntry> {
    s.enabled
        .iter()
        .enumerate()
        .map(|(index, (pid, action))| EnabledEntry {
            index,
            pid: *pid,
            action: action.clone(),
            description: format!("{pid}: {action}"),
        })
        .collect()
}

async fn create(State(app): State<AppState>, body: Result<Json<serde_json::Value>, JsonRejection>) -> Result<Response, ApiError> {
    let Json(mut body) = body?;
    let doc = match body.get_mut("node_config") {
        Some(inner) => inner.take(),
        None => body,
    };
    let doc: NodeConfigDoc = serde_json::from_value(doc).map_err(|e| ApiError::Invalid(e.to_string()))?;
    let node = doc.to_node().map_err(|e| ApiError::Invalid(e.to_string()))?;
    let id = app.next_id.fetch_add(1, Ordering::Relaxed) + 1;
    let state = NodeView::of(&node);
    app.sessions
        .lock()
        .expect("session table lock")
        .insert(id, Arc::new(Mutex::new(Session::new(node))));
    Ok((StatusCode::CREATED, Json(json!({ "session_id": id, "state": state }))).into_response())
}

async fn state(State(app): State<AppState>, Path(id): Path<u64>) -> Result<Json<NodeView>, ApiError> {
    let s = app.session(id)?;
    let s = s.lock().expect("session lock");
    Ok(Json(NodeView::of(&s.current)))
}

async fn enabled(State(app): State<AppState>, Path(id): Path<u64>) -> Result<Response, ApiError> {
    let s = app.session(id)?;
    let s = s.lock().expect("session lock");
    Ok(Json(enabled_view(&s)).into_response())
}

async fn trace(State(app): State<AppState>, Path(id): Path<u64>) -> Result<Json<Trace>, ApiError> {
    let s = app.session(id)?;
    let s = s.lock().expect("session lock");
    Ok(Json(s.trace.clone()))
}

/// A step by index into the enabled list. When `pid` or `action` is given it
/// must match the entry at `index`, which detects a stale client view.
#[derive(Deserialize)]
struct StepRequest {
    index: usize,
    pid: Option<Pid>,
    action: Option<Action>,
}

async fn step(
    State(app): State<AppState>,
    Path(id): Path<u64>,
    body: Result<Json<StepRequest>, JsonRejection>,
) -> Result<Response, ApiError> {
    let s = app.session(id)?;
    let Json(req) = body?;
    let mut s = s.lock().expect("session lock");
    let Some((pid, action)) = s.enabled.get(req.index).cloned() else {
        return Err(ApiError::Stale(format!(
            "index {} out of range for {} enabled actions",
            req.index,
            s.enabled.len()
        )));
    };
    if req.pid.is_some_and(|p| p != pid) || req.action.as_ref().is_some_and(|a| *a != action) {
        return Err(ApiError::Stale(format!("enabled entry {} is now {pid}: {action}", req.index)));
    }
    let next = node_step(&s.current, pid, &action).expect("enabled actions fire");
    s.advance(pid, action.clone(), next);
    Ok(Json(json!({
        "state": NodeView::of(&s.current),
        "step": TraceStep { pid, action },
        "trace_len": s.trace.len(),
    }))
    .into_response())
}

async fn undo(State(app): State<AppState>, Path(id): Path<u64>) -> Result<Response, ApiError> {
    let s = app.session(id)?;
    let mut s = s.lock().expect("session lock");
    if !s.undo() {
        return Err(ApiError::Stale("nothing to undo".into()));
    }
    Ok(Json(json!({ "state": NodeView::of(&s.current), "trace_len": s.trace.len() })).into_response())
}

#[derive(Deserialize, Clone, Copy, PartialEq, Eq, Debug)]
#[serde(rename_all = "kebab-case")]
enum Policy {
    Random,
    TauOnly,
}

#[derive(Deserialize)]
struct AutoRequest {
    policy: Policy,
    steps: usize,
    #[serde(default)]
    seed: u64,
}

async fn auto(
    State(app): State<AppState>,
    Path(id): Path<u64>,
    body: Result<Json<AutoRequest>, JsonRejection>,
) -> Result<Response, ApiError> {
    let s = app.session(id)?;
    let Json(req) = body?;
    let mut s = s.lock().expect("session lock");
    let (_, taken) = match req.policy {
        Policy::Random => random_run(&s.current, req.seed, req.steps),
        Policy::TauOnly => random_tau_run(&s.current, req.seed, req.steps),
    };
    for st in taken.iter() {
        let next = node_step(&s.current, st.pid, &st.action).expect("runs take enabled steps");
        s.advance(st.pid, st.action.clone(), next);
    }
    Ok(Json(json!({
        "state": NodeView::of(&s.current),
        "steps": taken,
        "trace_len": s.trace.len(),
    }))
    .into_response())
}

pub fn router(app: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/:id/state", get(state))
        .route("/sessions/:id/enabled", get(enabled))
        .route("/sessions/:id/trace", get(trace))
        .route("/sessions/:id/step", post(step))
        .route("/sessions/:id/undo", post(undo))
        .route("/sessions/:id/auto", post(auto))
        .with_state(app)
}

pub async fn serve(port: u16) -> anyhow::Result<()> {
    let addr = SocketAddr::from(([127, 0, 0, 1], port));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(AppState::default())).await?;
    Ok(())
}
