//! Local HTTP service for explanation sessions.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::sync::Mutex;

use crate::error::Error;
use crate::session::{ExplanationSession, HistoryEntry, Monitor, NamedBlock};
use crate::transducer::SkolemWitness;
use crate::ts::TransitionSystem;

pub const IDLE_EXPIRY: Duration = Duration::from_secs(30 * 60);

struct Entry {
    session: Arc<Mutex<ExplanationSession>>,
    used: Instant,
}

#[derive(Clone)]
pub struct AppState {
    inner: Arc<Inner>,
}

struct Inner {
    witness: Option<SkolemWitness>,
    system: Option<TransitionSystem>,
    sessions: Mutex<HashMap<u64, Entry>>,
    next: AtomicU64,
    budget: usize,
    assets: Option<PathBuf>,
}

impl AppState {
    /// Sessions opened without a body use `witness` and `system`.
    pub fn new(witness: Option<SkolemWitness>, system: Option<TransitionSystem>, budget: usize, assets: Option<PathBuf>) -> Self {
        AppState {
            inner: Arc::new(Inner { witness, system, sessions: Mutex::new(HashMap::new()), next: AtomicU64::new(1), budget, assets }),
        }
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn not_found(id: u64) -> Self {
        ApiError { status: StatusCode::NOT_FOUND, code: "not_found", message: format!("no session {id}") }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Digest(_) => "digest_mismatch",
            Error::Version { .. } => "version_mismatch",
            Error::LengthMismatch(_) => "wrong_length",
            Error::InvalidLetter(_) => "invalid_letter",
            Error::ArityMismatch { .. } => "wrong_arity",
            Error::Budget { .. } => "budget",
            _ => "bad_request",
        };
        ApiError { status: StatusCode::BAD_REQUEST, code, message: e.to_string() }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "code": self.code, "message": self.message }))).into_response()
    }
}

#[derive(Debug, Default, Deserialize)]
pub struct OpenRequest {
    /// Witness document; the server's witness when absent.
    pub witness: Option<serde_json::Value>,
    /// System in line or JSON format; the server's system when absent.
    pub system: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct OpenResponse {
    pub id: u64,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub ell: usize,
    pub suggestions: std::collections::BTreeMap<String, Vec<NamedBlock>>,
}

#[derive(Debug, Deserialize)]
pub struct StepRequest {
    pub blocks: Vec<NamedBlock>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SessionView {
    pub id: u64,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub ell: usize,
    pub history: Vec<HistoryEntry>,
    pub monitor: Monitor,
}

async fn open(State(st): State<AppState>, body: Option<Json<OpenRequest>>) -> Result<Json<OpenResponse>, ApiError> {
    let req = body.map(|Json(b)| b).unwrap_or_default();
    let witness = match req.witness {
        Some(v) => SkolemWitness::from_json(&v.to_string())?,
        None => st.inner.witness.clone().ok_or_else(|| Error::Format("no witness given".into()))?,
    };
    let system = match req.system {
        Some(text) => TransitionSystem::parse(&text)?,
        None => st.inner.system.clone().ok_or_else(|| Error::Format("no system given".into()))?,
    };
    let budget = st.inner.budget;
    let s = tokio::task::spawn_blocking(move || ExplanationSession::open(witness, system, budget))
        .await
        .map_err(|e| Error::Internal(e.to_string()))??;
    let id = st.inner.next.fetch_add(1, Ordering::Relaxed);
    let resp = OpenResponse { id, inputs: s.inputs(), outputs: s.outputs(), ell: s.witness.schedule.ell, suggestions: s.suggest_universal(8) };
    let mut map = st.inner.sessions.lock().await;
    map.retain(|_, e| e.used.elapsed() < IDLE_EXPIRY);
    map.insert(id, Entry { session: Arc::new(Mutex::new(s)), used: Instant::now() });
    Ok(Json(resp))
}

async fn lookup(st: &AppState, id: u64) -> Result<Arc<Mutex<ExplanationSession>>, ApiError> {
    let mut map = st.inner.sessions.lock().await;
    let e = map.get_mut(&id).ok_or_else(|| ApiError::not_found(id))?;
    e.used = Instant::now();
    Ok(e.session.clone())
}

async fn step(State(st): State<AppState>, Path(id): Path<u64>, Json(req): Json<StepRequest>) -> Result<impl IntoResponse, ApiError> {
    let s = lookup(&st, id).await?;
    let mut s = s.lock().await;
    let r = s.step(&req.blocks)?;
    let suggestions = s.suggest_universal(8);
    Ok(Json(json!({ "outputs": r.outputs, "delays": r.delays, "monitor": r.monitor, "suggestions": suggestions })))
}

async fn show(State(st): State<AppState>, Path(id): Path<u64>) -> Result<Json<SessionView>, ApiError> {
    let s = lookup(&st, id).await?;
    let s = s.lock().await;
    Ok(Json(SessionView {
        id,
        inputs: s.inputs(),
        outputs: s.outputs(),
        ell: s.witness.schedule.ell,
        history: s.history.clone(),
        monitor: s.monitor(),
    }))
}

async fn close(State(st): State<AppState>, Path(id): Path<u64>) -> Result<StatusCode, ApiError> {
    let mut map = st.inner.sessions.lock().await;
    map.remove(&id).map(|_| StatusCode::NO_CONTENT).ok_or_else(|| ApiError::not_found(id))
}

async fn asset(State(st): State<AppState>, path: Option<Path<String>>) -> Response {
    let Some(root) = &st.inner.assets else {
        return (StatusCode::NOT_FOUND, "no assets configured").into_response();
    };
    let rel = path.map(|Path(p)| p).unwrap_or_default();
    let rel = if rel.is_empty() { "index.html".to_string() } else { rel };
    if rel.split('/').any(|c| c == "..") {
        return StatusCode::NOT_FOUND.into_response();
    }
    match tokio::fs::read(root.join(&rel)).await {
        Ok(bytes) => {
            let mime = match rel.rsplit('.').next() {
                Some("html") => "text/html",
                Some("js") => "text/javascript",
                Some("css") => "text/css",
                Some("json") => "application/json",
                Some("svg") => "image/svg+xml",
                _ => "application/octet-stream",
            };
            ([(header::CONTENT_TYPE, mime)], bytes).into_response()
        }
        Err(_) => StatusCode::NOT_FOUND.into_response(),
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/sessions", post(open))
        .route("/api/sessions/:id", get(show).delete(close))
        .route("/api/sessions/:id/step", post(step))
        .route("/", get(asset))
        .route("/*path", get(asset))
        .with_state(state)
}

/// Serves on `addr` until Ctrl-C.
pub async fn serve(state: AppState, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
