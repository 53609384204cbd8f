//! Listening-test HTTP service.
//!
//! Listeners open a session, receive the manifest's clips in a seeded random
//! order under opaque tokens, and submit the emotion they heard. Every event
//! is appended to a line-delimited JSON log that is replayed on start, and
//! `/results/confusion` pools all sessions into an intended-vs-heard table.
//!
//! | method | path | body |
//! |---|---|---|
//! | POST | `/sessions` | `{session_id}` |
//! | GET | `/sessions/{id}/next` | `{clip_id, audio_url, remaining}` or `{done: true}` |
//! | POST | `/sessions/{id}/responses` | `{clip_id, heard}` in, `{ok, remaining}` out |
//! | GET | `/audio/{clip_id}` | WAV bytes |
//! | GET | `/results/confusion` | table, counts, accuracy |

use std::collections::{BTreeMap, HashMap};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::extract::{Path as UrlPath, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;
use tower_http::cors::CorsLayer;
use tower_http::services::{ServeDir, ServeFile};

use crate::emotion::EmotionLabel;
use crate::eval::{build_confusion, render_confusion_percent};
use crate::manifest::Manifest;

#[derive(Debug, Error)]
pub enum AnnotationError {
    #[error("response log {path}: {message}")]
    Log { path: PathBuf, message: String },
    #[error("response log line {line}: {message}")]
    Replay { line: usize, message: String },
    #[error("server: {0}")]
    Server(String),
}

fn now_secs() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

/// One line of the durable log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
enum LogEvent {
    Session {
        session_id: String,
        order: Vec<usize>,
        created_at: u64,
    },
    Response {
        session_id: String,
        clip_id: String,
        path: String,
        intended: EmotionLabel,
        heard: EmotionLabel,
        responded_at: u64,
    },
}

#[derive(Debug)]
struct Session {
    order: Vec<usize>,
    cursor: usize,
}

struct LogWriter {
    path: PathBuf,
    file: File,
}

impl LogWriter {
    fn append(&mut self, event: &LogEvent) -> Result<(), AnnotationError> {
        let mut line = serde_json::to_string(event).expect("log events serialize");
        line.push('\n');
        self.file
            .write_all(line.as_bytes())
            .and_then(|_| self.file.flush())
            .map_err(|e| AnnotationError::Log {
                path: self.path.clone(),
                message: e.to_string(),
            })
    }
}

struct Shared {
    manifest: Manifest,
    tokens: Vec<String>,
    token_index: HashMap<String, usize>,
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    /// (intended, heard) pairs from every session.
    responses: Mutex<Vec<(EmotionLabel, EmotionLabel)>>,
    log: Mutex<LogWriter>,
    rng: Mutex<ChaCha8Rng>,
}

/// Cloneable handle to the service state.
#[derive(Clone)]
pub struct AnnotationState(Arc<Shared>);

fn hex_token(rng: &mut ChaCha8Rng) -> String {
    format!("{:016x}", rng.random::<u64>())
}

impl AnnotationState {
    /// Opens (creating if needed) the response log at `log_path` and replays it.
    pub fn open(manifest: Manifest, log_path: impl AsRef<Path>, seed: u64) -> Result<Self, AnnotationError> {
        let log_path = log_path.as_ref().to_path_buf();
        let log_err = |e: std::io::Error| AnnotationError::Log {
            path: log_path.clone(),
            message: e.to_string(),
        };

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut tokens = Vec::with_capacity(manifest.len());
        let mut token_index = HashMap::new();
        for i in 0..manifest.len() {
            let mut t = hex_token(&mut rng);
            while token_index.contains_key(&t) {
                t = hex_token(&mut rng);
            }
            token_index.insert(t.clone(), i);
            tokens.push(t);
        }

        let mut sessions = HashMap::new();
        let mut responses = Vec::new();
        if log_path.exists() {
            let reader = BufReader::new(File::open(&log_path).map_err(log_err)?);
            for (n, line) in reader.lines().enumerate() {
                let line = line.map_err(log_err)?;
                if line.trim().is_empty() {
                    continue;
                }
                let replay_err = |message: String| AnnotationError::Replay { line: n + 1, message };
                match serde_json::from_str::<LogEvent>(&line).map_err(|e| replay_err(e.to_string()))? {
                    LogEvent::Session { session_id, order, .. } => {
                        if order.iter().any(|&i| i >= manifest.len()) {
                            return Err(replay_err("session refers to a clip outside the manifest".into()));
                        }
                        sessions.insert(session_id, Arc::new(Mutex::new(Session { order, cursor: 0 })));
                    }
                    LogEvent::Response {
                        session_id,
                        intended,
                        heard,
                        ..
                    } => {
                        let session = sessions
                            .get(&session_id)
                            .ok_or_else(|| replay_err(format!("unknown session {session_id}")))?;
                        let mut s = session.lock().expect("session lock");
                        if s.cursor >= s.order.len() {
                            return Err(replay_err(format!("session {session_id} overflows its clip order")));
                        }
                        s.cursor += 1;
                        responses.push((intended, heard));
                    }
                }
            }
        }
        if let Some(parent) = log_path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent).map_err(log_err)?;
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&log_path)
            .map_err(log_err)?;

        Ok(Self(Arc::new(Shared {
            manifest,
            tokens,
            token_index,
            sessions: RwLock::new(sessions),
            responses: Mutex::new(responses),
            log: Mutex::new(LogWriter { path: log_path, file }),
            rng: Mutex::new(rng),
        })))
    }

    /// Number of recorded responses across all sessions.
    pub fn response_count(&self) -> usize {
        self.0.responses.lock().expect("responses lock").len()
    }
}

fn error(status: StatusCode, message: impl Into<String>) -> Response {
    (status, Json(json!({ "error": message.into() }))).into_response()
}

fn internal(e: AnnotationError) -> Response {
    error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string())
}

async fn create_session(State(state): State<AnnotationState>) -> Response {
    let shared = &state.0;
    if shared.manifest.is_empty() {
        return error(StatusCode::SERVICE_UNAVAILABLE, "manifest is empty");
    }
    let mut sessions = shared.sessions.write().expect("sessions lock");
    let (session_id, order) = {
        let mut rng = shared.rng.lock().expect("rng lock");
        let mut id = hex_token(&mut rng);
        while sessions.contains_key(&id) {
            id = hex_token(&mut rng);
        }
        let mut order: Vec<usize> = (0..shared.manifest.len()).collect();
        order.shuffle(&mut *rng);
        (id, order)
    };
    let event = LogEvent::Session {
        session_id: session_id.clone(),
        order: order.clone(),
        created_at: now_secs(),
    };
    if let Err(e) = shared.log.lock().expect("log lock").append(&event) {
        return internal(e);
    }
    sessions.insert(session_id.clone(), Arc::new(Mutex::new(Session { order, cursor: 0 })));
    (StatusCode::CREATED, Json(json!({ "session_id": session_id }))).into_response()
}

fn find_session(state: &AnnotationState, id: &str) -> Option<Arc<Mutex<Session>>> {
    state.0.sessions.read().expect("sessions lock").get(id).cloned()
}

async fn next_clip(State(state): State<AnnotationState>, UrlPath(id): UrlPath<String>) -> Response {
    let Some(session) = find_session(&state, &id) else {
        return error(StatusCode::NOT_FOUND, "unknown session");
    };
    let s = session.lock().expect("session lock");
    match s.order.get(s.cursor) {
        None => Json(json!({ "done": true })).into_response(),
        Some(&clip) => {
            let token = &state.0.tokens[clip];
            Json(json!({
                "clip_id": token,
                "audio_url": format!("/audio/{token}"),
                "remaining": s.order.len() - s.cursor,
            }))
            .into_response()
        }
    }
}

#[derive(Debug, Deserialize)]
struct ResponseBody {
    clip_id: String,
    heard: String,
}

async fn submit_response(
    State(state): State<AnnotationState>,
    UrlPath(id): UrlPath<String>,
    Json(body): Json<ResponseBody>,
) -> Response {
    let shared = &state.0;
    let Some(session) = find_session(&state, &id) else {
        return error(StatusCode::NOT_FOUND, "unknown session");
    };
    let Some(&clip) = shared.token_index.get(&body.clip_id) else {
        return error(StatusCode::NOT_FOUND, "unknown clip");
    };
    let mut s = session.lock().expect("session lock");
    let position = s
        .order
        .iter()
        .position(|&c| c == clip)
        .expect("order is a full permutation");
    if position < s.cursor {
        return error(StatusCode::CONFLICT, "clip already answered");
    }
    if position > s.cursor {
        return error(StatusCode::CONFLICT, "clip is not the current clip");
    }
    let Ok(heard) = body.heard.parse::<EmotionLabel>() else {
        return error(
            StatusCode::UNPROCESSABLE_ENTITY,
            format!("unknown emotion `{}`", body.heard),
        );
    };
    let entry = &shared.manifest.entries[clip];
    let event = LogEvent::Response {
        session_id: id,
        clip_id: body.clip_id,
        path: entry.path.clone(),
        intended: entry.emotion,
        heard,
        responded_at: now_secs(),
    };
    // Log first, then publish, so a failed write leaves no trace in memory.
    if let Err(e) = shared.log.lock().expect("log lock").append(&event) {
        return internal(e);
    }
    shared
        .responses
        .lock()
        .expect("responses lock")
        .push((entry.emotion, heard));
    s.cursor += 1;
    Json(json!({ "ok": true, "remaining": s.order.len() - s.cursor })).into_response()
}

async fn audio(State(state): State<AnnotationState>, UrlPath(token): UrlPath<String>) -> Response {
    let shared = &state.0;
    let Some(&clip) = shared.token_index.get(&token) else {
        return error(StatusCode::NOT_FOUND, "unknown clip");
    };
    let path = shared.manifest.resolve(&shared.manifest.entries[clip]);
    match tokio::fs::read(&path).await {
        Ok(bytes) => ([(header::CONTENT_TYPE, "audio/wav")], bytes).into_response(),
        Err(_) => error(StatusCode::NOT_FOUND, "audio unavailable"),
    }
}

async fn confusion(State(state): State<AnnotationState>) -> Response {
    let pairs = state.0.responses.lock().expect("responses lock").clone();
    if pairs.is_empty() {
        return error(StatusCode::NOT_FOUND, "no responses yet");
    }
    let classes: Vec<String> = EmotionLabel::ALL.iter().map(|e| e.name().to_string()).collect();
    let intended: Vec<&str> = pairs.iter().map(|(i, _)| i.name()).collect();
    let heard: Vec<&str> = pairs.iter().map(|(_, h)| h.name()).collect();
    let matrix = build_confusion(&intended, &heard, &classes)
        .expect("labels come from the closed emotion set")
        .without_unused();
    let summary = matrix.overall_accuracy().expect("at least one response");
    let table = render_confusion_percent(&matrix);
    let per_class: BTreeMap<&str, Option<f64>> = summary.per_class.iter().map(|(c, r)| (c.as_str(), *r)).collect();
    let extreme = |e: &Option<(String, f64)>| e.as_ref().map(|(c, r)| json!({ "class": c, "rate": r }));
    Json(json!({
        "classes": matrix.classes,
        "counts": matrix.counts,
        "percent": table.rows,
        "table": table.to_text(),
        "total": matrix.total(),
        "accuracy": summary.accuracy,
        "per_class": per_class,
        "min": extreme(&summary.min),
        "max": extreme(&summary.max),
    }))
    .into_response()
}

/// Builds the router. With `ui_dir`, static files are served from it and
/// `/` returns its `index.html`.
pub fn router(state: AnnotationState, ui_dir: Option<&Path>) -> Router {
    let mut app = Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/next", get(next_clip))
        .route("/sessions/{id}/responses", post(submit_response))
        .route("/audio/{clip_id}", get(audio))
        .route("/results/confusion", get(confusion))
        .with_state(state);
    if let Some(dir) = ui_dir {
        let index = ServeFile::new(dir.join("index.html"));
        app = app.fallback_service(ServeDir::new(dir).not_found_service(index));
    }
    app.layer(CorsLayer::permissive())
}

/// Runs the service until `shutdown` resolves.
pub async fn serve(
    state: AnnotationState,
    addr: SocketAddr,
    ui_dir: Option<PathBuf>,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> Result<(), AnnotationError> {
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|e| AnnotationError::Server(format!("bind {addr}: {e}")))?;
    axum::serve(listener, router(state, ui_dir.as_deref()))
        .with_graceful_shutdown(shutdown)
        .await
        .map_err(|e| AnnotationError::Server(e.to_string()))
}
