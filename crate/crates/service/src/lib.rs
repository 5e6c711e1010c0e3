//! HTTP sessions for playing against the strategy engine.
//!
//! Routes:
//!
//! | method | path                    | body                    |
//! |--------|-------------------------|-------------------------|
//! | POST   | `/api/games`            | `{"n", "human_side"}`   |
//! | GET    | `/api/games/{id}`       |                         |
//! | POST   | `/api/games/{id}/moves` | `{"r", "c"}`            |
//! | DELETE | `/api/games/{id}`       |                         |
//! | GET    | `/api/health`           |                         |
//!
//! Game routes answer with a [`GameSnapshot`]; failures carry
//! `{"error": <code>, "message": <text>}`.

pub mod session;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path as UrlPath, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use sqgame::Player;
use thiserror::Error;
use uuid::Uuid;

pub use session::{GameSnapshot, MoveRecord, Session, SessionError, SessionRecord, StatusLabel, Tables, Threats, WinningSquare};

#[derive(Debug, Error)]
pub enum ApiError {
    #[error("no game with id {0}")]
    NotFound(String),
    #[error("{0}")]
    BadRequest(String),
    #[error(transparent)]
    Session(#[from] SessionError),
}

impl ApiError {
    pub fn status(&self) -> StatusCode {
        match self {
            ApiError::NotFound(_) => StatusCode::NOT_FOUND,
            ApiError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ApiError::Session(e) => match e {
                SessionError::NotYourTurn | SessionError::GameOver => StatusCode::CONFLICT,
                SessionError::UnsupportedSize(_)
                | SessionError::OutOfRange { .. }
                | SessionError::Occupied { .. } => StatusCode::BAD_REQUEST,
                SessionError::BadLog(_) | SessionError::Engine(_) => StatusCode::INTERNAL_SERVER_ERROR,
            },
        }
    }

    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            ApiError::NotFound(_) => "game_not_found",
            ApiError::BadRequest(_) => "bad_request",
            ApiError::Session(e) => match e {
                SessionError::UnsupportedSize(_) => "unsupported_size",
                SessionError::NotYourTurn => "not_your_turn",
                SessionError::GameOver => "game_over",
                SessionError::OutOfRange { .. } => "out_of_range",
                SessionError::Occupied { .. } => "cell_occupied",
                SessionError::BadLog(_) => "corrupt_session",
                SessionError::Engine(_) => "engine_error",
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            error: self.code().to_string(),
            message: self.to_string(),
        };
        (self.status(), Json(body)).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError::BadRequest(e.body_text())
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct CreateGame {
    pub n: usize,
    pub human_side: Player,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct SubmitMove {
    pub r: usize,
    pub c: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize, Serialize)]
pub struct Health {
    pub status: String,
    pub version: String,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct SnapshotFile {
    games: Vec<SessionRecord>,
}

struct Inner {
    sessions: RwLock<HashMap<Uuid, Arc<Mutex<Session>>>>,
    tables: Tables,
    snapshot: Option<PathBuf>,
    /// Serializes snapshot file writes.
    persist: Mutex<()>,
}

/// Shared service state: the session map and the strategy tables.
#[derive(Clone)]
pub struct AppState {
    inner: Arc<Inner>,
}

impl AppState {
    pub fn new(tables: Tables) -> Self {
        AppState {
            inner: Arc::new(Inner {
                sessions: RwLock::new(HashMap::new()),
                tables,
                snapshot: None,
                persist: Mutex::new(()),
            }),
        }
    }

    /// Keeps sessions in `path` across restarts, restoring whatever the
    /// file already holds.
    pub fn with_snapshot_file(tables: Tables, path: impl AsRef<Path>) -> std::io::Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut sessions = HashMap::new();
        if path.is_file() {
            let text = std::fs::read_to_string(&path)?;
            let file: SnapshotFile =
                serde_json::from_str(&text).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
            for rec in &file.games {
                let s = Session::replay(rec, &tables)
                    .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
                sessions.insert(rec.id, Arc::new(Mutex::new(s)));
            }
        }
        Ok(AppState {
            inner: Arc::new(Inner {
                sessions: RwLock::new(sessions),
                tables,
                snapshot: Some(path),
                persist: Mutex::new(()),
            }),
        })
    }

    pub fn session_count(&self) -> usize {
        self.inner.sessions.read().unwrap().len()
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        let uuid = Uuid::parse_str(id).map_err(|_| ApiError::NotFound(id.to_string()))?;
        self.inner
            .sessions
            .read()
            .unwrap()
            .get(&uuid)
            .cloned()
            .ok_or_else(|| ApiError::NotFound(id.to_string()))
    }

    /// Writes every session's move log. Must not be called while holding a
    /// session lock.
    fn persist(&self) {
        let Some(path) = &self.inner.snapshot else {
            return;
        };
        let _guard = self.inner.persist.lock().unwrap();
        let sessions: Vec<Arc<Mutex<Session>>> = self.inner.sessions.read().unwrap().values().cloned().collect();
        let mut file = SnapshotFile {
            games: sessions.iter().map(|s| s.lock().unwrap().record()).collect(),
        };
        file.games.sort_by_key(|g| g.id);
        let tmp = path.with_extension("tmp");
        let text = serde_json::to_string_pretty(&file).expect("snapshot serializes");
        if let Err(e) = std::fs::write(&tmp, text).and_then(|_| std::fs::rename(&tmp, path)) {
            eprintln!("warning: could not write session snapshot {}: {e}", path.display());
        }
    }
}

async fn health() -> Json<Health> {
    Json(Health {
        status: "ok".into(),
        version: env!("CARGO_PKG_VERSION").into(),
    })
}

async fn create_game(
    State(state): State<AppState>,
    body: Result<Json<CreateGame>, JsonRejection>,
) -> Result<(StatusCode, Json<GameSnapshot>), ApiError> {
    let Json(req) = body?;
    let id = Uuid::new_v4();
    let (session, reply) = Session::create(id, req.n, req.human_side, &state.inner.tables)?;
    let snap = session.snapshot(reply);
    state
        .inner
        .sessions
        .write()
        .unwrap()
        .insert(id, Arc::new(Mutex::new(session)));
    state.persist();
    Ok((StatusCode::CREATED, Json(snap)))
}

async fn get_game(State(state): State<AppState>, UrlPath(id): UrlPath<String>) -> Result<Json<GameSnapshot>, ApiError> {
    let session = state.session(&id)?;
    let snap = session.lock().unwrap().snapshot(None);
    Ok(Json(snap))
}

async fn submit_move(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    body: Result<Json<SubmitMove>, JsonRejection>,
) -> Result<Json<GameSnapshot>, ApiError> {
    let session = state.session(&id)?;
    let Json(mv) = body?;
    let snap = {
        let mut s = session.lock().unwrap();
        let reply = s.submit(mv.r, mv.c)?;
        s.snapshot(reply)
    };
    state.persist();
    Ok(Json(snap))
}

async fn delete_game(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
) -> Result<Json<serde_json::Value>, ApiError> {
    let uuid = Uuid::parse_str(&id).map_err(|_| ApiError::NotFound(id.clone()))?;
    let removed = state.inner.sessions.write().unwrap().remove(&uuid);
    if removed.is_none() {
        return Err(ApiError::NotFound(id));
    }
    state.persist();
    Ok(Json(serde_json::json!({ "deleted": id })))
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/health", get(health))
        .route("/api/games", post(create_game))
        .route("/api/games/{id}", get(get_game).delete(delete_game))
        .route("/api/games/{id}/moves", post(submit_move))
        .with_state(state)
}

/// Binds `addr` and serves until Ctrl-C.
pub async fn serve(addr: SocketAddr, state: AppState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
