//! HTTP and WebSocket front end.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use fdaa_core::assessment::OgsVerdict;
use fdaa_core::go::{Color, Coord};
use fdaa_core::summarizer::Commentary;
use fdaa_engine::EngineError;
use serde::{Deserialize, Serialize};
use tokio::sync::{broadcast, Mutex};

use crate::session::{AssessmentFrame, GameConfig, GameSession, GameSnapshot};
use crate::ServiceError;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    /// Where per-game logs go; `None` keeps them in memory.
    pub log_dir: Option<PathBuf>,
    /// Messages a subscriber may fall behind before it is dropped.
    pub stream_capacity: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            log_dir: None,
            stream_capacity: 256,
        }
    }
}

/// Closing summary pushed to subscribers when a game finishes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommentaryMessage {
    pub result: Option<String>,
    pub commentary: Option<Commentary>,
    pub text: Option<String>,
    pub method1: Option<OgsVerdict>,
    pub method2: Option<OgsVerdict>,
}

/// Everything sent on the stream. The first message is always a snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum StreamMessage {
    Snapshot(GameSnapshot),
    Frame(AssessmentFrame),
    Commentary(CommentaryMessage),
    /// The reader fell behind and was cut off; resync from the snapshot.
    Gap { missed: u64 },
}

struct Game {
    session: Arc<Mutex<GameSession>>,
    tx: broadcast::Sender<StreamMessage>,
}

#[derive(Clone)]
pub struct AppState {
    config: Arc<ServiceConfig>,
    games: Arc<RwLock<HashMap<String, Arc<Game>>>>,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Self {
        Self {
            config: Arc::new(config),
            games: Arc::default(),
        }
    }

    fn game(&self, id: &str) -> Result<Arc<Game>, ServiceError> {
        self.games
            .read()
            .expect("games lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::NotFound(id.to_string()))
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/games", post(create_game))
        .route("/games/{id}", get(get_game))
        .route("/games/{id}/moves", post(submit_move))
        .route("/games/{id}/finish", post(finish_game))
        .route("/games/{id}/frames", get(get_frames))
        .route("/games/{id}/stream", get(stream))
        .with_state(state)
}

/// Serves the API until the listener fails.
pub async fn serve(listener: tokio::net::TcpListener, state: AppState) -> std::io::Result<()> {
    axum::serve(listener, router(state)).await
}

#[derive(Serialize)]
struct ErrorBody {
    error: &'static str,
    message: String,
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let (status, code) = match &self {
            ServiceError::NotFound(_) => (StatusCode::NOT_FOUND, "not_found"),
            ServiceError::Finished(_) => (StatusCode::CONFLICT, "finished"),
            ServiceError::BadRequest(_) => (StatusCode::BAD_REQUEST, "bad_request"),
            ServiceError::Engine(EngineError::Illegal(_)) => {
                (StatusCode::UNPROCESSABLE_ENTITY, "illegal_move")
            }
            ServiceError::Engine(EngineError::Config(_)) => (StatusCode::BAD_REQUEST, "bad_config"),
            ServiceError::Engine(_) => (StatusCode::BAD_GATEWAY, "engine"),
            ServiceError::Pipeline(_) => (StatusCode::UNPROCESSABLE_ENTITY, "assessment"),
            ServiceError::Storage(_) => (StatusCode::INTERNAL_SERVER_ERROR, "storage"),
        };
        let body = ErrorBody {
            error: code,
            message: self.to_string(),
        };
        (status, Json(body)).into_response()
    }
}

fn parse_body<T: serde::de::DeserializeOwned + Default>(body: &Bytes) -> Result<T, ServiceError> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Ok(T::default());
    }
    serde_json::from_slice(body).map_err(|e| ServiceError::BadRequest(e.to_string()))
}

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, ServiceError> + Send + 'static,
) -> Result<T, ServiceError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ServiceError::Storage(format!("worker failed: {e}")))?
}

#[derive(Serialize, Deserialize)]
struct Created {
    id: String,
    snapshot: GameSnapshot,
}

async fn create_game(State(state): State<AppState>, body: Bytes) -> Result<Response, ServiceError> {
    let config: GameConfig = parse_body(&body)?;
    let log_dir = state.config.log_dir.clone();
    let session = blocking(move || GameSession::create(config, log_dir.as_deref())).await?;
    let id = session.id().to_string();
    let snapshot = session.snapshot();
    let (tx, _) = broadcast::channel(state.config.stream_capacity.max(1));
    let game = Game {
        session: Arc::new(Mutex::new(session)),
        tx,
    };
    state
        .games
        .write()
        .expect("games lock")
        .insert(id.clone(), Arc::new(game));
    tracing::info!(game = %id, "game created");
    Ok((StatusCode::CREATED, Json(Created { id, snapshot })).into_response())
}

async fn get_game(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<GameSnapshot>, ServiceError> {
    let game = state.game(&id)?;
    let session = game.session.lock().await;
    Ok(Json(session.snapshot()))
}

async fn get_frames(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<Vec<AssessmentFrame>>, ServiceError> {
    let game = state.game(&id)?;
    let session = game.session.lock().await;
    Ok(Json(session.frames().to_vec()))
}

#[derive(Default, Deserialize)]
struct MoveRequest {
    color: String,
    vertex: String,
}

async fn submit_move(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<AssessmentFrame>, ServiceError> {
    let req: MoveRequest = parse_body(&body)?;
    let color: Color = req
        .color
        .parse()
        .map_err(|e| ServiceError::BadRequest(format!("{e}")))?;
    let coord: Coord = req
        .vertex
        .parse()
        .map_err(|e| ServiceError::BadRequest(format!("{e}")))?;
    let game = state.game(&id)?;
    let mut session = Arc::clone(&game.session).lock_owned().await;
    let tx = game.tx.clone();
    // Broadcasting under the lock keeps every stream in move order.
    let frame = blocking(move || {
        let frame = session.submit_move(color, coord)?;
        let _ = tx.send(StreamMessage::Frame(frame.clone()));
        Ok(frame)
    })
    .await?;
    Ok(Json(frame))
}

#[derive(Default, Deserialize)]
struct FinishRequest {
    #[serde(default)]
    result: Option<String>,
}

async fn finish_game(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<CommentaryMessage>, ServiceError> {
    let req: FinishRequest = parse_body(&body)?;
    let game = state.game(&id)?;
    let mut session = game.session.lock().await;
    let report = session.finish(req.result.as_deref())?;
    let message = CommentaryMessage {
        result: report.result,
        commentary: report.commentary,
        text: report.commentary_text,
        method1: report.method1,
        method2: report.method2,
    };
    let _ = game.tx.send(StreamMessage::Commentary(message.clone()));
    Ok(Json(message))
}

async fn stream(
    ws: WebSocketUpgrade,
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Response, ServiceError> {
    let game = state.game(&id)?;
    Ok(ws.on_upgrade(move |socket| pump(socket, game)))
}

async fn send(socket: &mut WebSocket, message: &StreamMessage) -> bool {
    let text = serde_json::to_string(message).expect("messages serialize");
    socket.send(Message::Text(text.into())).await.is_ok()
}

async fn pump(mut socket: WebSocket, game: Arc<Game>) {
    // Subscribe while holding the session so nothing falls between the
    // snapshot and the first streamed frame.
    let (snapshot, mut rx) = {
        let session = game.session.lock().await;
        (session.snapshot(), game.tx.subscribe())
    };
    if !send(&mut socket, &StreamMessage::Snapshot(snapshot)).await {
        return;
    }
    loop {
        tokio::select! {
            msg = rx.recv() => match msg {
                Ok(m) => {
                    if !send(&mut socket, &m).await {
                        return;
                    }
                }
                Err(broadcast::error::RecvError::Lagged(missed)) => {
                    let _ = send(&mut socket, &StreamMessage::Gap { missed }).await;
                    let _ = socket.send(Message::Close(None)).await;
                    return;
                }
                Err(broadcast::error::RecvError::Closed) => return,
            },
            incoming = socket.recv() => match incoming {
                None | Some(Err(_)) | Some(Ok(Message::Close(_))) => return,
                Some(Ok(_)) => {}
            },
        }
    }
}
