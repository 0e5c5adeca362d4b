//! Live game sessions: moves go to the engine, assessment frames go out
//! over a WebSocket stream and every step lands in a per-game event log.

pub mod log;
pub mod server;
pub mod session;

use fdaa_core::pipeline::PipelineError;
use fdaa_engine::EngineError;
use thiserror::Error;

pub use log::{read_log, replay, replay_file, Event, EventLog, EventLogEntry, ReplayError};
pub use server::{router, serve, AppState, CommentaryMessage, ServiceConfig, StreamMessage};
pub use session::{
    AssessmentFrame, Captures, GameConfig, GameSession, GameSnapshot, SessionState, Status,
};

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("no game with id {0}")]
    NotFound(String),
    #[error("game {0} is already finished")]
    Finished(String),
    #[error("bad request: {0}")]
    BadRequest(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error("storage failure: {0}")]
    Storage(String),
}

impl From<std::io::Error> for ServiceError {
    fn from(e: std::io::Error) -> Self {
        ServiceError::Storage(e.to_string())
    }
}
