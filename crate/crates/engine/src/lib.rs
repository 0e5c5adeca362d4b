//! Engine gateway: one session abstraction over a deterministic stub, a GTP
//! subprocess and a JSON/HTTP endpoint.

pub mod gtp;
pub mod http;
pub mod stub;

use std::time::Duration;

use fdaa_core::analysis::{AnalysisError, MoveAnalysis};
use fdaa_core::go::{BoardState, Color, Coord, Move, MoveError, Point};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use stub::{stub_analyze, stub_suggestions, StubEngine, StubSettings};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("invalid engine configuration: {0}")]
    Config(String),
    #[error("cannot reach engine: {0}")]
    Connect(String),
    #[error("engine did not answer in time")]
    Timeout,
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("engine rejected the command: {0}")]
    Rejected(String),
    #[error("malformed engine reply: {0}")]
    Malformed(String),
    #[error("illegal move: {0}")]
    Illegal(#[from] MoveError),
    #[error("invalid analysis: {0}")]
    Analysis(#[from] AnalysisError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EngineKind {
    #[default]
    Stub,
    GtpSubprocess,
    RemoteHttp,
}

fn default_setting() -> u32 {
    20000
}

fn default_timeout() -> u64 {
    10_000
}

fn default_seed() -> u64 {
    42
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    #[serde(default)]
    pub kind: EngineKind,
    /// URL for `remote-http`.
    #[serde(default)]
    pub endpoint: Option<String>,
    /// Program and arguments for `gtp-subprocess`.
    #[serde(default)]
    pub command: Vec<String>,
    #[serde(default = "default_setting")]
    pub simulation_setting: u32,
    #[serde(default = "default_timeout")]
    pub timeout_ms: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub bias: Option<Color>,
    #[serde(default)]
    pub settle_after: Option<u32>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self::stub(default_seed())
    }
}

impl EngineConfig {
    pub fn stub(seed: u64) -> Self {
        Self {
            kind: EngineKind::Stub,
            endpoint: None,
            command: Vec::new(),
            simulation_setting: default_setting(),
            timeout_ms: default_timeout(),
            seed,
            bias: None,
            settle_after: None,
        }
    }

    pub fn gtp(command: Vec<String>) -> Self {
        Self {
            kind: EngineKind::GtpSubprocess,
            command,
            ..Self::default()
        }
    }

    pub fn http(endpoint: impl Into<String>) -> Self {
        Self {
            kind: EngineKind::RemoteHttp,
            endpoint: Some(endpoint.into()),
            ..Self::default()
        }
    }

    pub fn timeout(&self) -> Duration {
        Duration::from_millis(self.timeout_ms)
    }

    pub fn stub_settings(&self) -> StubSettings {
        StubSettings {
            seed: self.seed,
            simulation_setting: self.simulation_setting,
            bias: self.bias,
            settle_after: self.settle_after,
        }
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.simulation_setting == 0 {
            return Err(EngineError::Config("simulation_setting must be positive".into()));
        }
        match self.kind {
            EngineKind::GtpSubprocess if self.command.is_empty() => {
                Err(EngineError::Config("gtp-subprocess needs a command".into()))
            }
            EngineKind::RemoteHttp if self.endpoint.is_none() => {
                Err(EngineError::Config("remote-http needs an endpoint".into()))
            }
            _ => Ok(()),
        }
    }
}

enum Backend {
    Stub(StubEngine),
    Gtp(gtp::GtpClient),
    Http(http::HttpClient),
}

/// One engine conversation plus the board it should agree with. The board
/// only advances after the engine accepts a move.
pub struct EngineSession {
    config: EngineConfig,
    komi: f64,
    board: BoardState,
    history: Vec<Move>,
    backend: Backend,
}

impl EngineSession {
    /// Connects, clears the board and sets komi.
    pub fn open(config: EngineConfig, komi: f64) -> Result<Self, EngineError> {
        config.validate()?;
        let backend = match config.kind {
            EngineKind::Stub => {
                let mut engine = StubEngine::new(config.stub_settings());
                engine.set_komi(komi);
                Backend::Stub(engine)
            }
            EngineKind::GtpSubprocess => {
                let mut client = gtp::GtpClient::spawn(&config.command, config.timeout())?;
                client.command("boardsize 19")?;
                client.command("clear_board")?;
                client.command(&format!("komi {komi}"))?;
                Backend::Gtp(client)
            }
            EngineKind::RemoteHttp => {
                let endpoint = config.endpoint.as_deref().expect("validated");
                let client = http::HttpClient::new(endpoint, config.timeout());
                client.ack(&http::HttpCommand::ClearBoard)?;
                client.ack(&http::HttpCommand::Komi { komi })?;
                Backend::Http(client)
            }
        };
        Ok(Self {
            config,
            komi,
            board: BoardState::new(),
            history: Vec::new(),
            backend,
        })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn komi(&self) -> f64 {
        self.komi
    }

    pub fn board(&self) -> &BoardState {
        &self.board
    }

    pub fn history(&self) -> &[Move] {
        &self.history
    }

    /// Handicap stones; only before the first move.
    pub fn setup(&mut self, black: &[Point]) -> Result<(), EngineError> {
        if !self.history.is_empty() || self.board.stone_count() > 0 {
            return Err(EngineError::Rejected("setup after the game started".into()));
        }
        if black.is_empty() {
            return Ok(());
        }
        match &mut self.backend {
            Backend::Stub(e) => {
                if !e.setup(black) {
                    return Err(EngineError::Rejected("setup".into()));
                }
            }
            Backend::Gtp(c) => {
                let list: Vec<String> = black.iter().map(|p| p.to_string()).collect();
                c.command(&format!("set_free_handicap {}", list.join(" ")))?;
            }
            Backend::Http(c) => c.ack(&http::HttpCommand::setup(black))?,
        }
        self.board = BoardState::with_setup(black, &[], Color::White);
        Ok(())
    }

    /// Sends a move. Illegal moves are refused locally before the engine
    /// sees them; on any failure the board is unchanged.
    pub fn play(&mut self, color: Color, coord: Coord) -> Result<Move, EngineError> {
        let next = self.board.play(color, coord)?;
        match &mut self.backend {
            Backend::Stub(e) => {
                if !e.play(color, coord) {
                    return Err(EngineError::Rejected(gtp::play_command(color, coord)));
                }
            }
            Backend::Gtp(c) => {
                c.command(&gtp::play_command(color, coord))?;
            }
            Backend::Http(c) => c.ack(&http::HttpCommand::Play {
                color,
                vertex: coord,
            })?,
        }
        let mv = Move::new(color, coord, self.board.ply() + 1);
        self.board = next;
        self.history.push(mv);
        Ok(mv)
    }

    /// Top suggestions for the side to move, normalized and checked.
    pub fn analyze(&mut self) -> Result<MoveAnalysis, EngineError> {
        let color = self.board.to_move();
        let suggestions = match &mut self.backend {
            Backend::Stub(e) => e.analyze(color),
            Backend::Gtp(c) => gtp::parse_analysis(&c.command(&format!("analyze {}", color.gtp_name()))?)?,
            Backend::Http(c) => c.analyze(color)?,
        };
        let analysis = MoveAnalysis::new(self.board.ply() + 1, color, suggestions)?;
        analysis.check_legal(&self.board)?;
        Ok(analysis)
    }
}
