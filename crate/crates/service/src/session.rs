//! A live game: engine conversation, assessment state and its event log.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use fdaa_core::analysis::{MoveAnalysis, Suggestion};
use fdaa_core::assessment::{CgsRecord, FmlVariant};
use fdaa_core::go::{BoardState, Color, Coord, Move};
use fdaa_core::pipeline::{CommentarySource, GameAssessor, GameReport};
use fdaa_engine::{EngineConfig, EngineError, EngineSession};
use serde::{Deserialize, Serialize};

use crate::log::{Event, EventLog};
use crate::ServiceError;

fn default_komi() -> f64 {
    7.5
}

fn default_fml() -> FmlVariant {
    FmlVariant::Fml2
}

/// Everything needed to start a game. Every field has a default, so `{}`
/// is a valid request body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameConfig {
    #[serde(default)]
    pub engine: EngineConfig,
    #[serde(default = "default_komi")]
    pub komi: f64,
    #[serde(default = "default_fml")]
    pub fml: FmlVariant,
}

impl Default for GameConfig {
    fn default() -> Self {
        Self {
            engine: EngineConfig::default(),
            komi: default_komi(),
            fml: default_fml(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Open,
    Finished,
}

/// What clients see after each accepted move.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssessmentFrame {
    pub move_no: u32,
    #[serde(rename = "move")]
    pub played: Move,
    /// Side to move next and the engine's suggestions for it. Empty when
    /// that analysis failed; it is retried before the next move.
    pub to_move: Color,
    pub suggestions: Vec<Suggestion>,
    pub sn: u32,
    pub wr: f64,
    pub matched_rank: Option<u8>,
    pub tmr: [f64; 3],
    pub cgs: Option<CgsRecord>,
    pub timestamp_ms: u64,
}

impl AssessmentFrame {
    /// Builds the frame for `played` from the assessor's output.
    pub(crate) fn new(
        played: Move,
        features: &fdaa_core::assessment::MoveFeatures,
        cgs: Option<CgsRecord>,
        next: Option<&MoveAnalysis>,
        timestamp_ms: u64,
    ) -> Self {
        Self {
            move_no: played.number,
            played,
            to_move: played.color.opposite(),
            suggestions: next.map(|a| a.suggestions.clone()).unwrap_or_default(),
            sn: features.sn,
            wr: features.wr,
            matched_rank: features.matched_rank,
            tmr: features.tmr_after,
            cgs,
            timestamp_ms,
        }
    }
}

/// The deterministic part of a session: what replaying its log rebuilds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionState {
    pub id: String,
    pub config: GameConfig,
    pub status: Status,
    pub moves: Vec<Move>,
    pub frames: Vec<AssessmentFrame>,
    pub cgs: Vec<CgsRecord>,
    /// Analysis for the side to move, when one is held.
    pub pending: Option<MoveAnalysis>,
    pub report: Option<GameReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Captures {
    pub black: u32,
    pub white: u32,
}

/// Polling view of a session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameSnapshot {
    pub id: String,
    pub status: Status,
    pub fml: FmlVariant,
    pub komi: f64,
    pub ply: u32,
    pub to_move: Color,
    /// Rows from 19 down to 1; `X` black, `O` white, `.` empty.
    pub board: Vec<String>,
    pub captures: Captures,
    pub moves: Vec<Move>,
    pub suggestions: Vec<Suggestion>,
    pub last_frame: Option<AssessmentFrame>,
    pub report: Option<GameReport>,
}

pub(crate) fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

pub(crate) fn board_rows(board: &BoardState) -> Vec<String> {
    (0..19)
        .rev()
        .map(|row| {
            (0..19)
                .map(|col| {
                    let p = fdaa_core::go::Point::new(col, row).expect("on board");
                    match board.get(p) {
                        None => '.',
                        Some(Color::Black) => 'X',
                        Some(Color::White) => 'O',
                    }
                })
                .collect()
        })
        .collect()
}

pub struct GameSession {
    id: String,
    config: GameConfig,
    engine: EngineSession,
    assessor: GameAssessor,
    pending: Option<MoveAnalysis>,
    frames: Vec<AssessmentFrame>,
    status: Status,
    report: Option<GameReport>,
    log: EventLog,
    /// Set when the engine accepted a move the log failed to record.
    poisoned: bool,
}

impl GameSession {
    /// Opens the engine, takes Black's first analysis and writes the
    /// `created` entry. Nothing touches disk unless all of that succeeds.
    pub fn create(config: GameConfig, log_dir: Option<&Path>) -> Result<Self, ServiceError> {
        let mut engine = EngineSession::open(config.engine.clone(), config.komi)?;
        let analysis = engine.analyze()?;
        let id = uuid::Uuid::new_v4().simple().to_string();
        let mut log = match log_dir {
            Some(dir) => EventLog::create(&dir.join(format!("{id}.jsonl")))?,
            None => EventLog::in_memory(),
        };
        log.append(vec![Event::Created {
            id: id.clone(),
            config: config.clone(),
            analysis: analysis.clone(),
        }])?;
        Ok(Self {
            id,
            assessor: GameAssessor::new(config.fml),
            config,
            engine,
            pending: Some(analysis),
            frames: Vec::new(),
            status: Status::Open,
            report: None,
            log,
            poisoned: false,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn board(&self) -> &BoardState {
        self.engine.board()
    }

    pub fn frames(&self) -> &[AssessmentFrame] {
        &self.frames
    }

    pub fn log(&self) -> &EventLog {
        &self.log
    }

    fn ensure_open(&self) -> Result<(), ServiceError> {
        if self.poisoned {
            return Err(ServiceError::Storage(
                "session log is behind the engine; restart from the log".into(),
            ));
        }
        match self.status {
            Status::Open => Ok(()),
            Status::Finished => Err(ServiceError::Finished(self.id.clone())),
        }
    }

    /// Plays one move. On any error before the engine accepts it, the
    /// session and its log are exactly as before.
    pub fn submit_move(&mut self, color: Color, coord: Coord) -> Result<AssessmentFrame, ServiceError> {
        self.ensure_open()?;
        let board = self.engine.board();
        board.play(color, coord).map_err(EngineError::from)?;
        let ply = board.ply();
        let analysis = match &self.pending {
            Some(a) => a.clone(),
            None => self.engine.analyze()?,
        };
        let played = Move::new(color, coord, ply + 1);
        // Assess on a copy so a failure cannot leave half an update behind.
        let mut assessor = self.assessor.clone();
        let (features, cgs) = assessor.observe(&analysis, &played)?;
        self.engine.play(color, coord)?;
        let next = match self.engine.analyze() {
            Ok(a) => Some(a),
            Err(e) => {
                tracing::warn!(game = %self.id, error = %e, "analysis after move failed; will retry");
                None
            }
        };
        let frame = AssessmentFrame::new(played, &features, cgs, next.as_ref(), now_ms());
        if let Err(e) = self.log.append(vec![
            Event::Move {
                played,
                analysis: analysis.clone(),
            },
            Event::Frame(frame.clone()),
        ]) {
            self.poisoned = true;
            return Err(e.into());
        }
        self.assessor = assessor;
        self.pending = next;
        self.frames.push(frame.clone());
        Ok(frame)
    }

    /// Closes the game and builds its report. A second call is refused and
    /// leaves the log alone.
    pub fn finish(&mut self, result: Option<&str>) -> Result<GameReport, ServiceError> {
        self.ensure_open()?;
        let report = self.assessor.report(result, CommentarySource::Method2);
        self.log.append(vec![Event::Finished {
            result: result.map(str::to_string),
            report: report.clone(),
        }])?;
        self.status = Status::Finished;
        self.report = Some(report.clone());
        Ok(report)
    }

    pub fn state(&self) -> SessionState {
        SessionState {
            id: self.id.clone(),
            config: self.config.clone(),
            status: self.status,
            moves: self.engine.history().to_vec(),
            frames: self.frames.clone(),
            cgs: self.assessor.series().to_vec(),
            pending: self.pending.clone(),
            report: self.report.clone(),
        }
    }

    pub fn snapshot(&self) -> GameSnapshot {
        let board = self.engine.board();
        GameSnapshot {
            id: self.id.clone(),
            status: self.status,
            fml: self.config.fml,
            komi: self.config.komi,
            ply: board.ply(),
            to_move: board.to_move(),
            board: board_rows(board),
            captures: Captures {
                black: board.captures_black(),
                white: board.captures_white(),
            },
            moves: self.engine.history().to_vec(),
            suggestions: self
                .pending
                .as_ref()
                .map(|a| a.suggestions.clone())
                .unwrap_or_default(),
            last_frame: self.frames.last().cloned(),
            report: self.report.clone(),
        }
    }
}
