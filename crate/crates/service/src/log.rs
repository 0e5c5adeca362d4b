//! Append-only JSONL event log, one file per game, and its replay.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use fdaa_core::analysis::MoveAnalysis;
use fdaa_core::go::{BoardState, Move};
use fdaa_core::pipeline::{CommentarySource, GameAssessor, GameReport};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::session::{AssessmentFrame, GameConfig, SessionState, Status};
use crate::session::now_ms;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum Event {
    Created {
        id: String,
        config: GameConfig,
        /// First analysis for Black.
        analysis: MoveAnalysis,
    },
    /// A move together with the analysis it is judged against.
    Move {
        played: Move,
        analysis: MoveAnalysis,
    },
    Frame(AssessmentFrame),
    Finished {
        result: Option<String>,
        report: GameReport,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventLogEntry {
    /// Contiguous from 1.
    pub seq: u64,
    pub timestamp_ms: u64,
    #[serde(flatten)]
    pub event: Event,
}

#[derive(Debug)]
pub struct EventLog {
    entries: Vec<EventLogEntry>,
    file: Option<(PathBuf, File)>,
}

impl EventLog {
    pub fn in_memory() -> Self {
        Self {
            entries: Vec::new(),
            file: None,
        }
    }

    /// Creates a new log file; an existing file is never overwritten.
    pub fn create(path: &Path) -> std::io::Result<Self> {
        let file = OpenOptions::new().create_new(true).append(true).open(path)?;
        Ok(Self {
            entries: Vec::new(),
            file: Some((path.to_path_buf(), file)),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.file.as_ref().map(|(p, _)| p.as_path())
    }

    pub fn entries(&self) -> &[EventLogEntry] {
        &self.entries
    }

    /// Appends events with one write, so a batch lands whole or not at all
    /// as far as this process can tell.
    pub fn append(&mut self, events: Vec<Event>) -> std::io::Result<()> {
        let start = self.entries.len() as u64 + 1;
        let ts = now_ms();
        let batch: Vec<EventLogEntry> = events
            .into_iter()
            .enumerate()
            .map(|(i, event)| EventLogEntry {
                seq: start + i as u64,
                timestamp_ms: ts,
                event,
            })
            .collect();
        if let Some((_, file)) = &mut self.file {
            let mut text = String::new();
            for e in &batch {
                text.push_str(&serde_json::to_string(e).map_err(std::io::Error::other)?);
                text.push('\n');
            }
            file.write_all(text.as_bytes())?;
            file.flush()?;
        }
        self.entries.extend(batch);
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("cannot read log: {0}")]
    Io(#[from] std::io::Error),
    #[error("log integrity: entry {0} is missing")]
    Missing(u64),
    #[error("log integrity: line {line} is not a valid entry: {message}")]
    Corrupt { line: usize, message: String },
    #[error("log integrity: entry {seq} {message}")]
    Inconsistent { seq: u64, message: String },
}

/// Reads a log file. A damaged final line counts as a missing entry, since
/// that is what a crash mid-write leaves behind.
pub fn read_log(path: &Path) -> Result<Vec<EventLogEntry>, ReplayError> {
    let reader = BufReader::new(File::open(path)?);
    let lines: Vec<String> = reader.lines().collect::<Result<_, _>>()?;
    let lines: Vec<&str> = lines.iter().map(|l| l.trim()).filter(|l| !l.is_empty()).collect();
    let mut entries = Vec::with_capacity(lines.len());
    for (i, line) in lines.iter().enumerate() {
        match serde_json::from_str::<EventLogEntry>(line) {
            Ok(e) => entries.push(e),
            Err(_) if i + 1 == lines.len() => return Err(ReplayError::Missing(i as u64 + 1)),
            Err(e) => {
                return Err(ReplayError::Corrupt {
                    line: i + 1,
                    message: e.to_string(),
                })
            }
        }
    }
    Ok(entries)
}

pub fn replay_file(path: &Path) -> Result<SessionState, ReplayError> {
    replay(&read_log(path)?)
}

/// Rebuilds a session from its entries, recomputing every feature and
/// situation record and checking them against what was logged.
pub fn replay(entries: &[EventLogEntry]) -> Result<SessionState, ReplayError> {
    for (i, e) in entries.iter().enumerate() {
        if e.seq != i as u64 + 1 {
            return Err(ReplayError::Missing(i as u64 + 1));
        }
    }
    let mut iter = entries.iter().peekable();
    let Some(first) = iter.next() else {
        return Err(ReplayError::Missing(1));
    };
    let Event::Created {
        id,
        config,
        analysis,
    } = &first.event
    else {
        return Err(ReplayError::Inconsistent {
            seq: 1,
            message: "is not a creation".into(),
        });
    };
    let bad = |seq: u64, message: &str| ReplayError::Inconsistent {
        seq,
        message: message.to_string(),
    };
    let mut state = SessionState {
        id: id.clone(),
        config: config.clone(),
        status: Status::Open,
        moves: Vec::new(),
        frames: Vec::new(),
        cgs: Vec::new(),
        pending: Some(analysis.clone()),
        report: None,
    };
    let mut board = BoardState::new();
    let mut assessor = GameAssessor::new(config.fml);
    while let Some(entry) = iter.next() {
        if state.status == Status::Finished {
            return Err(bad(entry.seq, "follows the end of the game"));
        }
        match &entry.event {
            Event::Move { played, analysis } => {
                board = board
                    .apply_move(played)
                    .map_err(|e| bad(entry.seq, &format!("replays an illegal move: {e}")))?;
                if played.number != board.ply() {
                    return Err(bad(entry.seq, "has the wrong move number"));
                }
                let (features, cgs) = assessor
                    .observe(analysis, played)
                    .map_err(|e| bad(entry.seq, &e.to_string()))?;
                let Some(next) = iter.next() else {
                    return Err(ReplayError::Missing(entry.seq + 1));
                };
                let Event::Frame(logged) = &next.event else {
                    return Err(bad(next.seq, "should be the frame of the previous move"));
                };
                let recomputed =
                    AssessmentFrame::new(*played, &features, cgs, None, logged.timestamp_ms);
                let engine_part = AssessmentFrame {
                    suggestions: Vec::new(),
                    ..logged.clone()
                };
                if recomputed != engine_part {
                    return Err(bad(next.seq, "disagrees with the recomputed assessment"));
                }
                state.moves.push(*played);
                state.frames.push(logged.clone());
                state.pending = (!logged.suggestions.is_empty()).then(|| MoveAnalysis {
                    move_no: played.number + 1,
                    color: played.color.opposite(),
                    suggestions: logged.suggestions.clone(),
                });
            }
            Event::Finished { result, report } => {
                let recomputed = assessor.report(result.as_deref(), CommentarySource::Method2);
                if &recomputed != report {
                    return Err(bad(entry.seq, "disagrees with the recomputed report"));
                }
                state.status = Status::Finished;
                state.report = Some(recomputed);
            }
            Event::Created { .. } => return Err(bad(entry.seq, "creates the game twice")),
            Event::Frame(_) => return Err(bad(entry.seq, "is a frame without a move")),
        }
    }
    state.cgs = assessor.series().to_vec();
    Ok(state)
}
