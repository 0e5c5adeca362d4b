//! Replaying a recorded game through the assessment pipeline.

use std::time::Instant;

use fdaa_core::assessment::FmlVariant;
use fdaa_core::go::{Color, GameRecord};
use fdaa_core::pipeline::{CommentarySource, GameAssessor, GameReport};
use fdaa_engine::{EngineConfig, EngineSession};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Player {
    pub name: Option<String>,
    pub rank: Option<String>,
}

/// Mean win rates over one side's moves: the engine's top suggestion
/// against the move actually played.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WrSummary {
    pub machine: f64,
    pub human: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub game: String,
    pub black: Player,
    pub white: Player,
    /// Set when the engine failed before the last move.
    pub partial: bool,
    pub error: Option<String>,
    pub black_wr: Option<WrSummary>,
    pub white_wr: Option<WrSummary>,
    pub report: GameReport,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone)]
pub struct ReplayOptions {
    pub engine: EngineConfig,
    pub fml: FmlVariant,
    pub source: CommentarySource,
}

impl Default for ReplayOptions {
    fn default() -> Self {
        Self {
            engine: EngineConfig::default(),
            fml: FmlVariant::Fml2,
            source: CommentarySource::Method2,
        }
    }
}

fn player(record: &GameRecord, name: &str, rank: &str) -> Player {
    Player {
        name: record.metadata_value(name).map(str::to_string),
        rank: record.metadata_value(rank).map(str::to_string),
    }
}

/// Every move is analyzed, played into the engine, then assessed against
/// that analysis. An
/// engine failure part way through yields a partial report; a failure to
/// open the engine or an illegal record is an error.
pub fn replay_record(
    game: &str,
    record: &GameRecord,
    options: &ReplayOptions,
) -> Result<ReplayReport, CliError> {
    record
        .final_state()
        .map_err(|e| CliError::input(game, e))?;
    let start = Instant::now();
    let mut engine = EngineSession::open(options.engine.clone(), record.komi)?;
    engine.setup(&record.setup_black)?;
    let mut assessor = GameAssessor::new(options.fml);
    let mut machine: [Vec<f64>; 2] = Default::default();
    let mut error = None;
    for mv in &record.moves {
        let step = (|| -> Result<f64, CliError> {
            let analysis = engine.analyze()?;
            // Observed only once the engine has taken the move, so a
            // partial report never counts a move the engine refused.
            engine.play(mv.color, mv.coord)?;
            assessor
                .observe(&analysis, mv)
                .map_err(|e| CliError::Engine(e.to_string()))?;
            Ok(analysis.top().wr)
        })();
        match step {
            Ok(top) => machine[mv.color as usize].push(top),
            Err(e) => {
                tracing::warn!(game, move_no = mv.number, error = %e, "replay stopped early");
                error = Some(format!("move {}: {e}", mv.number));
                break;
            }
        }
    }
    let report = assessor.report(record.result.as_deref(), options.source);
    let summary = |color: Color| {
        let human: Vec<f64> = report
            .features
            .iter()
            .filter(|f| f.color == color)
            .map(|f| f.wr)
            .collect();
        let m = &machine[color as usize];
        (!m.is_empty()).then(|| WrSummary {
            machine: m.iter().sum::<f64>() / m.len() as f64,
            human: human.iter().sum::<f64>() / human.len() as f64,
        })
    };
    Ok(ReplayReport {
        game: game.to_string(),
        black: player(record, "PB", "BR"),
        white: player(record, "PW", "WR"),
        partial: error.is_some(),
        error,
        black_wr: summary(Color::Black),
        white_wr: summary(Color::White),
        report,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}
