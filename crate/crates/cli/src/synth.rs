//! Synthetic game records from stub self-play.

use std::fs;
use std::path::Path;

use fdaa_core::assessment::{CgsLabel, FmlVariant};
use fdaa_core::go::{legal_moves, serialize_sgf, BoardState, Color, Coord, GameRecord};
use fdaa_engine::{stub_analyze, EngineConfig, StubSettings};

use crate::error::CliError;
use crate::experiment::{ExperimentConfig, GameEntry, RunConfig};
use crate::replay::{replay_record, ReplayOptions};

/// Which suggestion each ply follows; 5 means a move off the list.
const PICKS: [usize; 11] = [0, 0, 1, 0, 2, 0, 3, 5, 4, 1, 0];

#[derive(Debug, Clone)]
pub struct SynthSpec {
    pub settings: StubSettings,
    pub moves: u32,
    pub komi: f64,
    pub result: Option<String>,
}

impl SynthSpec {
    pub fn new(settings: StubSettings, moves: u32) -> Self {
        Self {
            settings,
            moves,
            komi: 7.5,
            result: None,
        }
    }
}

/// Plays the stub against itself. Mostly follows its suggestions, with the
/// rank varied on a fixed schedule so top-move rates are not trivially
/// 100%. Stops early only if a side has no legal point left.
pub fn synthesize(spec: &SynthSpec) -> GameRecord {
    let mut record = GameRecord {
        komi: spec.komi,
        result: spec.result.clone(),
        ..GameRecord::default()
    };
    let seed = spec.settings.seed;
    for (key, value) in [
        ("GN", format!("stub-{seed}")),
        ("PB", format!("stub-{seed}-black")),
        ("PW", format!("stub-{seed}-white")),
    ] {
        record.metadata.insert(key.to_string(), vec![value]);
    }
    let mut board = BoardState::new();
    for ply in 0..spec.moves {
        let analysis = stub_analyze(&spec.settings, &board);
        let color = analysis.color;
        let pick = PICKS[(ply as usize + seed as usize) % PICKS.len()];
        let listed: Vec<Coord> = analysis.suggestions.iter().map(|s| s.coord).collect();
        let coord = match listed.get(pick) {
            Some(&c) => c,
            None => legal_moves(&board, color)
                .into_iter()
                .find(|c| !c.is_pass() && !listed.contains(c))
                .unwrap_or(listed[0]),
        };
        if coord.is_pass() {
            break;
        }
        board = board.play(color, coord).expect("stub suggests legal moves");
        record.push(color, coord);
    }
    record
}

/// Shape of a constructed method-comparison suite.
#[derive(Debug, Clone, Copy)]
pub struct SuiteSpec {
    /// Games whose last record is uncertain after a decisive stretch.
    pub settled: usize,
    /// Games that stay decisive to the end.
    pub decisive: usize,
    pub moves: u32,
    pub simulation_setting: u32,
}

impl Default for SuiteSpec {
    fn default() -> Self {
        Self {
            settled: 7,
            decisive: 13,
            moves: 100,
            simulation_setting: 20000,
        }
    }
}

/// Plies before the end at which settled games turn balanced.
const SETTLE_MARGIN: u32 = 4;

fn winner_result(color: Color) -> String {
    format!("{}+R", color.letter())
}

/// Writes a suite of stub games into `dir` and returns the experiment that
/// runs it under both knowledge bases and both verdict methods.
///
/// Settled games are found by scanning seeds in order and keeping those
/// whose final record, replayed under the six-input base, is uncertain,
/// so the suite is the same on every run.
pub fn write_method_suite(dir: &Path, spec: &SuiteSpec) -> Result<ExperimentConfig, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::input(dir.display(), e))?;
    let mut games = Vec::new();
    let mut write = |name: String, settings: StubSettings, record: &GameRecord| {
        let path = dir.join(format!("{name}.sgf"));
        fs::write(&path, serialize_sgf(record)).map_err(|e| CliError::input(path.display(), e))?;
        games.push(GameEntry::Detailed {
            path,
            seed: Some(settings.seed),
            bias: settings.bias,
            settle_after: settings.settle_after,
        });
        Ok::<_, CliError>(())
    };
    let bias = |i: usize| if i % 2 == 0 { Color::Black } else { Color::White };

    for i in 0..spec.decisive {
        let settings = StubSettings {
            seed: 1000 + i as u64,
            simulation_setting: spec.simulation_setting,
            bias: Some(bias(i)),
            settle_after: None,
        };
        let record = synthesize(&SynthSpec {
            result: Some(winner_result(bias(i))),
            ..SynthSpec::new(settings, spec.moves)
        });
        write(format!("decisive-{i:02}"), settings, &record)?;
    }

    let mut kept = 0;
    let mut seed = 2000u64;
    while kept < spec.settled {
        if seed > 2000 + 50 * spec.settled as u64 + 50 {
            return Err(CliError::Input("could not construct enough settled games".into()));
        }
        let settings = StubSettings {
            seed,
            simulation_setting: spec.simulation_setting,
            bias: Some(bias(kept)),
            settle_after: Some(spec.moves.saturating_sub(SETTLE_MARGIN)),
        };
        seed += 1;
        let record = synthesize(&SynthSpec {
            result: Some(winner_result(bias(kept))),
            ..SynthSpec::new(settings, spec.moves)
        });
        let engine = EngineConfig {
            seed: settings.seed,
            simulation_setting: settings.simulation_setting,
            bias: settings.bias,
            settle_after: settings.settle_after,
            ..EngineConfig::default()
        };
        let options = ReplayOptions {
            engine,
            ..ReplayOptions::default()
        };
        let report = replay_record("probe", &record, &options)?.report;
        let ends_uncertain = report
            .cgs
            .last()
            .is_some_and(|r| r.label == CgsLabel::UncertainSituation);
        let winner_seen = report
            .cgs
            .iter()
            .any(|r| r.label.favors() == settings.bias);
        if ends_uncertain && winner_seen {
            write(format!("settled-{kept:02}"), settings, &record)?;
            kept += 1;
        }
    }

    let runs = FmlVariant::ALL
        .into_iter()
        .flat_map(|fml| [1u8, 2].map(move |m| (fml, m)))
        .map(|(fml, method)| RunConfig {
            name: format!("{}-method{method}", fml.as_str()),
            simulation_setting: Some(spec.simulation_setting),
            engine: EngineConfig::default(),
            fml_variant: fml,
            ogs_method: method,
            games: games.clone(),
        })
        .collect();
    Ok(ExperimentConfig { runs })
}
