//! Deterministic stand-in for a real analysis engine.

use fdaa_core::analysis::{MoveAnalysis, Suggestion, MAX_SUGGESTIONS};
use fdaa_core::go::{legal_moves, BoardState, Color, Coord};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Largest win-rate lead the drift reaches.
const MAX_DRIFT: f64 = 0.25;
const DRIFT_PER_PLY: f64 = 0.003;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StubSettings {
    pub seed: u64,
    pub simulation_setting: u32,
    /// Side the win rates drift toward; derived from the seed when unset.
    #[serde(default)]
    pub bias: Option<Color>,
    /// From this ply on the position reads as balanced.
    #[serde(default)]
    pub settle_after: Option<u32>,
}

impl StubSettings {
    pub fn new(seed: u64, simulation_setting: u32) -> Self {
        Self {
            seed,
            simulation_setting,
            bias: None,
            settle_after: None,
        }
    }

    pub fn favored(&self) -> Color {
        self.bias.unwrap_or(if self.seed % 2 == 0 {
            Color::Black
        } else {
            Color::White
        })
    }
}

fn rng_for(settings: &StubSettings, board: &BoardState) -> ChaCha8Rng {
    // splitmix-style finalizer so nearby seeds and hashes decorrelate
    let mut z = settings.seed
        ^ board.position_hash().rotate_left(21)
        ^ u64::from(board.ply()).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ u64::from(settings.simulation_setting) << 40;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

/// Suggestions for `color` on `board`: up to five distinct legal moves,
/// simulation counts non-increasing and summing to at most the setting,
/// win rates in [0.2, 0.8] leaning toward the favored color as the game
/// goes on.
pub fn stub_suggestions(settings: &StubSettings, board: &BoardState, color: Color) -> Vec<Suggestion> {
    let mut rng = rng_for(settings, board);
    let mut points: Vec<Coord> = legal_moves(board, color)
        .into_iter()
        .filter(|c| !c.is_pass())
        .collect();
    let budget = settings.simulation_setting.max(1);
    if points.is_empty() {
        return vec![Suggestion::new(Coord::Pass, budget / 2, 0.5)];
    }
    points.shuffle(&mut rng);
    points.truncate(MAX_SUGGESTIONS);

    let settled = settings.settle_after.is_some_and(|k| board.ply() >= k);
    let favored = color == settings.favored();
    let lead = if settled {
        0.0
    } else {
        (f64::from(board.ply()) * DRIFT_PER_PLY).min(MAX_DRIFT)
    };

    // Stronger sides concentrate search on one move.
    let top_share = match (settled, favored) {
        (true, _) => rng.random_range(0.45..0.50),
        (false, true) => rng.random_range(0.55..0.70),
        (false, false) => rng.random_range(0.25..0.40),
    };
    let spent = f64::from(budget) * rng.random_range(0.80..1.0);
    let mut rest: Vec<f64> = (1..points.len()).map(|_| rng.random_range(0.1..1.0)).collect();
    rest.sort_by(|a, b| b.total_cmp(a));
    let rest_total: f64 = rest.iter().sum::<f64>().max(f64::EPSILON);
    let mut sns = vec![(spent * top_share).floor() as u32];
    for w in &rest {
        sns.push((spent * (1.0 - top_share) * w / rest_total).floor() as u32);
    }
    for i in 1..sns.len() {
        sns[i] = sns[i].min(sns[i - 1]);
    }

    let centre = if favored { 0.5 + lead } else { 0.5 - lead };
    let top_wr = (centre + rng.random_range(-0.02..0.02)).clamp(0.2, 0.8);
    let mut wr = top_wr;
    points
        .into_iter()
        .zip(sns)
        .map(|(coord, sn)| {
            let s = Suggestion::new(coord, sn, round5(wr));
            wr = (wr - rng.random_range(0.0..0.015)).clamp(0.2, 0.8);
            s
        })
        .collect()
}

fn round5(x: f64) -> f64 {
    (x * 1e5).round() / 1e5
}

/// Normalized analysis for the side to move.
pub fn stub_analyze(settings: &StubSettings, board: &BoardState) -> MoveAnalysis {
    let color = board.to_move();
    MoveAnalysis::new(board.ply() + 1, color, stub_suggestions(settings, board, color))
        .expect("stub output satisfies analysis invariants")
}

/// A stub engine that tracks its own board, for the GTP server and the
/// in-process session backend.
#[derive(Debug, Clone)]
pub struct StubEngine {
    settings: StubSettings,
    board: BoardState,
    komi: f64,
}

impl StubEngine {
    pub fn new(settings: StubSettings) -> Self {
        Self {
            settings,
            board: BoardState::new(),
            komi: 0.0,
        }
    }

    pub fn settings(&self) -> &StubSettings {
        &self.settings
    }

    pub fn board(&self) -> &BoardState {
        &self.board
    }

    pub fn komi(&self) -> f64 {
        self.komi
    }

    pub fn clear(&mut self) {
        self.board = BoardState::new();
    }

    pub fn set_komi(&mut self, komi: f64) {
        self.komi = komi;
    }

    /// Places handicap stones on an empty board; White moves next.
    pub fn setup(&mut self, black: &[fdaa_core::go::Point]) -> bool {
        if self.board.stone_count() > 0 || self.board.ply() > 0 {
            return false;
        }
        self.board = BoardState::with_setup(black, &[], Color::White);
        true
    }

    pub fn play(&mut self, color: Color, coord: Coord) -> bool {
        match self.board.play(color, coord) {
            Ok(next) => {
                self.board = next;
                true
            }
            Err(_) => false,
        }
    }

    pub fn analyze(&self, color: Color) -> Vec<Suggestion> {
        stub_suggestions(&self.settings, &self.board, color)
    }

    /// Plays and returns the top suggestion.
    pub fn genmove(&mut self, color: Color) -> Coord {
        let best = self
            .analyze(color)
            .first()
            .map_or(Coord::Pass, |s| s.coord);
        if self.play(color, best) {
            best
        } else {
            self.play(color, Coord::Pass);
            Coord::Pass
        }
    }
}
