//! Engine output for one turn: the top suggestions with simulation counts
//! and win rates.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::go::{BoardState, Color, Coord};

pub const MAX_SUGGESTIONS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Suggestion {
    #[serde(rename = "vertex")]
    pub coord: Coord,
    /// MCTS simulation count.
    pub sn: u32,
    /// Win rate for the side to move.
    pub wr: f64,
}

impl Suggestion {
    pub fn new(coord: Coord, sn: u32, wr: f64) -> Self {
        Self { coord, sn, wr }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("analysis carries no suggestions")]
    Empty,
    #[error("win rate {wr} for {coord} is outside [0, 1]")]
    WinRate { coord: Coord, wr: f64 },
    #[error("suggestion {0} appears twice")]
    Duplicate(Coord),
    #[error("suggestion {0} is not a legal move")]
    Illegal(Coord),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoveAnalysis {
    /// Ply about to be played.
    pub move_no: u32,
    pub color: Color,
    /// At most five, sorted by `sn` descending.
    pub suggestions: Vec<Suggestion>,
}

impl MoveAnalysis {
    /// Normalizes an engine reply: sorts by simulation count (stable, so
    /// equal counts keep engine order), keeps the top five and checks the
    /// remaining invariants.
    pub fn new(
        move_no: u32,
        color: Color,
        mut suggestions: Vec<Suggestion>,
    ) -> Result<Self, AnalysisError> {
        if suggestions.is_empty() {
            return Err(AnalysisError::Empty);
        }
        suggestions.sort_by(|a, b| b.sn.cmp(&a.sn));
        suggestions.truncate(MAX_SUGGESTIONS);
        let mut seen = HashSet::new();
        for s in &suggestions {
            if !(0.0..=1.0).contains(&s.wr) {
                return Err(AnalysisError::WinRate {
                    coord: s.coord,
                    wr: s.wr,
                });
            }
            if !seen.insert(s.coord) {
                return Err(AnalysisError::Duplicate(s.coord));
            }
        }
        Ok(Self {
            move_no,
            color,
            suggestions,
        })
    }

    /// Checks every suggestion is playable for `color` on `board`.
    pub fn check_legal(&self, board: &BoardState) -> Result<(), AnalysisError> {
        match self
            .suggestions
            .iter()
            .find(|s| !board.is_legal(self.color, s.coord))
        {
            Some(s) => Err(AnalysisError::Illegal(s.coord)),
            None => Ok(()),
        }
    }

    /// 1-based rank of `coord` among the suggestions.
    pub fn rank_of(&self, coord: Coord) -> Option<u8> {
        self.suggestions
            .iter()
            .position(|s| s.coord == coord)
            .map(|i| i as u8 + 1)
    }

    pub fn top(&self) -> &Suggestion {
        &self.suggestions[0]
    }
}
