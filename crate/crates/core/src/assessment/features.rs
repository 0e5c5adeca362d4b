use serde::{Deserialize, Serialize};

use super::AssessmentError;
use crate::analysis::{MoveAnalysis, MAX_SUGGESTIONS};
use crate::go::{Color, Move};

/// Rank weights `w1..w5` and the mismatch weight `w6` (sign included).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TmrProfile {
    pub weights: [f64; 5],
    pub mismatch: f64,
}

impl TmrProfile {
    /// Every top-five hit counts fully; misses are ignored.
    pub const FLAT: TmrProfile = TmrProfile {
        weights: [1.0; 5],
        mismatch: 0.0,
    };
    /// Lower ranks count less and misses are penalized.
    pub const TAPERED: TmrProfile = TmrProfile {
        weights: [1.0, 0.8, 0.6, 0.4, 0.2],
        mismatch: 0.1,
    };
    /// As `TAPERED`, but the negative mismatch weight rewards misses.
    pub const TAPERED_REWARD: TmrProfile = TmrProfile {
        weights: [1.0, 0.8, 0.6, 0.4, 0.2],
        mismatch: -0.1,
    };
    pub const ALL: [TmrProfile; 3] = [Self::FLAT, Self::TAPERED, Self::TAPERED_REWARD];
}

/// Cumulative rank-match counters for one color.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TmrState {
    pub color: Color,
    /// `hits[k]` counts moves that matched suggestion `k + 1`.
    pub hits: [u32; MAX_SUGGESTIONS],
    pub misses: u32,
}

impl TmrState {
    pub fn new(color: Color) -> Self {
        Self {
            color,
            hits: [0; MAX_SUGGESTIONS],
            misses: 0,
        }
    }

    /// Moves counted so far.
    pub fn n(&self) -> u32 {
        self.hits.iter().sum::<u32>() + self.misses
    }

    pub fn matched(&self) -> u32 {
        self.hits.iter().sum()
    }

    fn record(mut self, rank: Option<u8>) -> Self {
        match rank {
            Some(k) => self.hits[k as usize - 1] += 1,
            None => self.misses += 1,
        }
        self
    }
}

/// Top-move rate in percent. The mismatch term is subtracted.
pub fn compute_tmr(state: &TmrState, profile: &TmrProfile) -> Result<f64, AssessmentError> {
    let n = state.n();
    if n == 0 {
        return Err(AssessmentError::NoMoves(state.color));
    }
    let n = f64::from(n);
    // Summing before dividing keeps the flat profile exactly matched / n.
    let hits: f64 = state
        .hits
        .iter()
        .zip(profile.weights)
        .map(|(&x, w)| f64::from(x) * w)
        .sum();
    Ok(100.0 * (hits / n - f64::from(state.misses) * profile.mismatch / n))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoveFeatures {
    pub move_no: u32,
    pub color: Color,
    /// 1-based rank of the played move; `None` when outside the suggestions.
    pub matched_rank: Option<u8>,
    pub sn: u32,
    pub wr: f64,
    /// Top-move rate after this move under each of [`TmrProfile::ALL`].
    pub tmr_after: [f64; 3],
}

impl MoveFeatures {
    /// TMR under the flat profile, the one fed to inference.
    pub fn tmr(&self) -> f64 {
        self.tmr_after[0]
    }
}

/// Picks `(sn, wr)` for the played move and advances the color's counters.
/// A move outside the suggestions falls back to the top suggestion's values.
pub fn extract_features(
    analysis: &MoveAnalysis,
    actual: &Move,
    state: &TmrState,
) -> Result<(MoveFeatures, TmrState), AssessmentError> {
    if analysis.color != actual.color || state.color != actual.color {
        return Err(AssessmentError::ColorMismatch {
            analysis: analysis.color,
            played: actual.color,
        });
    }
    if analysis.move_no != actual.number {
        return Err(AssessmentError::MoveMismatch {
            analysis: analysis.move_no,
            played: actual.number,
        });
    }
    if analysis.suggestions.is_empty() {
        return Err(AssessmentError::NoSuggestions(actual.number));
    }
    let rank = analysis.rank_of(actual.coord);
    let pick = &analysis.suggestions[rank.map_or(0, |k| k as usize - 1)];
    let next = state.record(rank);
    let mut tmr_after = [0.0; 3];
    for (slot, profile) in tmr_after.iter_mut().zip(&TmrProfile::ALL) {
        *slot = compute_tmr(&next, profile)?;
    }
    let features = MoveFeatures {
        move_no: actual.number,
        color: actual.color,
        matched_rank: rank,
        sn: pick.sn,
        wr: pick.wr,
        tmr_after,
    };
    Ok((features, next))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::Suggestion;
    use proptest::prelude::*;

    fn state(hits: [u32; 5], misses: u32) -> TmrState {
        TmrState {
            color: Color::Black,
            hits,
            misses,
        }
    }

    #[test]
    fn tmr_worked_example() {
        let s = state([11, 5, 6, 1, 0], 3);
        assert_eq!(s.n(), 26);
        let flat = compute_tmr(&s, &TmrProfile::FLAT).unwrap();
        assert!((flat - 88.4615).abs() < 1e-3, "{flat}");
        let tapered = compute_tmr(&s, &TmrProfile::TAPERED).unwrap();
        assert!((tapered - 71.9231).abs() < 1e-3, "{tapered}");
        let reward = compute_tmr(&s, &TmrProfile::TAPERED_REWARD).unwrap();
        assert!((reward - 74.2308).abs() < 1e-3, "{reward}");
    }

    #[test]
    fn tmr_needs_moves() {
        assert_eq!(
            compute_tmr(&state([0; 5], 0), &TmrProfile::FLAT),
            Err(AssessmentError::NoMoves(Color::Black))
        );
    }

    // Suggestions at move 51 for Black, best first.
    fn analysis_of(move_no: u32, color: Color, rows: &[(&str, u32, f64)]) -> MoveAnalysis {
        MoveAnalysis::new(
            move_no,
            color,
            rows.iter()
                .map(|&(v, sn, wr)| Suggestion::new(v.parse().unwrap(), sn, wr))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn black_b1_matches_rank_one() {
        let a = analysis_of(
            51,
            Color::Black,
            &[
                ("B1", 12983, 0.46114),
                ("C2", 2321, 0.45021),
                ("F2", 1470, 0.44280),
                ("B2", 1102, 0.43907),
                ("G2", 806, 0.43015),
            ],
        );
        let mv = Move::new(Color::Black, "B1".parse().unwrap(), 51);
        let (f, s) = extract_features(&a, &mv, &TmrState::new(Color::Black)).unwrap();
        assert_eq!(f.matched_rank, Some(1));
        assert_eq!(f.sn, 12983);
        assert_eq!(f.wr, 0.46114);
        assert_eq!(s.hits, [1, 0, 0, 0, 0]);
        assert_eq!(f.tmr(), 100.0);
    }

    #[test]
    fn white_g2_takes_its_own_values() {
        let a = analysis_of(
            52,
            Color::White,
            &[("C2", 15320, 0.55012), ("G2", 13877, 0.53501), ("F2", 900, 0.52)],
        );
        let mv = Move::new(Color::White, "G2".parse().unwrap(), 52);
        let (f, s) = extract_features(&a, &mv, &TmrState::new(Color::White)).unwrap();
        assert_eq!((f.matched_rank, f.sn, f.wr), (Some(2), 13877, 0.53501));
        assert_eq!(s.hits[1], 1);
    }

    #[test]
    fn miss_falls_back_to_top_suggestion() {
        let a = analysis_of(7, Color::Black, &[("D4", 900, 0.51), ("Q16", 800, 0.5)]);
        let mv = Move::new(Color::Black, "K10".parse().unwrap(), 7);
        let (f, s) = extract_features(&a, &mv, &TmrState::new(Color::Black)).unwrap();
        assert_eq!((f.matched_rank, f.sn, f.wr), (None, 900, 0.51));
        assert_eq!((s.misses, s.n()), (1, 1));
        assert_eq!(f.tmr_after, [0.0, -10.0, 10.0]);
    }

    #[test]
    fn mismatched_inputs_are_rejected() {
        let a = analysis_of(7, Color::Black, &[("D4", 900, 0.51)]);
        let white = Move::new(Color::White, "D4".parse().unwrap(), 7);
        assert!(matches!(
            extract_features(&a, &white, &TmrState::new(Color::White)),
            Err(AssessmentError::ColorMismatch { .. })
        ));
        let late = Move::new(Color::Black, "D4".parse().unwrap(), 9);
        assert!(matches!(
            extract_features(&a, &late, &TmrState::new(Color::Black)),
            Err(AssessmentError::MoveMismatch { .. })
        ));
        let empty = MoveAnalysis {
            move_no: 7,
            color: Color::Black,
            suggestions: vec![],
        };
        let mv = Move::new(Color::Black, "D4".parse().unwrap(), 7);
        assert_eq!(
            extract_features(&empty, &mv, &TmrState::new(Color::Black)),
            Err(AssessmentError::NoSuggestions(7))
        );
    }

    proptest! {
        #[test]
        fn counters_track_every_move(ranks in proptest::collection::vec(proptest::option::of(1u8..=5), 1..80)) {
            let mut s = TmrState::new(Color::White);
            for (i, rank) in ranks.iter().enumerate() {
                let pts = ["A1", "B1", "C1", "D1", "E1"];
                let a = analysis_of(2 * i as u32 + 2, Color::White,
                    &pts.iter().enumerate().map(|(k, p)| (*p, 100 - k as u32, 0.5)).collect::<Vec<_>>());
                let played = rank.map_or("K10", |k| pts[k as usize - 1]);
                let mv = Move::new(Color::White, played.parse().unwrap(), 2 * i as u32 + 2);
                let (f, next) = extract_features(&a, &mv, &s).unwrap();
                prop_assert_eq!(f.matched_rank, *rank);
                s = next;
            }
            prop_assert_eq!(s.n() as usize, ranks.len());
            let matched = ranks.iter().filter(|r| r.is_some()).count() as f64;
            let flat = compute_tmr(&s, &TmrProfile::FLAT).unwrap();
            prop_assert_eq!(flat, 100.0 * (matched / ranks.len() as f64));
        }
    }
}
