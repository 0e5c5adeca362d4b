use std::fmt;

use serde::{Deserialize, Serialize};

use super::cgs::CgsRecord;
use super::{AssessmentError, CgsLabel};
use crate::go::Color;

/// Records Method 2 collects.
pub const METHOD2_WINDOW: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ogs {
    FavorableToBlack,
    FavorableToWhite,
    UncertainSituation,
    /// Too few decisive records to call.
    Undecided,
}

impl Ogs {
    pub fn side(self) -> Option<Color> {
        match self {
            Ogs::FavorableToBlack => Some(Color::Black),
            Ogs::FavorableToWhite => Some(Color::White),
            _ => None,
        }
    }

    fn from_side(side: Option<Color>) -> Self {
        match side {
            Some(Color::Black) => Ogs::FavorableToBlack,
            Some(Color::White) => Ogs::FavorableToWhite,
            None => Ogs::UncertainSituation,
        }
    }
}

impl fmt::Display for Ogs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ogs::FavorableToBlack => "FavorableToBlack",
            Ogs::FavorableToWhite => "FavorableToWhite",
            Ogs::UncertainSituation => "UncertainSituation",
            Ogs::Undecided => "Undecided",
        })
    }
}

/// Outcome encoded in an SGF `RE` value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Win(Color),
    Draw,
    Unknown,
}

impl Outcome {
    /// `B+R`, `W+0.5`, `0`/`Draw`/`Jigo` and anything else as unknown.
    pub fn parse(result: Option<&str>) -> Outcome {
        let Some(text) = result.map(str::trim) else {
            return Outcome::Unknown;
        };
        let upper = text.to_ascii_uppercase();
        if upper.starts_with("B+") {
            Outcome::Win(Color::Black)
        } else if upper.starts_with("W+") {
            Outcome::Win(Color::White)
        } else if matches!(upper.as_str(), "0" | "DRAW" | "JIGO") {
            Outcome::Draw
        } else {
            Outcome::Unknown
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OgsVerdict {
    pub method: u8,
    pub verdict: Ogs,
    /// Set only when the game result is known.
    pub correct: Option<bool>,
    /// Move numbers of the records the verdict rests on.
    pub window: Vec<u32>,
}

fn correctness(outcome: Outcome, verdict: Ogs, any_match: impl FnOnce(Color) -> bool) -> Option<bool> {
    match outcome {
        Outcome::Win(winner) => Some(any_match(winner)),
        Outcome::Draw => Some(verdict == Ogs::UncertainSituation),
        Outcome::Unknown => None,
    }
}

/// Verdict from the last record alone.
pub fn decide_ogs_method1(
    series: &[CgsRecord],
    result: Option<&str>,
) -> Result<OgsVerdict, AssessmentError> {
    let last = series.last().ok_or(AssessmentError::EmptySeries)?;
    let verdict = Ogs::from_side(last.label.favors());
    Ok(OgsVerdict {
        method: 1,
        verdict,
        correct: correctness(Outcome::parse(result), verdict, |w| verdict.side() == Some(w)),
        window: vec![last.move_no],
    })
}

/// Scans back from the end, skipping uncertain records, until five decisive
/// ones are found. Correct when any of them favors the winner; the reported
/// side is the majority of the five.
pub fn decide_ogs_method2(
    series: &[CgsRecord],
    result: Option<&str>,
) -> Result<OgsVerdict, AssessmentError> {
    if series.is_empty() {
        return Err(AssessmentError::EmptySeries);
    }
    let window: Vec<&CgsRecord> = series
        .iter()
        .rev()
        .filter(|r| r.label != CgsLabel::UncertainSituation)
        .take(METHOD2_WINDOW)
        .collect();
    let moves: Vec<u32> = window.iter().rev().map(|r| r.move_no).collect();
    let outcome = Outcome::parse(result);
    if window.len() < METHOD2_WINDOW {
        return Ok(OgsVerdict {
            method: 2,
            verdict: Ogs::Undecided,
            correct: match outcome {
                Outcome::Unknown => None,
                _ => Some(false),
            },
            window: moves,
        });
    }
    let black = window
        .iter()
        .filter(|r| r.label.favors() == Some(Color::Black))
        .count();
    let white = window.len() - black;
    let verdict = Ogs::from_side(match black.cmp(&white) {
        std::cmp::Ordering::Greater => Some(Color::Black),
        std::cmp::Ordering::Less => Some(Color::White),
        std::cmp::Ordering::Equal => None,
    });
    let correct = correctness(outcome, verdict, |w| {
        window.iter().any(|r| r.label.favors() == Some(w))
    });
    Ok(OgsVerdict {
        method: 2,
        verdict,
        correct,
        window: moves,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assessment::cgs::CgsInputs;
    use proptest::prelude::*;
    use CgsLabel::*;

    fn series(labels: &[CgsLabel]) -> Vec<CgsRecord> {
        labels
            .iter()
            .enumerate()
            .map(|(i, &label)| CgsRecord {
                move_no: 11 + i as u32,
                inputs: CgsInputs {
                    bsn: 0.0,
                    wsn: 0.0,
                    bwr: 0.0,
                    wwr: 0.0,
                    btmr: 0.0,
                    wtmr: 0.0,
                },
                crisp_cgs: 50.0,
                label,
                clamped: vec![],
            })
            .collect()
    }

    #[test]
    fn outcome_parsing() {
        assert_eq!(Outcome::parse(Some("B+R")), Outcome::Win(Color::Black));
        assert_eq!(Outcome::parse(Some("w+0.5")), Outcome::Win(Color::White));
        assert_eq!(Outcome::parse(Some("0")), Outcome::Draw);
        assert_eq!(Outcome::parse(Some("?")), Outcome::Unknown);
        assert_eq!(Outcome::parse(None), Outcome::Unknown);
    }

    #[test]
    fn method1_follows_last_label() {
        let v = decide_ogs_method1(&series(&[WhitePossibleAdvantage, BlackObviousAdvantage]), Some("B+R")).unwrap();
        assert_eq!((v.verdict, v.correct), (Ogs::FavorableToBlack, Some(true)));
        let v = decide_ogs_method1(&series(&[UncertainSituation]), Some("W+0.5")).unwrap();
        assert_eq!((v.verdict, v.correct), (Ogs::UncertainSituation, Some(false)));
        let v = decide_ogs_method1(&series(&[BlackPossibleAdvantage]), None).unwrap();
        assert_eq!(v.correct, None);
        assert_eq!(decide_ogs_method1(&[], None), Err(AssessmentError::EmptySeries));
    }

    #[test]
    fn method2_mixed_window_skips_uncertain() {
        let s = series(&[
            WhitePossibleAdvantage,
            WhitePossibleAdvantage,
            WhitePossibleAdvantage,
            UncertainSituation,
            WhiteObviousAdvantage,
            WhitePossibleAdvantage,
        ]);
        let v = decide_ogs_method2(&s, Some("W+R")).unwrap();
        assert_eq!((v.verdict, v.correct), (Ogs::FavorableToWhite, Some(true)));
        assert_eq!(v.window, [11, 12, 13, 15, 16]);
    }

    #[test]
    fn method2_looks_past_uncertain_tail() {
        let mut labels = vec![
            BlackPossibleAdvantage,
            WhitePossibleAdvantage,
            WhitePossibleAdvantage,
            BlackObviousAdvantage,
            WhitePossibleAdvantage,
        ];
        labels.extend([UncertainSituation; 5]);
        let v = decide_ogs_method2(&series(&labels), Some("B+R")).unwrap();
        assert_eq!(v.correct, Some(true));
        assert_eq!(v.verdict, Ogs::FavorableToWhite);
        let m1 = decide_ogs_method1(&series(&labels), Some("B+R")).unwrap();
        assert_eq!(m1.correct, Some(false));
    }

    #[test]
    fn method2_exhaustion_is_undecided() {
        let s = series(&[BlackPossibleAdvantage, UncertainSituation, BlackPossibleAdvantage]);
        let v = decide_ogs_method2(&s, Some("B+R")).unwrap();
        assert_eq!((v.verdict, v.correct), (Ogs::Undecided, Some(false)));
        let v = decide_ogs_method2(&s, None).unwrap();
        assert_eq!(v.correct, None);
    }

    fn label() -> impl Strategy<Value = CgsLabel> {
        prop::sample::select(CgsLabel::ALL.to_vec())
    }

    proptest! {
        #[test]
        fn method2_dominates_method1(
            mut labels in prop::collection::vec(label(), 5..60),
            black_wins: bool,
        ) {
            let winner = if black_wins { Color::Black } else { Color::White };
            let last = if black_wins { BlackPossibleAdvantage } else { WhiteObviousAdvantage };
            labels.push(last);
            let decisive = labels.iter().filter(|l| l.favors().is_some()).count();
            prop_assume!(decisive >= METHOD2_WINDOW);
            let s = series(&labels);
            let re = if winner == Color::Black { "B+R" } else { "W+R" };
            prop_assert_eq!(decide_ogs_method1(&s, Some(re)).unwrap().correct, Some(true));
            prop_assert_eq!(decide_ogs_method2(&s, Some(re)).unwrap().correct, Some(true));
        }

        #[test]
        fn correctness_only_with_a_result(labels in prop::collection::vec(label(), 1..30)) {
            let s = series(&labels);
            prop_assert_eq!(decide_ogs_method1(&s, None).unwrap().correct, None);
            prop_assert_eq!(decide_ogs_method2(&s, Some("?")).unwrap().correct, None);
        }
    }
}
