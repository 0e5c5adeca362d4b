//! Post-game commentary: simulation-number and win-rate extremes per color,
//! the average win rate, the top-move rate and the overall verdict.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assessment::{MoveFeatures, Ogs, OgsVerdict};
use crate::go::Color;

/// Moves needed per color before a commentary can be written.
pub const MIN_MOVES: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SummaryError {
    #[error("{color} has {found} analyzed moves; at least {MIN_MOVES} are needed")]
    TooFewMoves { color: Color, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnMove {
    pub move_no: u32,
    pub sn: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WrMove {
    pub move_no: u32,
    pub wr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColorSummary {
    pub color: Color,
    /// Largest simulation numbers, largest first.
    pub highest_sn: [SnMove; 3],
    /// Smallest simulation numbers, smallest first.
    pub lowest_sn: [SnMove; 3],
    pub highest_wr: WrMove,
    pub lowest_wr: WrMove,
    pub average_wr: f64,
    /// Flat-profile top-move rate at the color's last move, in percent.
    pub tmr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Commentary {
    pub black: ColorSummary,
    pub white: ColorSummary,
    /// Never `Undecided`; that folds into `UncertainSituation`.
    pub ogs: Ogs,
}

fn summarize_color(features: &[MoveFeatures], color: Color) -> Result<ColorSummary, SummaryError> {
    let mut moves: Vec<&MoveFeatures> = features.iter().filter(|f| f.color == color).collect();
    if moves.len() < MIN_MOVES {
        return Err(SummaryError::TooFewMoves {
            color,
            found: moves.len(),
        });
    }
    moves.sort_by_key(|f| f.move_no);
    let sn = |f: &&MoveFeatures| SnMove {
        move_no: f.move_no,
        sn: f.sn,
    };
    let mut by_sn = moves.clone();
    // Stable sorts keep earlier moves first among equal values.
    by_sn.sort_by(|a, b| b.sn.cmp(&a.sn));
    let highest_sn = [sn(&by_sn[0]), sn(&by_sn[1]), sn(&by_sn[2])];
    by_sn.sort_by(|a, b| a.sn.cmp(&b.sn));
    let lowest_sn = [sn(&by_sn[0]), sn(&by_sn[1]), sn(&by_sn[2])];

    let mut highest = moves[0];
    let mut lowest = moves[0];
    for f in &moves[1..] {
        if f.wr > highest.wr {
            highest = f;
        }
        if f.wr < lowest.wr {
            lowest = f;
        }
    }
    let average_wr = moves.iter().map(|f| f.wr).sum::<f64>() / moves.len() as f64;
    Ok(ColorSummary {
        color,
        highest_sn,
        lowest_sn,
        highest_wr: WrMove {
            move_no: highest.move_no,
            wr: highest.wr,
        },
        lowest_wr: WrMove {
            move_no: lowest.move_no,
            wr: lowest.wr,
        },
        // Clamp guards against the mean drifting past an extreme by rounding.
        average_wr: average_wr.clamp(lowest.wr, highest.wr),
        tmr: moves.last().expect("non-empty").tmr(),
    })
}

pub fn summarize(features: &[MoveFeatures], ogs: &OgsVerdict) -> Result<Commentary, SummaryError> {
    Ok(Commentary {
        black: summarize_color(features, Color::Black)?,
        white: summarize_color(features, Color::White)?,
        ogs: match ogs.verdict {
            Ogs::Undecided => Ogs::UncertainSituation,
            v => v,
        },
    })
}

/// Two decimals, ties rounded up. The small nudge absorbs binary
/// representation error so that 54.445 prints as 54.45.
pub fn format_percent(value: f64) -> String {
    let hundredths = (value * 100.0 + 0.5 + 1e-7).floor();
    format!("{:.2}%", hundredths / 100.0)
}

fn sn_token(color: Color, m: &SnMove) -> String {
    format!("{}{} ({})", color.letter(), m.move_no, m.sn)
}

fn wr_token(color: Color, m: &WrMove) -> String {
    format!("{}{} ({})", color.letter(), m.move_no, format_percent(m.wr * 100.0))
}

fn list(items: [String; 3]) -> String {
    let [a, b, c] = items;
    format!("{a}, {b}, and {c}")
}

pub fn ogs_phrase(ogs: Ogs) -> &'static str {
    match ogs {
        Ogs::FavorableToBlack => "favorable to Black",
        Ogs::FavorableToWhite => "favorable to White",
        Ogs::UncertainSituation | Ogs::Undecided => "uncertain situation",
    }
}

pub fn render_text(commentary: &Commentary) -> String {
    let mut out = String::new();
    for s in [&commentary.black, &commentary.white] {
        let c = s.color;
        let name = match c {
            Color::Black => "Black",
            Color::White => "White",
        };
        let _ = writeln!(out, "{name}:");
        let _ = writeln!(
            out,
            "- The first 3 highest simulation numbers occurred at Moves {}. \
             The last 3 lowest simulation numbers occurred at Moves {}.",
            list(s.highest_sn.each_ref().map(|m| sn_token(c, m))),
            list(s.lowest_sn.each_ref().map(|m| sn_token(c, m))),
        );
        let _ = writeln!(
            out,
            "- The information of estimated possible win rate: The highest win rate is {}, \
             the lowest win rate is {}, and the average win rate is {}.",
            wr_token(c, &s.highest_wr),
            wr_token(c, &s.lowest_wr),
            format_percent(s.average_wr * 100.0),
        );
        let _ = writeln!(out, "- Top-move rate is {}.", format_percent(s.tmr));
    }
    let _ = writeln!(
        out,
        "Overall game situation is {}.",
        ogs_phrase(commentary.ogs)
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn feat(move_no: u32, sn: u32, wr: f64, tmr: f64) -> MoveFeatures {
        MoveFeatures {
            move_no,
            color: if move_no % 2 == 1 { Color::Black } else { Color::White },
            matched_rank: Some(1),
            sn,
            wr,
            tmr_after: [tmr; 3],
        }
    }

    fn verdict(v: Ogs) -> OgsVerdict {
        OgsVerdict {
            method: 2,
            verdict: v,
            correct: None,
            window: vec![],
        }
    }

    #[test]
    fn win_rate_extremes_and_mean() {
        let wrs = [0.50, 0.52, 0.48, 0.55, 0.45, 0.50];
        let features: Vec<_> = (0..12)
            .map(|i| feat(i + 1, 1000 + i, wrs[(i / 2) as usize], 100.0))
            .collect();
        let c = summarize(&features, &verdict(Ogs::FavorableToBlack)).unwrap();
        assert_eq!(c.black.highest_wr, WrMove { move_no: 7, wr: 0.55 });
        assert_eq!(c.black.lowest_wr, WrMove { move_no: 9, wr: 0.45 });
        assert_eq!(format_percent(c.black.average_wr * 100.0), "50.00%");
        assert_eq!(c.black.tmr, 100.0);
    }

    #[test]
    fn sn_ties_list_earlier_moves_first() {
        let features = vec![
            feat(1, 500, 0.5, 0.0),
            feat(3, 900, 0.5, 0.0),
            feat(5, 900, 0.5, 0.0),
            feat(7, 100, 0.5, 0.0),
            feat(2, 1, 0.5, 0.0),
            feat(4, 1, 0.5, 0.0),
            feat(6, 1, 0.5, 0.0),
        ];
        let c = summarize(&features, &verdict(Ogs::Undecided)).unwrap();
        let moves: Vec<u32> = c.black.highest_sn.iter().map(|m| m.move_no).collect();
        assert_eq!(moves, [3, 5, 1]);
        let moves: Vec<u32> = c.black.lowest_sn.iter().map(|m| m.move_no).collect();
        assert_eq!(moves, [7, 1, 3]);
        assert_eq!(c.ogs, Ogs::UncertainSituation);
    }

    #[test]
    fn too_few_moves() {
        let features = vec![feat(1, 1, 0.5, 0.0), feat(2, 1, 0.5, 0.0), feat(3, 1, 0.5, 0.0)];
        assert_eq!(
            summarize(&features, &verdict(Ogs::FavorableToBlack)),
            Err(SummaryError::TooFewMoves {
                color: Color::Black,
                found: 2
            })
        );
    }

    #[test]
    fn percent_rounding() {
        assert_eq!(format_percent(0.5445 * 100.0), "54.45%");
        assert_eq!(format_percent(46.0), "46.00%");
        assert_eq!(format_percent(29.005), "29.01%");
        assert_eq!(format_percent(100.0), "100.00%");
    }

    fn summary(color: Color, sns: [(u32, u32); 6], wr: [(u32, f64); 2], avg: f64, tmr: f64) -> ColorSummary {
        let s = |i: usize| SnMove {
            move_no: sns[i].0,
            sn: sns[i].1,
        };
        ColorSummary {
            color,
            highest_sn: [s(0), s(1), s(2)],
            lowest_sn: [s(3), s(4), s(5)],
            highest_wr: WrMove {
                move_no: wr[0].0,
                wr: wr[0].1,
            },
            lowest_wr: WrMove {
                move_no: wr[1].0,
                wr: wr[1].1,
            },
            average_wr: avg,
            tmr,
        }
    }

    #[test]
    fn renders_fixed_skeleton() {
        let c = Commentary {
            black: summary(
                Color::Black,
                [(117, 20152), (43, 20148), (55, 20132), (25, 2359), (113, 2635), (21, 2678)],
                [(17, 0.5445), (117, 0.2901)],
                0.46,
                54.24,
            ),
            white: summary(
                Color::White,
                [(116, 20017), (102, 20017), (92, 20017), (112, 1606), (76, 3979), (88, 4316)],
                [(118, 0.7406), (16, 0.4569)],
                0.5465,
                89.83,
            ),
            ogs: Ogs::FavorableToWhite,
        };
        let expected = "\
Black:
- The first 3 highest simulation numbers occurred at Moves B117 (20152), B43 (20148), and B55 (20132). The last 3 lowest simulation numbers occurred at Moves B25 (2359), B113 (2635), and B21 (2678).
- The information of estimated possible win rate: The highest win rate is B17 (54.45%), the lowest win rate is B117 (29.01%), and the average win rate is 46.00%.
- Top-move rate is 54.24%.
White:
- The first 3 highest simulation numbers occurred at Moves W116 (20017), W102 (20017), and W92 (20017). The last 3 lowest simulation numbers occurred at Moves W112 (1606), W76 (3979), and W88 (4316).
- The information of estimated possible win rate: The highest win rate is W118 (74.06%), the lowest win rate is W16 (45.69%), and the average win rate is 54.65%.
- Top-move rate is 89.83%.
Overall game situation is favorable to White.
";
        assert_eq!(render_text(&c), expected);
    }

    /// Pulls `(letter, move, sn)` out of "B117 (20152)"-style tokens.
    fn sn_tokens(line: &str) -> Vec<(char, u32, u32)> {
        line.split("Moves ")
            .skip(1)
            .flat_map(|part| part.split(", "))
            .filter_map(|t| {
                let t = t.trim_start_matches("and ").trim_end_matches('.');
                let (head, tail) = t.split_once(" (")?;
                let letter = head.chars().next()?;
                let mv = head[1..].parse().ok()?;
                let sn = tail.split(')').next()?.parse().ok()?;
                Some((letter, mv, sn))
            })
            .collect()
    }

    proptest! {
        #[test]
        fn rendered_tokens_recover_extremes(
            sns in prop::collection::vec(0u32..30000, 6..40),
            wrs in prop::collection::vec(0.0f64..=1.0, 6..40),
        ) {
            let n = sns.len().min(wrs.len());
            let features: Vec<_> = (0..n)
                .map(|i| feat(i as u32 + 1, sns[i], wrs[i], 50.0))
                .collect();
            let c = summarize(&features, &verdict(Ogs::FavorableToWhite)).unwrap();
            for s in [&c.black, &c.white] {
                prop_assert!(s.highest_sn.windows(2).all(|w| w[0].sn >= w[1].sn));
                prop_assert!(s.lowest_sn.windows(2).all(|w| w[0].sn <= w[1].sn));
                prop_assert!(s.lowest_wr.wr <= s.average_wr && s.average_wr <= s.highest_wr.wr);
            }
            let text = render_text(&c);
            let lines: Vec<&str> = text.lines().collect();
            for (line, s) in [(lines[1], &c.black), (lines[5], &c.white)] {
                let tokens = sn_tokens(line);
                let expect: Vec<_> = s.highest_sn.iter().chain(&s.lowest_sn)
                    .map(|m| (s.color.letter(), m.move_no, m.sn))
                    .collect();
                prop_assert_eq!(tokens, expect);
            }
            prop_assert_eq!(render_text(&c), text);
        }
    }
}
