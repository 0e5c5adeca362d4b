//! Per-move features, top-move rates, the fuzzy knowledge base and rule
//! base, current-situation inference and whole-game verdicts.

mod cgs;
mod features;
mod kb;
mod ogs;
mod rulegen;
mod variant;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fml::FmlError;
use crate::go::Color;

pub use cgs::{assess_inputs, assess_move, CgsInputs, CgsRecord, LatestFeatures, ASSESSMENT_START};
pub use features::{compute_tmr, extract_features, MoveFeatures, TmrProfile, TmrState};
pub use kb::{build_default_kb, cgs_variable, KbStats, VariableStats, CGS};
pub use ogs::{decide_ogs_method1, decide_ogs_method2, Ogs, OgsVerdict, Outcome, METHOD2_WINDOW};
pub use rulegen::{
    check_oracle, fit_scheme, generate_rulebase, mirror_fraction, OracleRow, RuleGenScheme,
    SchemeVariable, RELATION_WEIGHTS, RULE_ORACLE, SCHEME_VERSION,
};
pub use variant::FmlVariant;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AssessmentError {
    #[error("no moves counted for {0}")]
    NoMoves(Color),
    #[error("move {0} has no suggestions")]
    NoSuggestions(u32),
    #[error("analysis is for {analysis} but {played} moved")]
    ColorMismatch { analysis: Color, played: Color },
    #[error("analysis is for move {analysis} but move {played} was played")]
    MoveMismatch { analysis: u32, played: u32 },
    #[error("degenerate statistics for {0}")]
    DegenerateStats(&'static str),
    #[error("rule scheme: {0}")]
    Scheme(String),
    #[error("generated rules differ from the reference at rows {0:?}")]
    OracleMismatch(Vec<usize>),
    #[error("move {0}: one color has no features yet")]
    MissingColor(u32),
    #[error("empty CGS series")]
    EmptySeries,
    #[error("unknown CGS label `{0}`")]
    UnknownLabel(String),
    #[error("unknown FML variant `{0}`")]
    UnknownVariant(String),
    #[error(transparent)]
    Fml(#[from] FmlError),
}

/// Current game situation, ordered from White's side to Black's.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CgsLabel {
    WhiteObviousAdvantage,
    WhitePossibleAdvantage,
    UncertainSituation,
    BlackPossibleAdvantage,
    BlackObviousAdvantage,
}

impl CgsLabel {
    pub const ALL: [CgsLabel; 5] = [
        CgsLabel::WhiteObviousAdvantage,
        CgsLabel::WhitePossibleAdvantage,
        CgsLabel::UncertainSituation,
        CgsLabel::BlackPossibleAdvantage,
        CgsLabel::BlackObviousAdvantage,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CgsLabel::WhiteObviousAdvantage => "WhiteObviousAdvantage",
            CgsLabel::WhitePossibleAdvantage => "WhitePossibleAdvantage",
            CgsLabel::UncertainSituation => "UncertainSituation",
            CgsLabel::BlackPossibleAdvantage => "BlackPossibleAdvantage",
            CgsLabel::BlackObviousAdvantage => "BlackObviousAdvantage",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// The side this label leans to.
    pub fn favors(self) -> Option<Color> {
        match self {
            CgsLabel::WhiteObviousAdvantage | CgsLabel::WhitePossibleAdvantage => Some(Color::White),
            CgsLabel::UncertainSituation => None,
            CgsLabel::BlackPossibleAdvantage | CgsLabel::BlackObviousAdvantage => Some(Color::Black),
        }
    }

    /// Same strength, other color.
    pub fn mirror(self) -> CgsLabel {
        CgsLabel::ALL[4 - self.index()]
    }
}

impl fmt::Display for CgsLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CgsLabel {
    type Err = AssessmentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CgsLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| AssessmentError::UnknownLabel(s.to_string()))
    }
}
