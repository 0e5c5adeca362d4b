//! One game's assessment state, fed move by move.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{AnalysisError, MoveAnalysis};
use crate::assessment::{
    assess_move, decide_ogs_method1, decide_ogs_method2, extract_features, AssessmentError,
    CgsRecord, FmlVariant, LatestFeatures, MoveFeatures, OgsVerdict, TmrState,
};
use crate::fml::FuzzySystem;
use crate::go::{Color, Move};
use crate::summarizer::{render_text, summarize, Commentary};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Assessment(#[from] AssessmentError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

/// Which overall verdict feeds the commentary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CommentarySource {
    Method1,
    #[default]
    Method2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameReport {
    pub variant: FmlVariant,
    pub moves: u32,
    pub result: Option<String>,
    pub features: Vec<MoveFeatures>,
    pub cgs: Vec<CgsRecord>,
    pub method1: Option<OgsVerdict>,
    pub method2: Option<OgsVerdict>,
    pub commentary: Option<Commentary>,
    pub commentary_text: Option<String>,
}

#[derive(Debug, Clone)]
pub struct GameAssessor {
    variant: FmlVariant,
    system: Arc<FuzzySystem<f64>>,
    black: TmrState,
    white: TmrState,
    latest: LatestFeatures,
    features: Vec<MoveFeatures>,
    series: Vec<CgsRecord>,
    moves: u32,
}

impl GameAssessor {
    pub fn new(variant: FmlVariant) -> Self {
        Self::with_system(variant, variant.system())
    }

    pub fn with_system(variant: FmlVariant, system: Arc<FuzzySystem<f64>>) -> Self {
        Self {
            variant,
            system,
            black: TmrState::new(Color::Black),
            white: TmrState::new(Color::White),
            latest: LatestFeatures::default(),
            features: Vec::new(),
            series: Vec::new(),
            moves: 0,
        }
    }

    pub fn variant(&self) -> FmlVariant {
        self.variant
    }

    pub fn features(&self) -> &[MoveFeatures] {
        &self.features
    }

    pub fn series(&self) -> &[CgsRecord] {
        &self.series
    }

    pub fn tmr_state(&self, color: Color) -> &TmrState {
        match color {
            Color::Black => &self.black,
            Color::White => &self.white,
        }
    }

    /// Records the analysis taken before `played` and the move itself.
    pub fn observe(
        &mut self,
        analysis: &MoveAnalysis,
        played: &Move,
    ) -> Result<(MoveFeatures, Option<CgsRecord>), PipelineError> {
        let state = match played.color {
            Color::Black => &mut self.black,
            Color::White => &mut self.white,
        };
        let (features, next) = extract_features(analysis, played, state)?;
        *state = next;
        self.latest.update(features.clone());
        self.features.push(features.clone());
        self.moves = self.moves.max(played.number);
        let record = assess_move(&self.latest, &self.system, played.number)?;
        if let Some(r) = &record {
            self.series.push(r.clone());
        }
        Ok((features, record))
    }

    /// Verdicts and commentary. Either may be absent on short games.
    pub fn report(&self, result: Option<&str>, source: CommentarySource) -> GameReport {
        let method1 = decide_ogs_method1(&self.series, result).ok();
        let method2 = decide_ogs_method2(&self.series, result).ok();
        let chosen = match source {
            CommentarySource::Method1 => method1.as_ref(),
            CommentarySource::Method2 => method2.as_ref(),
        };
        let commentary = chosen.and_then(|v| summarize(&self.features, v).ok());
        GameReport {
            variant: self.variant,
            moves: self.moves,
            result: result.map(str::to_string),
            features: self.features.clone(),
            cgs: self.series.clone(),
            commentary_text: commentary.as_ref().map(render_text),
            commentary,
            method1,
            method2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::Suggestion;
    use crate::assessment::CgsLabel;

    fn analysis(n: u32, color: Color, sn: u32, wr: f64) -> MoveAnalysis {
        MoveAnalysis::new(
            n,
            color,
            vec![
                Suggestion::new("A1".parse().unwrap(), sn, wr),
                Suggestion::new("B1".parse().unwrap(), sn / 2, wr),
            ],
        )
        .unwrap()
    }

    #[test]
    fn records_start_after_move_ten() {
        let mut g = GameAssessor::new(FmlVariant::Fml2);
        for n in 1..=30u32 {
            let color = if n % 2 == 1 { Color::Black } else { Color::White };
            let (sn, wr) = match color {
                Color::Black => (18000, 0.8),
                Color::White => (3000, 0.2),
            };
            let mv = Move::new(color, "A1".parse().unwrap(), n);
            let (_, rec) = g.observe(&analysis(n, color, sn, wr), &mv).unwrap();
            assert_eq!(rec.is_some(), n > 10);
        }
        assert_eq!(g.series().len(), 20);
        assert_eq!(g.tmr_state(Color::Black).n(), 15);
        assert!(g.series().iter().all(|r| r.label.favors() == Some(Color::Black)));
        let report = g.report(Some("B+R"), CommentarySource::Method2);
        assert_eq!(report.method2.as_ref().unwrap().correct, Some(true));
        assert!(report
            .commentary_text
            .unwrap()
            .ends_with("Overall game situation is favorable to Black.\n"));
        assert_ne!(report.cgs[0].label, CgsLabel::UncertainSituation);
    }

    #[test]
    fn short_game_has_no_verdicts() {
        let mut g = GameAssessor::new(FmlVariant::Fml1);
        let mv = Move::new(Color::Black, "A1".parse().unwrap(), 1);
        g.observe(&analysis(1, Color::Black, 10, 0.5), &mv).unwrap();
        let r = g.report(None, CommentarySource::Method2);
        assert!(r.method1.is_none() && r.commentary.is_none());
    }
}
